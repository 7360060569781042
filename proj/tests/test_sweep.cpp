#include "negcalc/sweep.hpp"

#include <cmath>

#include "doctest.h"
#include "negcalc/checks.hpp"

using namespace negcalc;

namespace {

RunConfig cavity_time_config(double p, int grid, double t_max) {
  RunConfig config;
  config.experiment = Experiment::CavityTime;
  config.params = {{"p", p}, {"grid", double(grid)}, {"max", t_max}};
  return config;
}

}  // namespace

TEST_CASE("experiment names round-trip") {
  for (Experiment e : {Experiment::Jcm2x2, Experiment::JcmBound,
                       Experiment::CavityTime, Experiment::CavityMixing,
                       Experiment::Invariants}) {
    CHECK(parse_experiment(experiment_name(e)) == e);
  }
  CHECK_THROWS_AS(parse_experiment("nope"), std::invalid_argument);
}

TEST_CASE("cavity time sweep: records, death, and zero derivatives after it") {
  SweepResult result = run_sweep(cavity_time_config(0.35, 41, 2.0));
  REQUIRE(result.records.size() == 41);
  CHECK(result.records.front().mu == 0.0);
  CHECK(result.records.back().mu == 2.0);
  CHECK(result.records.front().negativity == doctest::Approx(0.5).epsilon(1e-12));

  bool dead = false;
  for (const auto& rec : result.records) {
    REQUIRE(rec.d1.has_value());  // partial transpose stays invertible here
    if (!dead && rec.mu > 0.0 && rec.negativity < 1e-12) dead = true;
    if (dead) {
      CHECK(rec.negativity < 1e-12);
      CHECK(std::abs(*rec.d1) < 1e-12);
      CHECK(std::abs(*rec.d2) < 1e-12);
    }
  }
  CHECK(dead);
}

TEST_CASE("sweep output is deterministic across thread counts") {
  RunConfig one = cavity_time_config(0.5, 31, 1.5);
  one.params["threads"] = 1;
  RunConfig many = cavity_time_config(0.5, 31, 1.5);
  many.params["threads"] = 8;
  // thread count is not part of the payload; compare records only
  CHECK(to_csv(SweepResult{{}, run_sweep(one).records}) ==
        to_csv(SweepResult{{}, run_sweep(many).records}));
}

TEST_CASE("grid refinement preserves values at shared points") {
  SweepResult coarse = run_sweep(cavity_time_config(0.35, 21, 2.0));
  SweepResult fine = run_sweep(cavity_time_config(0.35, 41, 2.0));
  for (std::size_t i = 0; i < coarse.records.size(); ++i) {
    CHECK(coarse.records[i].negativity == fine.records[2 * i].negativity);
  }
}

TEST_CASE("CSV round-trips byte-identically") {
  RunConfig config = cavity_time_config(0.35, 21, 2.0);
  config.params["t0"] = 0.4;  // exercise the resummed column too
  SweepResult result = run_sweep(config);
  const std::string text = to_csv(result);
  CHECK(to_csv(parse_csv(text)) == text);

  CHECK_THROWS_AS(parse_csv("mu,negativity\n1,2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_csv("# bad metadata\n" + std::string(kCsvHeader) + "\n"),
                  std::invalid_argument);
}

TEST_CASE("JSON round-trips byte-identically") {
  RunConfig config = cavity_time_config(0.35, 21, 2.0);
  config.params["t0"] = 0.4;
  SweepResult result = run_sweep(config);
  const std::string text = to_json(result);
  CHECK(to_json(parse_json(text)) == text);
}

TEST_CASE("resummed column semantics") {
  RunConfig config = cavity_time_config(0.35, 21, 2.0);
  config.params["t0"] = 0.4;
  SweepResult result = run_sweep(config);
  // at the anchor itself the resummed value is exact
  for (const auto& rec : result.records) {
    REQUIRE(rec.resummed.has_value());
    REQUIRE(rec.validated.has_value());
    if (rec.mu == 0.4) {
      CHECK(*rec.resummed == doctest::Approx(rec.negativity).epsilon(1e-12));
      CHECK(*rec.validated);
    }
  }
  // without an anchor the column is absent
  SweepResult plain = run_sweep(cavity_time_config(0.35, 5, 2.0));
  for (const auto& rec : plain.records) {
    CHECK_FALSE(rec.resummed.has_value());
    CHECK_FALSE(rec.validated.has_value());
  }
}

TEST_CASE("config validation") {
  RunConfig config = cavity_time_config(1.5, 21, 2.0);  // p out of range
  CHECK_THROWS_AS(run_sweep(config), std::invalid_argument);
  config = cavity_time_config(0.5, 1, 2.0);  // grid too small
  CHECK_THROWS_AS(run_sweep(config), std::invalid_argument);
  config = cavity_time_config(0.5, 21, 2.0);
  config.params["t0"] = 5.0;  // anchor outside the sweep window
  CHECK_THROWS_AS(run_sweep(config), std::invalid_argument);
  config = cavity_time_config(0.5, 21, -1.0);  // max < min
  CHECK_THROWS_AS(run_sweep(config), std::invalid_argument);
}

TEST_CASE("locate_kink") {
  SUBCASE("smooth series is kink-free") {
    std::vector<SweepRecord> series;
    for (int i = 0; i <= 100; ++i) {
      SweepRecord rec;
      rec.mu = i / 100.0;
      rec.d1 = std::sin(rec.mu);  // smooth
      series.push_back(rec);
    }
    CHECK(locate_kink(series).empty());
  }

  SUBCASE("cavity p-sweeps reproduce the known kink locations") {
    struct Expect {
      double t, p;
    };
    for (Expect e : {Expect{0.4, 0.1425}, Expect{0.8, 0.0415}, Expect{1.2, 0.43}}) {
      RunConfig config;
      config.experiment = Experiment::CavityMixing;
      config.params = {{"t", e.t}, {"grid", 501.0}};
      SweepResult result = run_sweep(config);
      auto kinks = locate_kink(result.records);
      CAPTURE(e.t);
      REQUIRE(!kinks.empty());
      double nearest = kinks[0];
      for (double k : kinks) {
        if (std::abs(k - e.p) < std::abs(nearest - e.p)) nearest = k;
      }
      CHECK(std::abs(nearest - e.p) < 0.01);
    }
  }
}

TEST_CASE("invariant suite passes end to end") {
  for (const auto& r : checks::run_invariant_suite(99, 12)) {
    CAPTURE(r.name);
    CAPTURE(r.detail);
    CHECK(r.passed);
  }
}
