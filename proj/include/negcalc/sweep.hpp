// Parameter-sweep experiments, figure-ready data records, CSV/JSON
// round-tripping, and kink location.
#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "negcalc/models.hpp"
#include "negcalc/negativity.hpp"
#include "negcalc/version.hpp"

namespace negcalc {

enum class Experiment { Jcm2x2, JcmBound, CavityTime, CavityMixing, Invariants };

inline const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Jcm2x2: return "jcm-2x2";
    case Experiment::JcmBound: return "jcm-bound";
    case Experiment::CavityTime: return "cavity-time";
    case Experiment::CavityMixing: return "cavity-p";
    default: return "invariants";
  }
}

inline Experiment parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::Jcm2x2, Experiment::JcmBound,
                       Experiment::CavityTime, Experiment::CavityMixing,
                       Experiment::Invariants}) {
    if (name == experiment_name(e)) return e;
  }
  throw std::invalid_argument("unknown experiment: " + std::string(name));
}

struct RunConfig {
  Experiment experiment = Experiment::Jcm2x2;
  std::map<std::string, double> params;
  std::string out = "-";
  enum class Format { Csv, Json } format = Format::Csv;
  double singular_tol = kSingularityTol;

  double param_or(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
  bool has(const std::string& key) const { return params.count(key) > 0; }
};

// One grid point of a sweep. Derivative fields are empty exactly where the
// partial transpose is singular and the derivative does not exist.
struct SweepRecord {
  double mu = 0.0;
  double negativity = 0.0;
  std::optional<double> d1;
  std::optional<double> d2;
  double log_negativity = 0.0;
  double renyi2 = 0.0;
  double min_abs_eig = 0.0;
  std::optional<double> resummed;
  std::optional<bool> validated;
};

struct SweepResult {
  std::vector<std::pair<std::string, std::string>> metadata;  // ordered
  std::vector<SweepRecord> records;
};

// Numerical failure inside a sweep, tagged with the offending grid point.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(double mu, const std::string& what)
      : std::runtime_error("at grid point mu=" + std::to_string(mu) + ": " + what),
        mu_(mu) {}
  double mu() const noexcept { return mu_; }

 private:
  double mu_;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct ExperimentSetup {
  Trajectory trajectory;
  double mu_unit = 1.0;  // internal parameter = mu * mu_unit
  std::string mu_label;
  double mu_min = 0.0, mu_max = 1.0;
  int grid = 201;
  std::optional<double> anchor;  // expansion anchor in display units
};

inline void require_range(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

inline ExperimentSetup make_setup(const RunConfig& config) {
  ExperimentSetup s;
  s.grid = static_cast<int>(config.param_or("grid", 201));
  require_range(s.grid >= 2, "grid must be >= 2");
  if (config.has("t0")) s.anchor = config.params.at("t0");

  switch (config.experiment) {
    case Experiment::Jcm2x2: {
      JcmParams p{config.param_or("omega", 10.0), config.param_or("delta", 1.0),
                  config.param_or("g", 5.0),
                  static_cast<Index>(config.param_or("n-fock", 8.0))};
      require_range(p.g != 0.0, "g must be nonzero");
      s.trajectory = jcm_analytic_trajectory(p);
      s.mu_unit = 2.0 * M_PI / p.rabi();
      s.mu_label = "time in units of 2*pi/Omega";
      s.mu_min = config.param_or("min", 0.0);
      s.mu_max = config.param_or("max", 1.0);
      break;
    }
    case Experiment::JcmBound: {
      JcmParams p{config.param_or("omega", 10.0), config.param_or("delta", 1.0),
                  config.param_or("g", 5.0),
                  static_cast<Index>(config.param_or("n-fock", 8.0))};
      require_range(p.g != 0.0, "g must be nonzero");
      require_range(p.n_fock >= 5, "n-fock must be >= 5");
      s.trajectory = jcm_bound_trajectory(p);
      s.mu_unit = 2.0 * M_PI / p.g;
      s.mu_label = "time in units of 2*pi/g";
      s.mu_min = config.param_or("min", 0.0);
      s.mu_max = config.param_or("max", 1.0);
      break;
    }
    case Experiment::CavityTime: {
      const double p = config.param_or("p", 0.35);
      require_range(p >= 0.0 && p <= 1.0, "p must lie in [0,1]");
      s.trajectory = cavity_time_trajectory(p);
      s.mu_label = "time in units of the decay constant";
      s.mu_min = config.param_or("min", 0.0);
      s.mu_max = config.param_or("max", 2.0);
      require_range(s.mu_min >= 0.0, "time must be >= 0");
      break;
    }
    case Experiment::CavityMixing: {
      const double t = config.param_or("t", 0.4);
      require_range(t >= 0.0, "t must be >= 0");
      s.trajectory = cavity_mixing_trajectory(t);
      s.mu_label = "initial mixing parameter p";
      s.mu_min = config.param_or("min", 0.0);
      s.mu_max = config.param_or("max", 1.0);
      require_range(s.mu_min >= 0.0 && s.mu_max <= 1.0, "p must lie in [0,1]");
      break;
    }
    default:
      throw std::invalid_argument("make_setup: not a sweep experiment");
  }
  require_range(s.mu_max > s.mu_min, "max must exceed min");
  if (s.anchor) {
    require_range(*s.anchor >= s.mu_min && *s.anchor <= s.mu_max,
                  "t0 must lie inside [min, max]");
  }
  return s;
}

// Precomputed expansion anchor for the resummed column.
struct ResummedAnchor {
  RowVector jacobian;
  Matrix rho0;
  BipartiteDims dims;
  double value0 = 0.0;
};

}  // namespace detail

inline SweepResult run_sweep(const RunConfig& config) {
  const detail::ExperimentSetup setup = detail::make_setup(config);

  SweepResult result;
  result.metadata.emplace_back("generator", std::string("negcalc ") + kVersion);
  result.metadata.emplace_back("experiment", experiment_name(config.experiment));
  result.metadata.emplace_back("mu", setup.mu_label);
  for (const auto& [key, value] : config.params) {
    result.metadata.emplace_back("param " + key, detail::format_double(value));
  }
  result.metadata.emplace_back("singular-tol",
                               detail::format_double(config.singular_tol));
  result.metadata.emplace_back("resummed-validate-tol", detail::format_double(1e-8));

  std::optional<detail::ResummedAnchor> anchor;
  if (setup.anchor) {
    const DensityMatrix rho0 = setup.trajectory.state(*setup.anchor * setup.mu_unit);
    const EigDecomp eig = partial_transpose_spectrum(rho0);
    if (eig.invertible(config.singular_tol)) {
      anchor = detail::ResummedAnchor{
          trace_norm_jacobian_hermitian(eig, config.singular_tol), rho0.matrix(),
          rho0.dims(), negativity(rho0)};
    }
    // a singular anchor leaves the resummed column absent rather than fabricated
  }

  const int n = setup.grid;
  result.records.assign(n, SweepRecord{});

  const int threads = std::max(
      1, std::min<int>(static_cast<int>(config.param_or("threads", 8.0)),
                       static_cast<int>(std::thread::hardware_concurrency())));
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::optional<NumericalError> first_error;

  auto evaluate = [&](int i) {
    const double mu =
        setup.mu_min + (setup.mu_max - setup.mu_min) * i / static_cast<double>(n - 1);
    SweepRecord rec;
    rec.mu = mu;
    const double internal = mu * setup.mu_unit;
    const DensityMatrix rho = setup.trajectory.state(internal);
    const EigDecomp eig = partial_transpose_spectrum(rho);
    rec.negativity = negativity(rho);
    rec.log_negativity = std::log2(2.0 * rec.negativity + 1.0);
    rec.renyi2 = renyi2_entropy(rho);
    rec.min_abs_eig = eig.min_abs_eigenvalue();
    try {
      const Matrix drho = setup.trajectory.partial(internal, 1) * setup.mu_unit;
      rec.d1 = negativity_d1(eig, rho.dims(), drho, config.singular_tol);
      const Matrix d2rho =
          setup.trajectory.partial(internal, 2) * setup.mu_unit * setup.mu_unit;
      rec.d2 = negativity_d2(eig, rho.dims(), drho, d2rho, config.singular_tol);
    } catch (const SingularMatrixError&) {
      rec.d1.reset();
      rec.d2.reset();
    }
    if (anchor) {
      const Vector w = partial_commutation_matrix(anchor->dims)
                           .apply(vec((rho.matrix() - anchor->rho0).eval()));
      const Complex shift = (anchor->jacobian * w).value();
      rec.resummed = anchor->value0 + 0.5 * shift.real();
      rec.validated = std::abs(*rec.resummed - rec.negativity) <= 1e-8;
    }
    result.records[static_cast<std::size_t>(i)] = rec;
  };

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      try {
        evaluate(i);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          const double mu = setup.mu_min +
                            (setup.mu_max - setup.mu_min) * i / static_cast<double>(n - 1);
          first_error.emplace(mu, e.what());
        }
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) throw *first_error;
  return result;
}

// ------------------------------- kinks ---------------------------------------

// Jump threshold from the series itself: well above the smooth grid-to-grid
// variation of d1, with an absolute floor for flat series.
inline double default_kink_threshold(const std::vector<SweepRecord>& records) {
  std::vector<double> jumps;
  const SweepRecord* prev = nullptr;
  for (const auto& rec : records) {
    if (!rec.d1) continue;
    if (prev) jumps.push_back(std::abs(*rec.d1 - *prev->d1));
    prev = &rec;
  }
  if (jumps.size() < 4) return 1e-6;
  std::nth_element(jumps.begin(), jumps.begin() + jumps.size() / 2, jumps.end());
  return std::max(1e-6, 20.0 * jumps[jumps.size() / 2]);
}

// mu values where d1 jumps by more than the threshold between adjacent grid
// points with defined derivatives; each kink is reported at the midpoint.
inline std::vector<double> locate_kink(const std::vector<SweepRecord>& records,
                                       double threshold = -1.0) {
  if (threshold < 0.0) threshold = default_kink_threshold(records);
  std::vector<double> kinks;
  const SweepRecord* prev = nullptr;
  for (const auto& rec : records) {
    if (!rec.d1) continue;
    if (prev && std::abs(*rec.d1 - *prev->d1) > threshold) {
      kinks.push_back(0.5 * (prev->mu + rec.mu));
    }
    prev = &rec;
  }
  return kinks;
}

// ------------------------------ CSV / JSON -----------------------------------

inline constexpr const char* kCsvHeader =
    "mu,negativity,d1,d2,log_negativity,renyi2,min_abs_eig,resummed,validated";

inline std::string to_csv(const SweepResult& result) {
  std::string out;
  for (const auto& [key, value] : result.metadata) {
    out += "# " + key + ": " + value + "\n";
  }
  out += kCsvHeader;
  out += "\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? detail::format_double(*v) : std::string();
  };
  for (const auto& rec : result.records) {
    out += detail::format_double(rec.mu) + "," + detail::format_double(rec.negativity) +
           "," + opt(rec.d1) + "," + opt(rec.d2) + "," +
           detail::format_double(rec.log_negativity) + "," +
           detail::format_double(rec.renyi2) + "," +
           detail::format_double(rec.min_abs_eig) + "," + opt(rec.resummed) + ",";
    if (rec.validated) out += *rec.validated ? "true" : "false";
    out += "\n";
  }
  return out;
}

namespace detail {

inline double parse_double(std::string_view token, const char* what) {
  double value = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw std::invalid_argument(std::string("malformed number in ") + what);
  }
  return value;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

inline SweepResult parse_csv(std::string_view text) {
  SweepResult result;
  bool header_seen = false;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string_view body = line.substr(line.starts_with("# ") ? 2 : 1);
      const std::size_t colon = body.find(": ");
      if (colon == std::string_view::npos) {
        throw std::invalid_argument("malformed metadata line");
      }
      result.metadata.emplace_back(std::string(body.substr(0, colon)),
                                   std::string(body.substr(colon + 2)));
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw std::invalid_argument("unexpected CSV header");
      header_seen = true;
      continue;
    }
    const auto fields = detail::split(line, ',');
    if (fields.size() != 9) throw std::invalid_argument("wrong CSV field count");
    SweepRecord rec;
    rec.mu = detail::parse_double(fields[0], "mu");
    rec.negativity = detail::parse_double(fields[1], "negativity");
    if (!fields[2].empty()) rec.d1 = detail::parse_double(fields[2], "d1");
    if (!fields[3].empty()) rec.d2 = detail::parse_double(fields[3], "d2");
    rec.log_negativity = detail::parse_double(fields[4], "log_negativity");
    rec.renyi2 = detail::parse_double(fields[5], "renyi2");
    rec.min_abs_eig = detail::parse_double(fields[6], "min_abs_eig");
    if (!fields[7].empty()) rec.resummed = detail::parse_double(fields[7], "resummed");
    if (!fields[8].empty()) rec.validated = fields[8] == "true";
    result.records.push_back(rec);
  }
  if (!header_seen) throw std::invalid_argument("CSV header missing");
  return result;
}

inline std::string to_json(const SweepResult& result) {
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : result.metadata) j["metadata"][key] = value;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& rec : result.records) {
    nlohmann::ordered_json r;
    r["mu"] = rec.mu;
    r["negativity"] = rec.negativity;
    r["d1"] = rec.d1 ? nlohmann::ordered_json(*rec.d1) : nullptr;
    r["d2"] = rec.d2 ? nlohmann::ordered_json(*rec.d2) : nullptr;
    r["log_negativity"] = rec.log_negativity;
    r["renyi2"] = rec.renyi2;
    r["min_abs_eig"] = rec.min_abs_eig;
    r["resummed"] = rec.resummed ? nlohmann::ordered_json(*rec.resummed) : nullptr;
    r["validated"] = rec.validated ? nlohmann::ordered_json(*rec.validated) : nullptr;
    j["records"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

inline SweepResult parse_json(std::string_view text) {
  const auto j = nlohmann::ordered_json::parse(text);
  SweepResult result;
  for (const auto& [key, value] : j.at("metadata").items()) {
    result.metadata.emplace_back(key, value.get<std::string>());
  }
  for (const auto& r : j.at("records")) {
    SweepRecord rec;
    rec.mu = r.at("mu").get<double>();
    rec.negativity = r.at("negativity").get<double>();
    if (!r.at("d1").is_null()) rec.d1 = r.at("d1").get<double>();
    if (!r.at("d2").is_null()) rec.d2 = r.at("d2").get<double>();
    rec.log_negativity = r.at("log_negativity").get<double>();
    rec.renyi2 = r.at("renyi2").get<double>();
    rec.min_abs_eig = r.at("min_abs_eig").get<double>();
    if (!r.at("resummed").is_null()) rec.resummed = r.at("resummed").get<double>();
    if (!r.at("validated").is_null()) rec.validated = r.at("validated").get<bool>();
    result.records.push_back(rec);
  }
  return result;
}

inline std::string serialize(const SweepResult& result, RunConfig::Format format) {
  return format == RunConfig::Format::Csv ? to_csv(result) : to_json(result);
}

}  // namespace negcalc
