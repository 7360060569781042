// Umbrella header.
#pragma once

#include "negcalc/calculus.hpp"
#include "negcalc/checks.hpp"
#include "negcalc/errors.hpp"
#include "negcalc/models.hpp"
#include "negcalc/negativity.hpp"
#include "negcalc/oracle.hpp"
#include "negcalc/sweep.hpp"
#include "negcalc/tensor.hpp"
#include "negcalc/version.hpp"
