#pragma once

#include "edsense/closed_form.hpp"
#include "edsense/errors.hpp"
#include "edsense/gamma_mixture.hpp"
#include "edsense/monte_carlo.hpp"
#include "edsense/presets.hpp"
#include "edsense/quadrature.hpp"
#include "edsense/rng.hpp"
#include "edsense/roc.hpp"
#include "edsense/scenario.hpp"
#include "edsense/scenario_json.hpp"
#include "edsense/specfun.hpp"
#include "edsense/validation.hpp"
