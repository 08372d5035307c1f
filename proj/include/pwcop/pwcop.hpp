#pragma once

// Umbrella header for the piecewise copula regression library.

#include "pwcop/changepoint.hpp"
#include "pwcop/copula.hpp"
#include "pwcop/dependence.hpp"
#include "pwcop/empirical.hpp"
#include "pwcop/families.hpp"
#include "pwcop/gluing.hpp"
#include "pwcop/marginal.hpp"
#include "pwcop/numerics.hpp"
#include "pwcop/reference_models.hpp"
#include "pwcop/regression.hpp"
#include "pwcop/sample.hpp"
