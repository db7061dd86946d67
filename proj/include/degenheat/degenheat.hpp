#pragma once

#include "degenheat/coefficients.hpp"
#include "degenheat/conditions.hpp"
#include "degenheat/data_functions.hpp"
#include "degenheat/errors.hpp"
#include "degenheat/kernel.hpp"
#include "degenheat/problem.hpp"
#include "degenheat/quadrature.hpp"
#include "degenheat/solver.hpp"
#include "degenheat/spec_io.hpp"
#include "degenheat/verify.hpp"
