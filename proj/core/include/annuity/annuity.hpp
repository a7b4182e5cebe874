#pragma once

#include "annuity/boundary_solver.hpp"
#include "annuity/dual_utility.hpp"
#include "annuity/errors.hpp"
#include "annuity/io.hpp"
#include "annuity/model.hpp"
#include "annuity/policy.hpp"
#include "annuity/random.hpp"
#include "annuity/simulator.hpp"
#include "annuity/verification.hpp"
