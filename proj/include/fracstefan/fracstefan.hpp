#pragma once

#include "fracstefan/errors.hpp"
#include "fracstefan/special_fn.hpp"
#include "fracstefan/series_integrals.hpp"
#include "fracstefan/frac_ops.hpp"
#include "fracstefan/stefan_solver.hpp"
#include "fracstefan/verifier.hpp"
