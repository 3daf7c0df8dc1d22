#pragma once

#include <functional>
#include <vector>

namespace sizespec {

struct NelderMeadOptions {
    double initial_step = 0.5;
    // Stop when |f_worst - f_best| <= ftol * (|f_worst| + |f_best|) / 2.
    double ftol = 1e-12;
    int max_iterations = 2000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Downhill simplex minimization of an unconstrained objective.
// Non-finite objective values are treated as +infinity.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace sizespec
