#pragma once

#include <functional>
#include <vector>

namespace csl::optimize {

using Objective = std::function<double(const std::vector<double>&)>;

struct Result {
    std::vector<double> x;
    double value;
    int iterations;
    bool converged;
};

// Minimizes f with the Nelder-Mead simplex. Stops when the spread of simplex
// values falls below ftol or after max_iter iterations.
Result nelder_mead(const Objective& f, std::vector<double> x0, double step, double ftol, int max_iter);

// Central-difference gradient.
std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x, double h = 1e-5);

// BFGS with numerical gradients and backtracking line search. Converged when
// the improvement of f in an iteration falls below ftol.
Result bfgs(const Objective& f, std::vector<double> x0, double ftol, int max_iter);

} // namespace csl::optimize
