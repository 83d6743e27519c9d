#pragma once

#include <Eigen/Core>
#include <functional>

#include "slc/common.hpp"

namespace slc {

// Controls for adaptive integration and domain truncation.
struct QuadratureSpec {
    double rtol = 1e-9;
    double atol = 1e-12;
    int max_subdiv = 1 << 15;
    // Integrate where phi(x) - min phi <= energy_budget (nats). e^-46 ~ 1e-20.
    double energy_budget = 46.0;
};

// 15-point Gauss-Kronrod rule on [a, b] with the QUADPACK error estimate.
ValueWithError gk15(const std::function<double(double)>& f, double a, double b);

// Adaptive bisection driven by the GK15 estimate. Deterministic: cells are
// processed depth-first left to right and accumulated with compensated sums.
// Throws NumericsError when the subdivision budget is exhausted before the
// requested tolerance is met.
ValueWithError integrate(const std::function<double(double)>& f, double a,
                         double b, const QuadratureSpec& spec);

// Iterated (tensor) integration over an axis-aligned box, d <= 3. Inner
// integrals run at a tightened tolerance; their error estimates are folded
// into the reported bound.
ValueWithError integrate_box(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
    const QuadratureSpec& spec);

}  // namespace slc
