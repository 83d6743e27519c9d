#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "slc/model.hpp"
#include "slc/quadrature.hpp"

namespace slc {

// Mean, covariance and centered moments with per-entry error estimates.
// central_moments holds M_2..M_max (1D continuous and discrete models).
struct Summary {
    Eigen::VectorXd mean, mean_err;
    Eigen::MatrixXd cov, cov_err;
    std::vector<double> central_moments, moment_err;
};

// Z = integral of e^(-phi) over the truncated domain. Error bound combines
// the quadrature estimate with an e^(-budget) tail term (zero when the
// window is the declared domain itself). Cached on the model.
ValueWithError normalize(const ContinuousModel& model,
                         const QuadratureSpec& spec = {});

// E[g(X)] for 1D models. Throws on non-finite integrand values.
ValueWithError expectation(const ContinuousModel& model,
                           const std::function<double(double)>& g,
                           const QuadratureSpec& spec = {});

// E[g(X_i)]: 1D quadrature over the axis marginal (gaussian or separable).
ValueWithError expect_axis(const ContinuousModel& model, int i,
                           const std::function<double(double)>& g,
                           const QuadratureSpec& spec = {});

// E[gi(X_i) gj(X_j)], i != j: product rule when coordinates are independent,
// iterated 2D quadrature over the gaussian pair marginal otherwise.
ValueWithError expect_pair(const ContinuousModel& model, int i, int j,
                           const std::function<double(double)>& gi,
                           const std::function<double(double)>& gj,
                           const QuadratureSpec& spec = {});

// Exact (compensated) finite sum E[v(X)] = sum f(k) v(k).
double expectation(const DiscretePmf& pmf, std::span<const double> values);

Summary summarize(const ContinuousModel& model, int max_moment,
                  const QuadratureSpec& spec = {});
Summary summarize(const DiscretePmf& pmf, int max_moment = 2);

// Inverse-CDF sampler for 1D models: CDF tabulated by quadrature on a fine
// grid, monotone cubic interpolation, bisection inversion. Identical output
// for identical (model, n, seed).
std::vector<double> sample(const ContinuousModel& model, std::size_t n,
                           std::uint64_t seed, const QuadratureSpec& spec = {});

}  // namespace slc
