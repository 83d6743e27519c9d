#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>

#include "slc/engine.hpp"
#include "slc/model.hpp"

namespace slc {

enum class Verdict { certified, refuted_on_window, undetermined_tail };

std::string to_string(Verdict v);

// Outcome of a strong log-concavity check over an explicit finite window or
// grid. margin is inf phi'' (1D), the minimal ratio-difference (discrete),
// or min lambda_min(phi''(x) - Sigma^{-1}) (multi-d).
struct SlcCertificate {
    Verdict verdict = Verdict::undetermined_tail;
    bool discrete = false;
    SupportKind support = SupportKind::naturals;  // discrete only
    int dim = 1;
    std::optional<double> alpha_star;
    double margin = 0.0;
    double arg_min = 0.0;
    Eigen::VectorXd arg_min_point;  // multi-d
    double window_lo = 0.0, window_hi = 0.0;
    double tol = kCertifyTol;
    std::optional<Eigen::MatrixXd> sigma;
    std::string note;
};

// inf phi'' over the truncated window (dense grid + golden-section refinement
// around local minima). certified with alpha* = 1/inf when inf > tol;
// refuted when phi'' < -tol somewhere; undetermined_tail when the infimum
// only approaches zero.
SlcCertificate certify_slc_1d(const ContinuousModel& model,
                              int grid_points = 2001,
                              const QuadratureSpec& spec = {});

// Loewner check phi''(x) >= Sigma^{-1} on a tensor grid over the window.
SlcCertificate certify_slc_nd(const ContinuousModel& model,
                              const Eigen::MatrixXd& Sigma,
                              int grid_points_per_axis = 33,
                              const QuadratureSpec& spec = {});

// Discrete criterion: alpha* = max(f(1)/f(0), 1/min_n ratio-difference).
// Verdict downgrades to undetermined_tail when the minimizing n sits at the
// truncation edge of a naturals-support pmf.
SlcCertificate certify_slc_discrete(
    const DiscretePmf& pmf, std::optional<double> candidate_alpha = std::nullopt);

// Binomial-operator criterion on {0..N}: the score at (alpha, mean) must be
// non-increasing.
SlcCertificate certify_slc_binomial(const DiscretePmf& pmf,
                                    double candidate_alpha);

// Does the certificate imply the SLC(alpha) check passes at this alpha?
bool check_alpha(const SlcCertificate& cert, double alpha);

struct DominanceReport {
    double lambda_min = 0.0;          // of Sigma - Cov
    Eigen::VectorXd diag_margins;     // Sigma_jj - Var_j
    bool equality = false;
    double tol = 0.0;
};

// Dominance check Cov(X,X) <= Sigma with a near-equality flag
// that feeds the characterization diagnostic.
DominanceReport covariance_dominance(const Summary& summary,
                                     const Eigen::MatrixXd& Sigma,
                                     double tol = 0.0);

}  // namespace slc
