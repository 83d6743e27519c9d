#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "slc/calculus.hpp"
#include "slc/certify.hpp"
#include "slc/engine.hpp"
#include "slc/model.hpp"

namespace slc {

// One evaluated inequality: signed gap(s), error bound, equality flag, and
// an echo of the inputs. gaps[0] is the headline value; moment_chain packs
// the whole chain.
struct GapReport {
    std::string inequality;
    std::vector<double> gaps;
    double error_bound = 0.0;
    bool equality = false;
    nlohmann::json inputs;
    std::string diagnostic;
    std::optional<double> cross_check;  // independent second route, if any
    bool non_theorem = false;

    double gap() const { return gaps.at(0); }
};

// E[grad g^T (phi'')^{-1} grad g] - Var(g). Throws DomainError
// when phi'' is singular at a quadrature node (merely log-concave model).
GapReport brascamp_lieb_gap(const ContinuousModel& model, const TestFunction& g,
                            const QuadratureSpec& spec = {},
                            double equality_tol = kEqualityTol);
GapReport brascamp_lieb_gap(const ContinuousModel& model,
                            const MultiTestFunction& g,
                            const QuadratureSpec& spec = {},
                            double equality_tol = kEqualityTol);

// E[grad g^T Sigma grad g] - Var(g); alpha plays Sigma's role in 1D.
GapReport weighted_poincare_gap(const ContinuousModel& model, double alpha,
                                const TestFunction& g,
                                const QuadratureSpec& spec = {},
                                double equality_tol = kEqualityTol);
GapReport weighted_poincare_gap(const ContinuousModel& model,
                                const Eigen::MatrixXd& Sigma,
                                const MultiTestFunction& g,
                                const QuadratureSpec& spec = {},
                                double equality_tol = kEqualityTol);

// Cov(u(X), v(X)) >= 0 for comonotone u, v; computed directly and by the
// two-copy identity (exact double sum on discrete supports, paired samples
// from the seeded sampler on continuous ones).
GapReport chebyshev_cov(const DiscretePmf& pmf, std::span<const double> u,
                        std::span<const double> v,
                        Monotonicity u_decl = Monotonicity::nondecreasing,
                        Monotonicity v_decl = Monotonicity::nondecreasing,
                        double equality_tol = kEqualityTol);
GapReport chebyshev_cov(const ContinuousModel& model, const TestFunction& u,
                        const TestFunction& v, const QuadratureSpec& spec = {},
                        std::size_t pair_samples = 100000,
                        std::uint64_t seed = 20240901,
                        double equality_tol = kEqualityTol);

// alpha E[v'(X)] - E[(X - mu) v(X)] with mu the quadrature mean; the cross
// check is -alpha Cov(u, v) with u the score at (alpha, mu).
GapReport stein_gap_gaussian(const ContinuousModel& model, double alpha,
                             const TestFunction& v,
                             const QuadratureSpec& spec = {},
                             double equality_tol = kEqualityTol);

// alpha E[nabla* v(X)] - E[(X - mu) v(X)], exact truncated sums; cross check
// is the two-copy double sum of -alpha Cov(u, v).
GapReport stein_gap_poisson(const DiscretePmf& pmf, double alpha,
                            std::span<const double> v,
                            double equality_tol = kEqualityTol);

// alpha E[nabla_N* v(X)] - E[(X - mu) v(X)] on {0..N}.
GapReport stein_gap_binomial(const DiscretePmf& pmf, double alpha,
                             std::span<const double> v,
                             double equality_tol = kEqualityTol);

// Chain gaps alpha(2r-1) M_{2r-2} - M_{2r} and closed-form gaps
// (2r)!/r! (alpha/2)^r - M_{2r} for r = 1..r_max. gaps layout:
// [chain_1..chain_R, closed_1..closed_R]. Discrete inputs are exploratory
// and flagged non_theorem.
GapReport moment_chain(const ContinuousModel& model, double alpha, int r_max,
                       const QuadratureSpec& spec = {},
                       double equality_tol = kEqualityTol);
GapReport moment_chain(const DiscretePmf& pmf, double alpha, int r_max,
                       double equality_tol = kEqualityTol);

// Dictionary-restricted estimate of U(X, Sigma): the largest generalized
// Rayleigh quotient of the dictionary covariance against the Dirichlet Gram
// matrix (regularized by tau = 1e-12 tr(B)/dim). A certified lower bound on
// the supremum over all smooth g.
GapReport u_ratio_estimate(const ContinuousModel& model, double sigma,
                           const std::vector<TestFunction>& dictionary,
                           const QuadratureSpec& spec = {},
                           double equality_tol = kEqualityTol);
GapReport u_ratio_estimate(const ContinuousModel& model,
                           const Eigen::MatrixXd& Sigma,
                           const std::vector<MultiTestFunction>& dictionary,
                           const QuadratureSpec& spec = {},
                           double equality_tol = kEqualityTol);

struct DiagnosticVerdict {
    std::string kind;  // consistent_with_gaussian | consistent_with_poisson |
                       // consistent_with_binomial | no_equality_detected
    nlohmann::json params;
    std::string note;
};

// Folds equality flags of strictly-increasing-v gaps into the matching
// characterization; a near-equality covariance dominance report triggers
// the Gaussian characterization as well (the only route in d > 1, where no
// Stein gap exists). Numerical equality is evidence, not proof; the verdict
// says so.
DiagnosticVerdict characterization_diagnostic(
    const SlcCertificate& cert, const std::vector<GapReport>& reports,
    const Eigen::VectorXd& mean, std::optional<int> N = std::nullopt,
    const std::optional<DominanceReport>& dominance = std::nullopt);

DiagnosticVerdict characterization_diagnostic(
    const SlcCertificate& cert, const std::vector<GapReport>& reports,
    double mu, std::optional<int> N = std::nullopt,
    const std::optional<DominanceReport>& dominance = std::nullopt);

}  // namespace slc
