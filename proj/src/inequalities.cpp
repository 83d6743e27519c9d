#include "slc/inequalities.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace slc {

namespace {

double equality_scale(std::initializer_list<double> terms) {
    double s = 1.0;
    for (double t : terms) s = std::max(s, std::abs(t));
    return s;
}

void require_increasing_sequence(std::span<const double> v, const char* who) {
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
        if (!(v[k + 1] > v[k]))
            throw DomainError(std::string(who) +
                              ": v is not strictly increasing on the support");
}

// +1 nondecreasing/strictly increasing, -1 nonincreasing, 0 undeclared.
int monotone_direction(Monotonicity m) {
    switch (m) {
        case Monotonicity::nondecreasing:
        case Monotonicity::strictly_increasing:
            return 1;
        case Monotonicity::nonincreasing:
            return -1;
        case Monotonicity::none:
            return 0;
    }
    return 0;
}

void require_nondecreasing_sequence(std::span<const double> v, const char* who) {
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
        if (v[k + 1] - v[k] < -1e-12)
            throw DomainError(std::string(who) +
                              ": sequence violates its monotonicity declaration");
}

// Exact two-copy double sum: (1/2) sum_jk f_j f_k (u_j - u_k)(v_j - v_k).
double two_copy_cov(const DiscretePmf& pmf, std::span<const double> u,
                    std::span<const double> v) {
    const auto& f = pmf.probs();
    KahanSum acc;
    for (std::size_t j = 0; j < f.size(); ++j)
        for (std::size_t k = 0; k < f.size(); ++k)
            acc.add(0.5 * f[j] * f[k] * (u[j] - u[k]) * (v[j] - v[k]));
    return acc.value();
}

double discrete_weighted_abs_sum(const DiscretePmf& pmf,
                                 std::span<const double> v) {
    KahanSum acc;
    for (std::size_t k = 0; k < v.size(); ++k)
        acc.add(pmf.probs()[k] * std::abs(v[k]));
    return acc.value();
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Brascamp-Lieb / weighted Poincare
// ---------------------------------------------------------------------------

namespace {

// Var(g) for a 1D model, centered integrand for conditioning.
ValueWithError variance_of(const ContinuousModel& model,
                           const std::function<double(double)>& g,
                           const QuadratureSpec& spec) {
    const ValueWithError m = expectation(model, g, spec);
    const ValueWithError v2 = expectation(
        model, [&](double x) { double c = g(x) - m.value; return c * c; }, spec);
    return {v2.value, v2.error + 2.0 * m.error * std::sqrt(std::max(0.0, v2.value))};
}

// Var(sum_j p_j(x_j)) assembled from axis means and pairwise products.
ValueWithError variance_of(const ContinuousModel& model,
                           const MultiTestFunction& g,
                           const QuadratureSpec& spec) {
    const int d = model.dim();
    if (static_cast<int>(g.axis.size()) != d)
        throw DomainError("test function dimension mismatch");
    std::vector<ValueWithError> means(d);
    for (int i = 0; i < d; ++i)
        means[i] = expect_axis(model, i, [&](double x) { return g.axis[i](x); },
                               spec);
    KahanSum var;
    double err = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            auto ci = [&, i](double x) { return g.axis[i](x) - means[i].value; };
            auto cj = [&, j](double x) { return g.axis[j](x) - means[j].value; };
            const ValueWithError e = expect_pair(model, i, j, ci, cj, spec);
            var.add(e.value);
            err += e.error + means[i].error + means[j].error;
        }
    return {var.value(), err};
}

// E[grad g^T M grad g] for constant M.
ValueWithError dirichlet_form(const ContinuousModel& model,
                              const Eigen::MatrixXd& M,
                              const MultiTestFunction& g,
                              const QuadratureSpec& spec) {
    const int d = model.dim();
    KahanSum acc;
    double err = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (M(i, j) == 0.0) continue;
            const ValueWithError e = expect_pair(
                model, i, j, [&, i](double x) { return g.axis[i].deriv(x); },
                [&, j](double x) { return g.axis[j].deriv(x); }, spec);
            acc.add(M(i, j) * e.value);
            err += std::abs(M(i, j)) * e.error;
        }
    return {acc.value(), err};
}

}  // namespace

namespace {

// The weight (phi'')^{-1} requires strict log-concavity on the window; a
// vanishing Hessian makes the integrand non-integrable. Scanned up front so
// the failure is deterministic rather than node-placement luck.
void require_strictly_convex_1d(const ContinuousModel& m,
                                const QuadratureSpec& spec) {
    auto [a, b] = m.window1(spec.energy_budget);
    for (int i = 0; i <= 800; ++i) {
        const double x = a + (b - a) * i / 800;
        if (!(m.d2potential1(x) > 1e-12))
            throw DomainError(
                "brascamp_lieb_gap: phi'' singular on the window (model is "
                "not strictly log-concave)");
    }
}

}  // namespace

GapReport brascamp_lieb_gap(const ContinuousModel& model, const TestFunction& g,
                            const QuadratureSpec& spec, double equality_tol) {
    if (model.dim() != 1)
        throw DomainError("brascamp_lieb_gap: use the MultiTestFunction overload");
    require_strictly_convex_1d(model, spec);
    const ValueWithError lhs = expectation(
        model,
        [&](double x) {
            const double h = model.d2potential1(x);
            if (!(h > 0))
                throw DomainError(
                    "brascamp_lieb_gap: phi'' singular at a node (model is "
                    "not strictly log-concave)");
            const double dg = g.deriv(x);
            return dg * dg / h;
        },
        spec);
    const ValueWithError var = variance_of(
        model, [&](double x) { return g(x); }, spec);
    GapReport rep;
    rep.inequality = "brascamp_lieb";
    rep.gaps = {lhs.value - var.value};
    rep.error_bound = lhs.error + var.error;
    rep.equality = std::abs(rep.gap()) <=
                   equality_tol * equality_scale({lhs.value, var.value});
    rep.inputs = {{"test_fn", g.id()}};
    return rep;
}

GapReport brascamp_lieb_gap(const ContinuousModel& model,
                            const MultiTestFunction& g,
                            const QuadratureSpec& spec, double equality_tol) {
    const int d = model.dim();
    ValueWithError lhs;
    if (model.family() == Family::gaussian) {
        // (phi'')^{-1} is the constant Sigma.
        lhs = dirichlet_form(model, model.gauss_sigma(), g, spec);
    } else if (model.separable()) {
        // Diagonal Hessian: sum of per-axis E[p_i'^2 / p_i''].
        KahanSum acc;
        double err = 0.0;
        for (int i = 0; i < d; ++i) {
            const ContinuousModel axis = model.marginal(i);
            require_strictly_convex_1d(axis, spec);
            const ValueWithError e = expectation(
                axis,
                [&](double x) {
                    const double h = axis.d2potential1(x);
                    if (!(h > 0))
                        throw DomainError(
                            "brascamp_lieb_gap: phi'' singular at a node");
                    const double dg = g.axis[i].deriv(x);
                    return dg * dg / h;
                },
                spec);
            acc.add(e.value);
            err += e.error;
        }
        lhs = {acc.value(), err};
    } else {
        throw DomainError("brascamp_lieb_gap: unsupported multivariate family");
    }
    const ValueWithError var = variance_of(model, g, spec);
    GapReport rep;
    rep.inequality = "brascamp_lieb";
    rep.gaps = {lhs.value - var.value};
    rep.error_bound = lhs.error + var.error;
    rep.equality = std::abs(rep.gap()) <=
                   equality_tol * equality_scale({lhs.value, var.value});
    rep.inputs = {{"test_fn", g.id}};
    return rep;
}

GapReport weighted_poincare_gap(const ContinuousModel& model, double alpha,
                                const TestFunction& g,
                                const QuadratureSpec& spec,
                                double equality_tol) {
    if (model.dim() != 1)
        throw DomainError("weighted_poincare_gap: 1D overload");
    if (!(alpha > 0)) throw DomainError("weighted_poincare_gap: alpha > 0");
    const ValueWithError dir = expectation(
        model, [&](double x) { const double d1 = g.deriv(x); return d1 * d1; },
        spec);
    const ValueWithError var = variance_of(
        model, [&](double x) { return g(x); }, spec);
    GapReport rep;
    rep.inequality = "weighted_poincare";
    rep.gaps = {alpha * dir.value - var.value};
    rep.error_bound = alpha * dir.error + var.error;
    rep.equality = std::abs(rep.gap()) <=
                   equality_tol * equality_scale({alpha * dir.value, var.value});
    rep.inputs = {{"alpha", alpha}, {"test_fn", g.id()}};
    return rep;
}

GapReport weighted_poincare_gap(const ContinuousModel& model,
                                const Eigen::MatrixXd& Sigma,
                                const MultiTestFunction& g,
                                const QuadratureSpec& spec,
                                double equality_tol) {
    Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
    if (llt.info() != Eigen::Success)
        throw DomainError("weighted_poincare_gap: Sigma is not positive definite");
    const ValueWithError dir = dirichlet_form(model, Sigma, g, spec);
    const ValueWithError var = variance_of(model, g, spec);
    GapReport rep;
    rep.inequality = "weighted_poincare";
    rep.gaps = {dir.value - var.value};
    rep.error_bound = dir.error + var.error;
    rep.equality = std::abs(rep.gap()) <=
                   equality_tol * equality_scale({dir.value, var.value});
    rep.inputs = {{"test_fn", g.id}};
    return rep;
}

// ---------------------------------------------------------------------------
// Chebyshev ("the other one") covariance
// ---------------------------------------------------------------------------

GapReport chebyshev_cov(const DiscretePmf& pmf, std::span<const double> u,
                        std::span<const double> v, Monotonicity u_decl,
                        Monotonicity v_decl, double equality_tol) {
    if (u.size() != pmf.probs().size() || v.size() != pmf.probs().size())
        throw DomainError("chebyshev_cov: sequence length must match support");
    const int du = monotone_direction(u_decl), dv = monotone_direction(v_decl);
    if (du == 0 || dv == 0 || du != dv)
        throw DomainError("chebyshev_cov: mismatched monotonicity declarations");
    // Non-increasing pairs are negated (the covariance is invariant).
    std::vector<double> uu(u.begin(), u.end()), vv(v.begin(), v.end());
    if (du < 0)
        for (std::size_t k = 0; k < uu.size(); ++k) {
            uu[k] = -uu[k];
            vv[k] = -vv[k];
        }
    require_nondecreasing_sequence(uu, "chebyshev_cov(u)");
    require_nondecreasing_sequence(vv, "chebyshev_cov(v)");

    const double eu = expectation(pmf, uu);
    const double ev = expectation(pmf, vv);
    KahanSum cov;
    for (std::size_t k = 0; k < uu.size(); ++k)
        cov.add(pmf.probs()[k] * (uu[k] - eu) * (vv[k] - ev));
    const double direct = cov.value();
    const double twocopy = two_copy_cov(pmf, uu, vv);

    GapReport rep;
    rep.inequality = "chebyshev";
    rep.gaps = {direct};
    rep.cross_check = twocopy;
    rep.error_bound = pmf.tail_bound() * (max_abs(uu) * max_abs(vv) + 1.0) +
                      1e-14 * (1.0 + std::abs(direct)) +
                      std::abs(direct - twocopy);
    rep.equality =
        std::abs(direct) <= equality_tol * equality_scale({eu * ev, direct});
    rep.inputs = {{"support", static_cast<int>(uu.size()) - 1}};
    return rep;
}

GapReport chebyshev_cov(const ContinuousModel& model, const TestFunction& u,
                        const TestFunction& v, const QuadratureSpec& spec,
                        std::size_t pair_samples, std::uint64_t seed,
                        double equality_tol) {
    if (model.dim() != 1) throw DomainError("chebyshev_cov: 1D models only");
    const int du = monotone_direction(u.monotone());
    const int dv = monotone_direction(v.monotone());
    if (du == 0 || dv == 0 || du != dv)
        throw DomainError("chebyshev_cov: mismatched monotonicity declarations");

    const ValueWithError eu = expectation(model, [&](double x) { return u(x); }, spec);
    const ValueWithError ev = expectation(model, [&](double x) { return v(x); }, spec);
    const ValueWithError cov = expectation(
        model,
        [&](double x) { return (u(x) - eu.value) * (v(x) - ev.value); }, spec);

    // Paired-sample two-copy estimate (the proof identity, Monte Carlo form).
    std::optional<double> twocopy;
    if (pair_samples > 0) {
        const std::vector<double> xs = sample(model, 2 * pair_samples, seed, spec);
        KahanSum acc;
        for (std::size_t i = 0; i < pair_samples; ++i) {
            const double x1 = xs[2 * i], x2 = xs[2 * i + 1];
            acc.add(0.5 * (u(x1) - u(x2)) * (v(x1) - v(x2)));
        }
        twocopy = acc.value() / static_cast<double>(pair_samples);
    }

    GapReport rep;
    rep.inequality = "chebyshev";
    rep.gaps = {cov.value};
    rep.cross_check = twocopy;
    rep.error_bound = cov.error + eu.error * std::abs(ev.value) +
                      ev.error * std::abs(eu.value);
    rep.equality = std::abs(cov.value) <=
                   equality_tol * equality_scale({eu.value * ev.value, cov.value});
    rep.inputs = {{"u", u.id()}, {"v", v.id()}, {"pair_samples", pair_samples}};
    return rep;
}

// ---------------------------------------------------------------------------
// Stein gaps
// ---------------------------------------------------------------------------

GapReport stein_gap_gaussian(const ContinuousModel& model, double alpha,
                             const TestFunction& v, const QuadratureSpec& spec,
                             double equality_tol) {
    if (model.dim() != 1) throw DomainError("stein_gap_gaussian: 1D models only");
    if (!(alpha > 0)) throw DomainError("stein_gap_gaussian: alpha must be > 0");
    auto [a, b] = model.window1(spec.energy_budget);
    v.require_strictly_increasing(a, b);

    const ValueWithError mean = expectation(model, [](double x) { return x; }, spec);
    const double mu = mean.value;
    const ValueWithError edv = expectation(
        model, [&](double x) { return v.deriv(x); }, spec);
    const ValueWithError exv = expectation(
        model, [&](double x) { return (x - mu) * v(x); }, spec);
    const ValueWithError ev = expectation(model, [&](double x) { return v(x); }, spec);

    const double t1 = alpha * edv.value;
    const double gap = t1 - exv.value;

    // Second route through the score: gap = -alpha Cov(u(X), v(X)).
    auto u = score_u_continuous(model, alpha, mu);
    const ValueWithError euv = expectation(
        model, [&](double x) { return u(x) * (v(x) - ev.value); }, spec);
    const double cross = -alpha * euv.value;

    GapReport rep;
    rep.inequality = "stein_gaussian";
    rep.gaps = {gap};
    rep.cross_check = cross;
    rep.error_bound = alpha * edv.error + exv.error +
                      mean.error * std::abs(ev.value);
    rep.equality = std::abs(gap) <=
                   equality_tol * equality_scale({t1, exv.value, alpha});
    rep.inputs = {{"alpha", alpha}, {"test_fn", v.id()}, {"mu", mu}};
    return rep;
}

namespace {

GapReport stein_gap_discrete_impl(const DiscretePmf& pmf, double alpha,
                                  std::span<const double> v, bool binomial_ops,
                                  double equality_tol) {
    const char* who = binomial_ops ? "stein_gap_binomial" : "stein_gap_poisson";
    if (!(alpha > 0)) throw DomainError(std::string(who) + ": alpha must be > 0");
    if (v.size() != pmf.probs().size())
        throw DomainError(std::string(who) + ": sequence length must match support");
    if (!pmf.strictly_positive())
        throw DomainError(std::string(who) + ": pmf has a zero mass point");
    require_increasing_sequence(v, who);

    const int K = pmf.truncation_index();
    const double mu = pmf.mean();
    const std::vector<double> dv =
        binomial_ops ? nabla_N_star(v, K) : nabla_star(v);

    KahanSum t1s, t2s;
    for (int k = 0; k <= K; ++k) {
        t1s.add(pmf.probs()[k] * dv[k]);
        t2s.add(pmf.probs()[k] * (static_cast<double>(k) - mu) * v[k]);
    }
    const double t1 = alpha * t1s.value();
    const double t2 = t2s.value();
    const double gap = t1 - t2;

    const std::vector<double> u = score_u_discrete(
        pmf, alpha, mu, binomial_ops ? DiscreteOp::nabla_N : DiscreteOp::nabla);
    const double cross = -alpha * two_copy_cov(pmf, u, v);

    const double vmax = max_abs(v);
    GapReport rep;
    rep.inequality = binomial_ops ? "stein_binomial" : "stein_poisson";
    rep.gaps = {gap};
    rep.cross_check = cross;
    rep.error_bound =
        pmf.tail_bound() * (2.0 * alpha * vmax + (K + std::abs(mu)) * vmax) +
        2e-15 * (std::abs(t1) + std::abs(t2) +
                 alpha * discrete_weighted_abs_sum(pmf, dv) +
                 (K + std::abs(mu)) * discrete_weighted_abs_sum(pmf, v)) +
        1e-18;
    rep.equality =
        std::abs(gap) <= equality_tol * equality_scale({t1, t2, alpha});
    rep.inputs = {{"alpha", alpha}, {"mu", mu}, {"support", K}};
    return rep;
}

}  // namespace

GapReport stein_gap_poisson(const DiscretePmf& pmf, double alpha,
                            std::span<const double> v, double equality_tol) {
    return stein_gap_discrete_impl(pmf, alpha, v, false, equality_tol);
}

GapReport stein_gap_binomial(const DiscretePmf& pmf, double alpha,
                             std::span<const double> v, double equality_tol) {
    if (pmf.kind() != SupportKind::finite)
        throw DomainError("stein_gap_binomial: finite-support pmf required");
    return stein_gap_discrete_impl(pmf, alpha, v, true, equality_tol);
}

// ---------------------------------------------------------------------------
// Moment chain
// ---------------------------------------------------------------------------

namespace {

GapReport moment_chain_impl(const Summary& s, double alpha, int r_max,
                            double tail, double equality_tol, bool discrete) {
    GapReport rep;
    rep.inequality = "moment_chain";
    rep.non_theorem = discrete;
    double err = 0.0;
    std::vector<double> chain, closed;
    double closed_bound = 1.0;  // (2r)!/r! (alpha/2)^r built incrementally
    for (int r = 1; r <= r_max; ++r) {
        const double m2r = s.central_moments[2 * r - 2];
        const double e2r = s.moment_err[2 * r - 2];
        const double m_prev = r == 1 ? 1.0 : s.central_moments[2 * r - 4];
        const double e_prev = r == 1 ? 0.0 : s.moment_err[2 * r - 4];
        chain.push_back(alpha * (2 * r - 1) * m_prev - m2r);
        closed_bound *= alpha * (2 * r - 1);  // (2r)!/r! (a/2)^r = prod a(2j-1)
        closed.push_back(closed_bound - m2r);
        err = std::max(err, alpha * (2 * r - 1) * e_prev + e2r + tail);
    }
    rep.gaps = chain;
    rep.gaps.insert(rep.gaps.end(), closed.begin(), closed.end());
    rep.error_bound = err;
    rep.equality = std::abs(chain[0]) <=
                   equality_tol * equality_scale({alpha, s.central_moments[0]});
    rep.inputs = {{"alpha", alpha}, {"r_max", r_max}};
    if (discrete)
        rep.diagnostic =
            "moment chain on a discrete pmf is exploratory (continuous-case "
            "statement)";
    return rep;
}

}  // namespace

GapReport moment_chain(const ContinuousModel& model, double alpha, int r_max,
                       const QuadratureSpec& spec, double equality_tol) {
    if (model.dim() != 1) throw DomainError("moment_chain: 1D models only");
    if (r_max < 1 || r_max > 6)
        throw DomainError("moment_chain: r_max must be in [1, 6]");
    const Summary s = summarize(model, 2 * r_max, spec);
    return moment_chain_impl(s, alpha, r_max, 0.0, equality_tol, false);
}

GapReport moment_chain(const DiscretePmf& pmf, double alpha, int r_max,
                       double equality_tol) {
    if (r_max < 1 || r_max > 6)
        throw DomainError("moment_chain: r_max must be in [1, 6]");
    const Summary s = summarize(pmf, 2 * r_max);
    return moment_chain_impl(s, alpha, r_max, pmf.tail_bound(), equality_tol,
                             true);
}

// ---------------------------------------------------------------------------
// U(X, Sigma) dictionary estimate
// ---------------------------------------------------------------------------

namespace {

GapReport u_ratio_from_grams(Eigen::MatrixXd A, Eigen::MatrixXd B,
                             double entry_err, double equality_tol,
                             const std::vector<std::string>& ids) {
    const int n = static_cast<int>(A.rows());
    const double tau = 1e-12 * B.trace() / n;
    B.diagonal().array() += tau;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(B,
                                                         Eigen::EigenvaluesOnly);
    if (!(check.eigenvalues().minCoeff() > 0))
        throw NumericsError("u_ratio_estimate: Gram matrix numerically singular");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, B);
    if (ges.info() != Eigen::Success)
        throw NumericsError("u_ratio_estimate: Gram matrix numerically singular");
    const Eigen::VectorXd evals = ges.eigenvalues();
    if (!evals.allFinite())
        throw NumericsError("u_ratio_estimate: Gram matrix numerically singular");
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (evals[i] > evals[best]) best = i;
    const double u_hat = evals[best];
    const Eigen::VectorXd c = ges.eigenvectors().col(best);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esb(B, Eigen::EigenvaluesOnly);
    const double bmin = std::max(esb.eigenvalues().minCoeff(), tau);

    GapReport rep;
    rep.inequality = "u_ratio";
    rep.gaps = {u_hat};
    rep.error_bound = entry_err * (1.0 + std::abs(u_hat)) * n / bmin;
    rep.equality = std::abs(u_hat - 1.0) <= equality_tol * 10.0;
    nlohmann::json coeff = nlohmann::json::array();
    for (int i = 0; i < n; ++i) coeff.push_back(c[i]);
    rep.inputs = {{"dictionary", ids}, {"maximizer", coeff}};
    return rep;
}

}  // namespace

GapReport u_ratio_estimate(const ContinuousModel& model, double sigma,
                           const std::vector<TestFunction>& dictionary,
                           const QuadratureSpec& spec, double equality_tol) {
    if (model.dim() != 1) throw DomainError("u_ratio_estimate: 1D overload");
    if (dictionary.empty()) throw DomainError("u_ratio_estimate: empty dictionary");
    if (!(sigma > 0)) throw DomainError("u_ratio_estimate: sigma must be > 0");
    const int n = static_cast<int>(dictionary.size());
    std::vector<ValueWithError> means(n);
    for (int i = 0; i < n; ++i)
        means[i] = expectation(model, [&](double x) { return dictionary[i](x); },
                               spec);
    Eigen::MatrixXd A(n, n), B(n, n);
    double entry_err = 0.0;
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back(dictionary[i].id());
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const ValueWithError cov = expectation(
                model,
                [&](double x) {
                    return (dictionary[i](x) - means[i].value) *
                           (dictionary[j](x) - means[j].value);
                },
                spec);
            const ValueWithError dir = expectation(
                model,
                [&](double x) {
                    return dictionary[i].deriv(x) * dictionary[j].deriv(x);
                },
                spec);
            A(i, j) = A(j, i) = cov.value;
            B(i, j) = B(j, i) = sigma * dir.value;
            entry_err = std::max(entry_err, cov.error + sigma * dir.error);
        }
    GapReport rep = u_ratio_from_grams(A, B, entry_err, equality_tol, ids);
    rep.inputs["sigma"] = sigma;
    return rep;
}

GapReport u_ratio_estimate(const ContinuousModel& model,
                           const Eigen::MatrixXd& Sigma,
                           const std::vector<MultiTestFunction>& dictionary,
                           const QuadratureSpec& spec, double equality_tol) {
    if (dictionary.empty()) throw DomainError("u_ratio_estimate: empty dictionary");
    const int n = static_cast<int>(dictionary.size());
    const int d = model.dim();
    for (const auto& g : dictionary)
        if (static_cast<int>(g.axis.size()) != d)
            throw DomainError("u_ratio_estimate: dictionary dimension mismatch");
    Eigen::MatrixXd A(n, n), B(n, n);
    double entry_err = 0.0;
    std::vector<std::string> ids;
    for (const auto& g : dictionary) ids.push_back(g.id);

    std::vector<std::vector<ValueWithError>> axis_means(
        n, std::vector<ValueWithError>(d));
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < d; ++a)
            axis_means[i][a] = expect_axis(
                model, a, [&](double x) { return dictionary[i].axis[a](x); },
                spec);

    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            KahanSum cov, dir;
            double err = 0.0;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) {
                    const ValueWithError cab = expect_pair(
                        model, a, b,
                        [&](double x) {
                            return dictionary[i].axis[a](x) -
                                   axis_means[i][a].value;
                        },
                        [&](double x) {
                            return dictionary[j].axis[b](x) -
                                   axis_means[j][b].value;
                        },
                        spec);
                    cov.add(cab.value);
                    err += cab.error;
                    if (Sigma(a, b) != 0.0) {
                        const ValueWithError dab = expect_pair(
                            model, a, b,
                            [&](double x) { return dictionary[i].axis[a].deriv(x); },
                            [&](double x) { return dictionary[j].axis[b].deriv(x); },
                            spec);
                        dir.add(Sigma(a, b) * dab.value);
                        err += std::abs(Sigma(a, b)) * dab.error;
                    }
                }
            A(i, j) = A(j, i) = cov.value();
            B(i, j) = B(j, i) = dir.value();
            entry_err = std::max(entry_err, err);
        }
    return u_ratio_from_grams(A, B, entry_err, equality_tol, ids);
}

// ---------------------------------------------------------------------------
// Characterization diagnostic
// ---------------------------------------------------------------------------

DiagnosticVerdict characterization_diagnostic(
    const SlcCertificate& cert, const std::vector<GapReport>& reports,
    const Eigen::VectorXd& mean, std::optional<int> N,
    const std::optional<DominanceReport>& dominance) {
    DiagnosticVerdict v;
    v.note = "numerical equality is evidence, not proof";
    if (cert.verdict != Verdict::certified) {
        v.kind = "no_equality_detected";
        v.note = "certificate verdict is " + to_string(cert.verdict);
        return v;
    }
    bool stein_equality = false;
    for (const GapReport& r : reports) {
        if (!r.equality) continue;
        if (r.inequality == "stein_gaussian" || r.inequality == "stein_poisson" ||
            r.inequality == "stein_binomial")
            stein_equality = true;
    }
    const bool dominance_equality =
        !cert.discrete && dominance && dominance->equality;
    if (!stein_equality && !dominance_equality) {
        v.kind = "no_equality_detected";
        return v;
    }
    const double alpha = cert.alpha_star.value_or(0.0);
    if (!cert.discrete) {
        v.kind = "consistent_with_gaussian";
        if (cert.dim == 1) {
            v.params = {{"mu", mean[0]},
                        {"sigma2", cert.sigma ? (*cert.sigma)(0, 0) : alpha}};
        } else {
            std::vector<double> mu(mean.data(), mean.data() + mean.size());
            v.params["mu"] = mu;
            if (cert.sigma) {
                std::vector<std::vector<double>> S(cert.dim,
                                                   std::vector<double>(cert.dim));
                for (int i = 0; i < cert.dim; ++i)
                    for (int j = 0; j < cert.dim; ++j) S[i][j] = (*cert.sigma)(i, j);
                v.params["Sigma"] = S;
            }
        }
    } else if (cert.support == SupportKind::finite) {
        v.kind = "consistent_with_binomial";
        const int nn = N.value_or(0);
        v.params = {{"N", nn}, {"q", nn > 0 ? alpha / nn : 0.0}};
    } else {
        v.kind = "consistent_with_poisson";
        v.params = {{"alpha", alpha}};
    }
    return v;
}

DiagnosticVerdict characterization_diagnostic(
    const SlcCertificate& cert, const std::vector<GapReport>& reports,
    double mu, std::optional<int> N,
    const std::optional<DominanceReport>& dominance) {
    Eigen::VectorXd m(1);
    m << mu;
    return characterization_diagnostic(cert, reports, m, N, dominance);
}

}  // namespace slc
