#include "slc/certify.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "slc/calculus.hpp"

namespace slc {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::certified:
            return "certified";
        case Verdict::refuted_on_window:
            return "refuted_on_window";
        case Verdict::undetermined_tail:
            return "undetermined_tail";
    }
    return "?";
}

SlcCertificate certify_slc_1d(const ContinuousModel& model, int grid_points,
                              const QuadratureSpec& spec) {
    if (model.dim() != 1) throw DomainError("certify_slc_1d: 1D models only");
    if (grid_points < 8) throw DomainError("certify_slc_1d: grid too small");
    auto [a, b] = model.window1(spec.energy_budget);
    // Keep a finite-difference stencil inside the domain for spline-backed
    // potentials.
    if (model.family() == Family::tabulated_logdensity) {
        const double scale = std::max({1.0, std::abs(a), std::abs(b)});
        const double margin = 3.0 * std::pow(kMachineEps, 0.25) * scale;
        a += margin;
        b -= margin;
    }

    const int n = grid_points;
    std::vector<double> xs(n), h(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = a + (b - a) * i / (n - 1);
        h[i] = model.d2potential1(xs[i]);
    }
    double m = kInfinity;
    double arg = xs[0];
    auto consider = [&](double x, double v) {
        if (v < m) {
            m = v;
            arg = x;
        }
    };
    for (int i = 0; i < n; ++i) consider(xs[i], h[i]);
    // Refine every interior local minimum of the grid profile.
    auto f = [&](double x) { return model.d2potential1(x); };
    for (int i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || h[i] <= h[i - 1];
        const bool right_ok = i == n - 1 || h[i] <= h[i + 1];
        if (!(left_ok && right_ok)) continue;
        const double lo = xs[std::max(0, i - 1)];
        const double hi = xs[std::min(n - 1, i + 1)];
        const double x = golden_section_min(f, lo, hi,
                                            1e-10 * std::max(1.0, std::abs(hi)));
        consider(x, f(x));
    }

    SlcCertificate cert;
    cert.discrete = false;
    cert.dim = 1;
    cert.margin = m;
    cert.arg_min = arg;
    cert.window_lo = a;
    cert.window_hi = b;
    if (m > cert.tol) {
        cert.verdict = Verdict::certified;
        cert.alpha_star = 1.0 / m;
    } else if (m < -cert.tol) {
        cert.verdict = Verdict::refuted_on_window;
        cert.note = "phi'' negative on window (not log-concave)";
    } else {
        cert.verdict = Verdict::undetermined_tail;
        cert.note = "inf phi'' approaches zero on window";
    }
    return cert;
}

SlcCertificate certify_slc_nd(const ContinuousModel& model,
                              const Eigen::MatrixXd& Sigma,
                              int grid_points_per_axis,
                              const QuadratureSpec& spec) {
    const int d = model.dim();
    if (Sigma.rows() != d || Sigma.cols() != d)
        throw DomainError("certify_slc_nd: Sigma dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
    if (llt.info() != Eigen::Success)
        throw DomainError("certify_slc_nd: Sigma is not positive definite");
    const Eigen::MatrixXd sigma_inv =
        llt.solve(Eigen::MatrixXd::Identity(d, d));

    auto [lo, hi] = model.window(spec.energy_budget);
    const int n = grid_points_per_axis;
    Eigen::VectorXd x(d);
    Eigen::VectorXd arg = Eigen::VectorXd::Zero(d);
    double margin = kInfinity;
    std::vector<int> idx(d, 0);
    const long total = static_cast<long>(std::pow(n, d));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    for (long c = 0; c < total; ++c) {
        long rem = c;
        for (int k = 0; k < d; ++k) {
            idx[k] = static_cast<int>(rem % n);
            rem /= n;
            x[k] = lo[k] + (hi[k] - lo[k]) * idx[k] / (n - 1);
        }
        es.compute(model.hessian(x) - sigma_inv, Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        if (lmin < margin) {
            margin = lmin;
            arg = x;
        }
    }

    SlcCertificate cert;
    cert.discrete = false;
    cert.dim = d;
    cert.margin = margin;
    cert.arg_min_point = arg;
    cert.sigma = Sigma;
    cert.window_lo = lo.minCoeff();
    cert.window_hi = hi.maxCoeff();
    cert.verdict = margin >= -cert.tol ? Verdict::certified
                                       : Verdict::refuted_on_window;
    return cert;
}

SlcCertificate certify_slc_discrete(const DiscretePmf& pmf,
                                    std::optional<double> candidate_alpha) {
    if (!pmf.strictly_positive())
        throw DomainError("certify_slc_discrete: pmf has a zero mass point");
    const auto& f = pmf.probs();
    const int K = pmf.truncation_index();
    if (K < 1) throw DomainError("certify_slc_discrete: support too small");

    SlcCertificate cert;
    cert.discrete = true;
    cert.support = pmf.kind();
    cert.window_lo = 0;
    cert.window_hi = K;

    const double head_ratio = f[1] / f[0];
    std::vector<double> diffs;
    diffs.reserve(std::max(0, K - 1));
    for (int n = 0; n + 2 <= K; ++n)
        diffs.push_back(f[n + 1] / f[n + 2] - f[n] / f[n + 1]);
    double min_diff = kInfinity;
    for (double diff : diffs) min_diff = std::min(min_diff, diff);
    // First index attaining the minimum (within rounding), so a constant
    // ratio-difference profile counts as an interior minimum.
    int arg = 0;
    for (std::size_t n = 0; n < diffs.size(); ++n)
        if (diffs[n] <= min_diff + 1e-9 * std::abs(min_diff) + 1e-300) {
            arg = static_cast<int>(n);
            break;
        }
    cert.arg_min = arg;

    if (K >= 2 && min_diff <= 1e-12) {
        cert.verdict = Verdict::refuted_on_window;
        cert.margin = min_diff;
        cert.note = "ratio difference non-positive: no finite alpha";
        return cert;
    }
    double alpha_star = head_ratio;
    if (K >= 2) alpha_star = std::max(alpha_star, 1.0 / min_diff);
    cert.alpha_star = alpha_star;
    cert.margin = K >= 2 ? min_diff : head_ratio;

    const bool edge_min = pmf.kind() == SupportKind::naturals &&
                          (K < 2 || arg == K - 2);
    if (candidate_alpha) {
        const double tol_alpha = cert.tol * std::max(1.0, alpha_star);
        if (*candidate_alpha >= alpha_star - tol_alpha)
            cert.verdict = edge_min ? Verdict::undetermined_tail
                                    : Verdict::certified;
        else
            cert.verdict = Verdict::refuted_on_window;
        cert.note = "candidate alpha = " + std::to_string(*candidate_alpha);
    } else {
        cert.verdict = edge_min ? Verdict::undetermined_tail : Verdict::certified;
    }
    if (edge_min && cert.verdict == Verdict::undetermined_tail)
        cert.note = "ratio-difference minimum at the truncation edge";
    return cert;
}

SlcCertificate certify_slc_binomial(const DiscretePmf& pmf,
                                    double candidate_alpha) {
    if (pmf.kind() != SupportKind::finite)
        throw DomainError("certify_slc_binomial: finite-support pmf required");
    if (!pmf.strictly_positive())
        throw DomainError("certify_slc_binomial: pmf has a zero mass point");
    const int N = pmf.truncation_index();
    const std::vector<double> u =
        score_u_discrete(pmf, candidate_alpha, pmf.mean(), DiscreteOp::nabla_N);

    double worst = -kInfinity;
    int arg = 0;
    double scale = 1.0;
    for (int n = 0; n < N; ++n) {
        scale = std::max({scale, std::abs(u[n]), std::abs(u[n + 1])});
        const double viol = u[n + 1] - u[n];
        if (viol > worst) {
            worst = viol;
            arg = n;
        }
    }

    SlcCertificate cert;
    cert.discrete = true;
    cert.support = SupportKind::finite;
    cert.window_lo = 0;
    cert.window_hi = N;
    cert.margin = -worst;
    cert.arg_min = arg;
    cert.alpha_star = candidate_alpha;
    const double tol = cert.tol * scale;
    cert.verdict = worst <= tol ? Verdict::certified : Verdict::refuted_on_window;
    if (cert.verdict == Verdict::refuted_on_window)
        cert.note = "score increases at n = " + std::to_string(arg);
    return cert;
}

bool check_alpha(const SlcCertificate& cert, double alpha) {
    if (cert.verdict != Verdict::certified || !cert.alpha_star) return false;
    return alpha >= *cert.alpha_star * (1.0 - 1e-9) -
                        cert.tol * std::max(1.0, *cert.alpha_star);
}

DominanceReport covariance_dominance(const Summary& summary,
                                     const Eigen::MatrixXd& Sigma,
                                     double tol) {
    const int d = static_cast<int>(Sigma.rows());
    if (summary.cov.rows() != d)
        throw DomainError("covariance_dominance: dimension mismatch");
    DominanceReport rep;
    const Eigen::MatrixXd diffm = Sigma - summary.cov;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diffm,
                                                      Eigen::EigenvaluesOnly);
    rep.lambda_min = es.eigenvalues().minCoeff();
    rep.diag_margins = diffm.diagonal();
    rep.tol = tol > 0 ? tol
                      : kEqualityTol * std::max(1.0, Sigma.cwiseAbs().maxCoeff());
    rep.equality = std::abs(rep.lambda_min) <= rep.tol &&
                   diffm.cwiseAbs().maxCoeff() <= rep.tol;
    return rep;
}

}  // namespace slc
