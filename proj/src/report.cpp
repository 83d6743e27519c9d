#include "slc/report.hpp"

#include <cmath>

namespace slc {

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

nlohmann::json mat_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

nlohmann::ordered_json to_json(const SlcCertificate& cert) {
    nlohmann::ordered_json j;
    j["verdict"] = to_string(cert.verdict);
    j["discrete"] = cert.discrete;
    j["dim"] = cert.dim;
    if (cert.alpha_star)
        j["alpha_star"] = *cert.alpha_star;
    else
        j["alpha_star"] = nullptr;
    j["margin"] = cert.margin;
    j["arg_min"] = cert.arg_min;
    if (cert.arg_min_point.size() > 0)
        j["arg_min_point"] = vec_to_json(cert.arg_min_point);
    j["window"] = {cert.window_lo, cert.window_hi};
    j["tol"] = cert.tol;
    if (cert.sigma) j["sigma"] = mat_to_json(*cert.sigma);
    if (!cert.note.empty()) j["note"] = cert.note;
    return j;
}

nlohmann::ordered_json to_json(const DominanceReport& rep) {
    nlohmann::ordered_json j;
    j["lambda_min"] = rep.lambda_min;
    j["diag_margins"] = vec_to_json(rep.diag_margins);
    j["equality"] = rep.equality;
    j["tol"] = rep.tol;
    return j;
}

nlohmann::ordered_json to_json(const GapReport& rep) {
    nlohmann::ordered_json j;
    j["inequality"] = rep.inequality;
    j["gap"] = rep.gap();
    if (rep.gaps.size() > 1) j["gaps"] = rep.gaps;
    j["error_bound"] = rep.error_bound;
    j["equality"] = rep.equality;
    j["inputs"] = rep.inputs;
    if (rep.cross_check) j["cross_check"] = *rep.cross_check;
    if (rep.non_theorem) j["non_theorem"] = true;
    if (!rep.diagnostic.empty()) j["diagnostic"] = rep.diagnostic;
    return j;
}

nlohmann::ordered_json to_json(const DiagnosticVerdict& v) {
    nlohmann::ordered_json j;
    j["kind"] = v.kind;
    j["params"] = v.params;
    j["note"] = v.note;
    return j;
}

namespace {

// Bounded strictly increasing sequence 2^k/(2^k + 1) on {0..K}. The dyadic
// form saturates to 1.0 in doubles past k = 52, so large supports fall back
// to k/(k+1).
std::vector<double> bounded_increasing_sequence(int K) {
    std::vector<double> v(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        if (K <= 50) {
            const double p = std::pow(2.0, k);
            v[k] = p / (p + 1.0);
        } else {
            v[k] = static_cast<double>(k) / (k + 1.0);
        }
    }
    return v;
}

RunOutcome diagnose_continuous(const ContinuousModel& m,
                               const DiagnoseOptions& opt) {
    RunOutcome out;
    if (m.dim() == 1) {
        out.certificate = certify_slc_1d(m, opt.grid, opt.spec);
        if (out.certificate.verdict != Verdict::certified) {
            out.diagnostic = characterization_diagnostic(out.certificate, {}, 0.0);
            return out;
        }
        const double alpha = *out.certificate.alpha_star;
        const double mu =
            expectation(m, [](double x) { return x; }, opt.spec).value;
        std::vector<TestFunction> vs;
        vs.push_back(TestFunction::centered_monomial(1, mu));
        vs.push_back(TestFunction::centered_monomial(3, mu));
        vs.push_back(TestFunction::poly({0.0, 1.0, 0.0, 0.1},
                                        Monotonicity::strictly_increasing));
        for (const TestFunction& v : vs)
            out.gaps.push_back(
                stein_gap_gaussian(m, alpha, v, opt.spec, opt.equality_tol));
        const TestFunction ident = TestFunction::poly({0.0, 1.0});
        out.gaps.push_back(
            brascamp_lieb_gap(m, ident, opt.spec, opt.equality_tol));
        out.gaps.push_back(
            weighted_poincare_gap(m, alpha, ident, opt.spec, opt.equality_tol));
        out.gaps.push_back(
            moment_chain(m, alpha, 3, opt.spec, opt.equality_tol));
        out.gaps.push_back(u_ratio_estimate(
            m, alpha,
            {TestFunction::poly({0.0, 1.0}), TestFunction::poly({0.0, 0.0, 1.0}),
             TestFunction::poly({0.0, 0.0, 0.0, 1.0})},
            opt.spec, opt.equality_tol));
        Eigen::MatrixXd sigma(1, 1);
        sigma << alpha;
        out.dominance =
            covariance_dominance(summarize(m, 2, opt.spec), sigma);
        out.diagnostic = characterization_diagnostic(
            out.certificate, out.gaps, mu, std::nullopt, out.dominance);
        return out;
    }
    // d > 1: verify a candidate Sigma (the model's own for gaussians).
    Eigen::MatrixXd sigma;
    if (opt.sigma)
        sigma = *opt.sigma;
    else if (m.family() == Family::gaussian)
        sigma = m.gauss_sigma();
    else
        throw ConfigError("diagnose: d > 1 requires a candidate Sigma");
    out.certificate = certify_slc_nd(m, sigma, 33, opt.spec);
    const Summary s = summarize(m, 2, opt.spec);
    out.dominance = covariance_dominance(s, sigma);
    for (int i = 0; i < m.dim(); ++i) {
        const MultiTestFunction gi = MultiTestFunction::coordinate(i, m.dim());
        out.gaps.push_back(
            weighted_poincare_gap(m, sigma, gi, opt.spec, opt.equality_tol));
        out.gaps.push_back(brascamp_lieb_gap(m, gi, opt.spec, opt.equality_tol));
    }
    std::vector<MultiTestFunction> dict;
    for (int i = 0; i < m.dim(); ++i)
        dict.push_back(MultiTestFunction::coordinate(i, m.dim()));
    out.gaps.push_back(
        u_ratio_estimate(m, sigma, dict, opt.spec, opt.equality_tol));
    out.diagnostic = characterization_diagnostic(
        out.certificate, out.gaps, s.mean, std::nullopt, out.dominance);
    return out;
}

RunOutcome diagnose_discrete(const DiscretePmf& pmf,
                             const DiagnoseOptions& opt) {
    RunOutcome out;
    const int K = pmf.truncation_index();
    const double mu = pmf.mean();
    if (pmf.kind() == SupportKind::finite) {
        const double alpha = opt.alpha.value_or(mu);
        out.certificate = certify_slc_binomial(pmf, alpha);
        if (out.certificate.verdict == Verdict::certified) {
            std::vector<std::vector<double>> vs;
            vs.push_back(TestFunction::centered_monomial(1, mu).values_on_support(K));
            std::vector<double> sq(K + 1);
            for (int k = 0; k <= K; ++k) sq[k] = double(k) * k;
            vs.push_back(sq);
            vs.push_back(bounded_increasing_sequence(K));
            for (const auto& v : vs)
                out.gaps.push_back(
                    stein_gap_binomial(pmf, alpha, v, opt.equality_tol));
            out.gaps.push_back(moment_chain(pmf, alpha, 2, opt.equality_tol));
        }
        out.diagnostic = characterization_diagnostic(out.certificate, out.gaps,
                                                     mu, K);
        return out;
    }
    out.certificate = certify_slc_discrete(pmf, opt.alpha);
    if (out.certificate.verdict == Verdict::certified) {
        const double alpha = opt.alpha.value_or(*out.certificate.alpha_star);
        std::vector<std::vector<double>> vs;
        std::vector<double> lin(K + 1), sq(K + 1);
        for (int k = 0; k <= K; ++k) {
            lin[k] = k;
            sq[k] = double(k) * k;
        }
        vs.push_back(lin);
        vs.push_back(sq);
        vs.push_back(bounded_increasing_sequence(K));
        for (const auto& v : vs)
            out.gaps.push_back(stein_gap_poisson(pmf, alpha, v, opt.equality_tol));
        out.gaps.push_back(chebyshev_cov(pmf, lin, lin,
                                         Monotonicity::nondecreasing,
                                         Monotonicity::nondecreasing,
                                         opt.equality_tol));
        out.gaps.push_back(moment_chain(pmf, alpha, 2, opt.equality_tol));
    }
    out.diagnostic = characterization_diagnostic(out.certificate, out.gaps, mu);
    return out;
}

}  // namespace

RunOutcome diagnose_model(const Model& model, const DiagnoseOptions& opt) {
    if (std::holds_alternative<ContinuousModel>(model))
        return diagnose_continuous(std::get<ContinuousModel>(model), opt);
    return diagnose_discrete(std::get<DiscretePmf>(model), opt);
}

nlohmann::ordered_json run_report(const nlohmann::json& input_echo,
                                  const RunOutcome& outcome, double wall_ms) {
    nlohmann::ordered_json j;
    j["version"] = kToolVersion;
    j["input"] = input_echo;
    j["certificate"] = to_json(outcome.certificate);
    if (outcome.dominance) j["dominance"] = to_json(*outcome.dominance);
    nlohmann::ordered_json gaps = nlohmann::ordered_json::array();
    for (const GapReport& g : outcome.gaps) gaps.push_back(to_json(g));
    j["gaps"] = gaps;
    j["diagnostic"] = to_json(outcome.diagnostic);
    j["wall_ms"] = wall_ms;
    return j;
}

}  // namespace slc
