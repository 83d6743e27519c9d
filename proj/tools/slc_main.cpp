// slc: certify strong log-concavity, evaluate inequality gaps, and flag
// equality cases for continuous densities and discrete pmfs.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "slc/corpus.hpp"
#include "slc/report.hpp"

namespace {

using nlohmann::json;
using namespace slc;

constexpr int kExitOk = 0;
constexpr int kExitRefuted = 2;
constexpr int kExitUndetermined = 3;
constexpr int kExitUsage = 64;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

Eigen::MatrixXd load_sigma(const std::string& path) {
    const json j = load_json_file(path);
    if (j.is_number()) {
        Eigen::MatrixXd m(1, 1);
        m << j.get<double>();
        return m;
    }
    const auto rows = j.get<std::vector<std::vector<double>>>();
    const int d = static_cast<int>(rows.size());
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(rows[i].size()) != d)
            throw ConfigError("--sigma: matrix must be square");
        for (int k = 0; k < d; ++k) m(i, k) = rows[i][k];
    }
    return m;
}

template <class J>
void emit(const J& doc, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw ConfigError("cannot write file: " + out_path);
        out << doc.dump(2) << "\n";
    }
}

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::certified:
            return kExitOk;
        case Verdict::refuted_on_window:
            return kExitRefuted;
        case Verdict::undetermined_tail:
            return kExitUndetermined;
    }
    return kExitOk;
}

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    QuadratureSpec spec;
    double equality_tol = kEqualityTol;
    std::optional<double> alpha;
    std::string sigma_path;
    int grid = 2001;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_config = true) {
    if (with_config)
        cmd->add_option("config", o.config_path, "model config JSON file")
            ->required();
    cmd->add_option("--out", o.out_path, "write the report here (default stdout)");
    cmd->add_option("--rtol", o.spec.rtol, "quadrature relative tolerance");
    cmd->add_option("--atol", o.spec.atol, "quadrature absolute tolerance");
    cmd->add_option("--energy-budget", o.spec.energy_budget,
                    "truncation energy budget (nats)");
    cmd->add_option("--max-subdiv", o.spec.max_subdiv,
                    "max quadrature subdivisions");
    cmd->add_option("--equality-tol", o.equality_tol,
                    "equality detection threshold (relative)");
}

double alpha_for(const Model& model, const CommonOpts& o,
                 const QuadratureSpec& spec) {
    if (o.alpha) return *o.alpha;
    if (std::holds_alternative<DiscretePmf>(model)) {
        const DiscretePmf& pmf = std::get<DiscretePmf>(model);
        if (pmf.kind() == SupportKind::finite) return pmf.mean();
        const SlcCertificate c = certify_slc_discrete(pmf);
        if (!c.alpha_star)
            throw ConfigError("model is not certifiably SLC; pass --alpha");
        return *c.alpha_star;
    }
    const SlcCertificate c =
        certify_slc_1d(std::get<ContinuousModel>(model), o.grid, spec);
    if (c.verdict != Verdict::certified)
        throw ConfigError("model is not certifiably SLC; pass --alpha");
    return *c.alpha_star;
}

int run_certify(const CommonOpts& o) {
    const Model model = parse_config(load_json_file(o.config_path));
    SlcCertificate cert;
    if (std::holds_alternative<DiscretePmf>(model)) {
        const DiscretePmf& pmf = std::get<DiscretePmf>(model);
        if (pmf.kind() == SupportKind::finite && o.alpha)
            cert = certify_slc_binomial(pmf, *o.alpha);
        else
            cert = certify_slc_discrete(pmf, o.alpha);
    } else {
        const ContinuousModel& m = std::get<ContinuousModel>(model);
        if (m.dim() == 1) {
            cert = certify_slc_1d(m, o.grid, o.spec);
            if (o.alpha && cert.verdict == Verdict::certified) {
                if (!check_alpha(cert, *o.alpha))
                    cert.verdict = Verdict::refuted_on_window;
                cert.note = "candidate alpha = " + std::to_string(*o.alpha);
            }
        } else {
            if (o.sigma_path.empty() && m.family() != Family::gaussian)
                throw ConfigError("certify: d > 1 requires --sigma FILE");
            const Eigen::MatrixXd sigma = o.sigma_path.empty()
                                              ? m.gauss_sigma()
                                              : load_sigma(o.sigma_path);
            cert = certify_slc_nd(m, sigma, 33, o.spec);
        }
    }
    emit(to_json(cert), o.out_path);
    return verdict_exit(cert.verdict);
}

int run_gap(const CommonOpts& o, const std::string& ineq,
            const std::string& test_fn, const std::string& test_fn_u,
            int rmax) {
    const Model model = parse_config(load_json_file(o.config_path));
    const TestFunction v =
        test_fn.empty()
            ? TestFunction::poly({0.0, 1.0}, Monotonicity::strictly_increasing)
            : TestFunction::from_json(json::parse(test_fn));
    std::vector<GapReport> reports;

    if (std::holds_alternative<ContinuousModel>(model)) {
        const ContinuousModel& m = std::get<ContinuousModel>(model);
        if (m.dim() != 1)
            throw ConfigError("gap: use coordinate dictionaries via u-estimate for d > 1");
        if (ineq == "brascamp_lieb") {
            reports.push_back(brascamp_lieb_gap(m, v, o.spec, o.equality_tol));
        } else if (ineq == "weighted_poincare") {
            reports.push_back(weighted_poincare_gap(m, alpha_for(model, o, o.spec),
                                                    v, o.spec, o.equality_tol));
        } else if (ineq == "stein_gaussian") {
            reports.push_back(stein_gap_gaussian(m, alpha_for(model, o, o.spec),
                                                 v, o.spec, o.equality_tol));
        } else if (ineq == "chebyshev") {
            const TestFunction u =
                test_fn_u.empty()
                    ? TestFunction::poly({0.0, 1.0}, Monotonicity::strictly_increasing)
                    : TestFunction::from_json(json::parse(test_fn_u));
            reports.push_back(
                chebyshev_cov(m, u, v, o.spec, 100000, 20240901, o.equality_tol));
        } else if (ineq == "moment_chain") {
            reports.push_back(moment_chain(m, alpha_for(model, o, o.spec), rmax,
                                           o.spec, o.equality_tol));
        } else if (ineq == "u_ratio") {
            reports.push_back(u_ratio_estimate(
                m, alpha_for(model, o, o.spec),
                {TestFunction::poly({0.0, 1.0}),
                 TestFunction::poly({0.0, 0.0, 1.0}),
                 TestFunction::poly({0.0, 0.0, 0.0, 1.0})},
                o.spec, o.equality_tol));
        } else {
            throw ConfigError("gap: unsupported inequality for a continuous model: " +
                              ineq);
        }
    } else {
        const DiscretePmf& pmf = std::get<DiscretePmf>(model);
        const int K = pmf.truncation_index();
        const std::vector<double> vv = v.values_on_support(K);
        const double alpha = alpha_for(model, o, o.spec);
        if (ineq == "stein_poisson") {
            reports.push_back(stein_gap_poisson(pmf, alpha, vv, o.equality_tol));
        } else if (ineq == "stein_binomial") {
            reports.push_back(stein_gap_binomial(pmf, alpha, vv, o.equality_tol));
        } else if (ineq == "chebyshev") {
            const TestFunction u =
                test_fn_u.empty()
                    ? TestFunction::poly({0.0, 1.0}, Monotonicity::strictly_increasing)
                    : TestFunction::from_json(json::parse(test_fn_u));
            reports.push_back(chebyshev_cov(pmf, u.values_on_support(K), vv,
                                            u.monotone(), v.monotone(),
                                            o.equality_tol));
        } else if (ineq == "moment_chain") {
            reports.push_back(moment_chain(pmf, alpha, rmax, o.equality_tol));
        } else {
            throw ConfigError("gap: unsupported inequality for a discrete model: " +
                              ineq);
        }
    }

    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    bool violated = false;
    for (const GapReport& r : reports) {
        arr.push_back(to_json(r));
        for (double g : r.gaps)
            if (g < -r.error_bound) violated = true;
    }
    emit(arr, o.out_path);
    return violated ? kExitRefuted : kExitOk;
}

int run_u_estimate(const CommonOpts& o, const std::string& dict_spec) {
    const Model model = parse_config(load_json_file(o.config_path));
    if (!std::holds_alternative<ContinuousModel>(model))
        throw ConfigError("u-estimate: continuous models only");
    const ContinuousModel& m = std::get<ContinuousModel>(model);
    GapReport rep;
    if (m.dim() == 1) {
        int degree = 3;
        if (!dict_spec.empty()) {
            if (dict_spec.rfind("poly:", 0) != 0)
                throw ConfigError("--dict: expected poly:K");
            degree = std::stoi(dict_spec.substr(5));
        }
        if (degree < 1 || degree > 8) throw ConfigError("--dict: degree in [1,8]");
        std::vector<TestFunction> dict;
        for (int k = 1; k <= degree; ++k) {
            std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
            c[k] = 1.0;
            dict.push_back(TestFunction::poly(c));
        }
        const double sigma = o.sigma_path.empty() ? alpha_for(model, o, o.spec)
                                                  : load_sigma(o.sigma_path)(0, 0);
        rep = u_ratio_estimate(m, sigma, dict, o.spec, o.equality_tol);
    } else {
        const Eigen::MatrixXd sigma = o.sigma_path.empty()
                                          ? m.gauss_sigma()
                                          : load_sigma(o.sigma_path);
        std::vector<MultiTestFunction> dict;
        for (int i = 0; i < m.dim(); ++i)
            dict.push_back(MultiTestFunction::coordinate(i, m.dim()));
        rep = u_ratio_estimate(m, sigma, dict, o.spec, o.equality_tol);
    }
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    arr.push_back(to_json(rep));
    emit(arr, o.out_path);
    return kExitOk;
}

int run_sample(const CommonOpts& o, std::size_t n, std::uint64_t seed) {
    const Model model = parse_config(load_json_file(o.config_path));
    if (!std::holds_alternative<ContinuousModel>(model))
        throw ConfigError("sample: continuous 1D models only");
    const std::vector<double> xs =
        sample(std::get<ContinuousModel>(model), n, seed, o.spec);
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["n"] = n;
    j["samples"] = xs;
    emit(j, o.out_path);
    return kExitOk;
}

int run_diagnose(const CommonOpts& o, std::uint64_t seed) {
    const json input = load_json_file(o.config_path);
    const Model model = parse_config(input);
    DiagnoseOptions opt;
    opt.spec = o.spec;
    opt.grid = o.grid;
    opt.equality_tol = o.equality_tol;
    opt.alpha = o.alpha;
    opt.seed = seed;
    if (!o.sigma_path.empty()) opt.sigma = load_sigma(o.sigma_path);
    const auto t0 = std::chrono::steady_clock::now();
    const RunOutcome outcome = diagnose_model(model, opt);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  t0)
            .count();
    emit(run_report(input, outcome, wall_ms), o.out_path);
    return verdict_exit(outcome.certificate.verdict);
}

int run_gen_corpus(const CommonOpts& o, std::uint64_t seed, int count) {
    const std::vector<CorpusEntry> corpus = gen_corpus(seed, count);
    nlohmann::json arr = nlohmann::json::array();
    for (const CorpusEntry& e : corpus) arr.push_back(e.to_json());
    emit(arr, o.out_path);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strong log-concavity certification and inequality gaps"};
    app.require_subcommand(1);

    CommonOpts o_cert, o_gap, o_mom, o_uest, o_samp, o_diag, o_corp;
    std::string ineq, test_fn, test_fn_u, dict_spec;
    int rmax = 3, count = 1;
    std::size_t n_samples = 1;
    std::uint64_t seed = 20240901;

    double alpha_in = 0.0;
    CLI::App* c_cert = app.add_subcommand("certify", "certify strong log-concavity");
    add_common(c_cert, o_cert);
    CLI::Option* a_cert = c_cert->add_option("--alpha", alpha_in, "candidate alpha");
    c_cert->add_option("--sigma", o_cert.sigma_path, "candidate Sigma JSON file");
    c_cert->add_option("--grid", o_cert.grid, "grid points for the scan");

    CLI::App* c_gap = app.add_subcommand("gap", "evaluate one inequality gap");
    add_common(c_gap, o_gap);
    c_gap->add_option("--ineq", ineq, "inequality id")->required();
    CLI::Option* a_gap = c_gap->add_option("--alpha", alpha_in, "alpha parameter");
    c_gap->add_option("--sigma", o_gap.sigma_path, "Sigma JSON file");
    c_gap->add_option("--test-fn", test_fn, "test function JSON");
    c_gap->add_option("--test-fn-u", test_fn_u, "second test function JSON (chebyshev)");
    c_gap->add_option("--rmax", rmax, "moment chain depth");
    c_gap->add_option("--grid", o_gap.grid, "grid points for certification");

    CLI::App* c_mom = app.add_subcommand("moments", "moment chain gaps");
    add_common(c_mom, o_mom);
    CLI::Option* a_mom = c_mom->add_option("--alpha", alpha_in, "alpha parameter");
    c_mom->add_option("--rmax", rmax, "moment chain depth");

    CLI::App* c_uest = app.add_subcommand("u-estimate", "dictionary U(X,Sigma) estimate");
    add_common(c_uest, o_uest);
    c_uest->add_option("--sigma", o_uest.sigma_path, "Sigma JSON file");
    CLI::Option* a_uest = c_uest->add_option("--alpha", alpha_in, "alpha (1D Sigma)");
    c_uest->add_option("--dict", dict_spec, "dictionary spec, e.g. poly:3");

    CLI::App* c_samp = app.add_subcommand("sample", "inverse-CDF sampler");
    add_common(c_samp, o_samp);
    c_samp->add_option("--n", n_samples, "number of draws")->required();
    c_samp->add_option("--seed", seed, "RNG seed");

    CLI::App* c_diag = app.add_subcommand("diagnose",
                                          "certify + gap battery + diagnostic");
    add_common(c_diag, o_diag);
    CLI::Option* a_diag = c_diag->add_option("--alpha", alpha_in, "candidate alpha");
    c_diag->add_option("--sigma", o_diag.sigma_path, "candidate Sigma JSON file");
    c_diag->add_option("--grid", o_diag.grid, "grid points");
    c_diag->add_option("--seed", seed, "sampler seed");

    CLI::App* c_corp = app.add_subcommand("gen-corpus", "generate a model corpus");
    add_common(c_corp, o_corp, false);
    c_corp->add_option("--seed", seed, "corpus seed");
    c_corp->add_option("--count", count, "number of models")->required();

    try {
        app.parse(argc, argv);
        if (a_cert->count()) o_cert.alpha = alpha_in;
        if (a_gap->count()) o_gap.alpha = alpha_in;
        if (a_mom->count()) o_mom.alpha = alpha_in;
        if (a_uest->count()) o_uest.alpha = alpha_in;
        if (a_diag->count()) o_diag.alpha = alpha_in;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (c_cert->parsed()) return run_certify(o_cert);
        if (c_gap->parsed()) return run_gap(o_gap, ineq, test_fn, test_fn_u, rmax);
        if (c_mom->parsed())
            return run_gap(o_mom, "moment_chain", "", "", rmax);
        if (c_uest->parsed()) return run_u_estimate(o_uest, dict_spec);
        if (c_samp->parsed()) return run_sample(o_samp, n_samples, seed);
        if (c_diag->parsed()) return run_diagnose(o_diag, seed);
        if (c_corp->parsed()) return run_gen_corpus(o_corp, seed, count);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
