#include "slc/corpus.hpp"

#include <cmath>
#include <random>

#include "slc/common.hpp"

namespace slc {

namespace {

// Uniform deviates derived from raw mt19937_64 output; std distributions are
// implementation-defined and would break the determinism contract.
double u01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double a, double b) {
    return a + (b - a) * u01(rng);
}

// Axis potential x^2/(2s) + tilt*x + sum of nonnegative even terms.
std::vector<double> random_axis_coeffs(std::mt19937_64& rng, double s,
                                       bool with_tilt) {
    std::vector<double> c(7, 0.0);
    c[1] = with_tilt ? uniform(rng, -0.5, 0.5) : 0.0;
    c[2] = 1.0 / (2.0 * s);
    if (u01(rng) < 0.8) c[4] = uniform(rng, 0.0, 1.0);
    if (u01(rng) < 0.4) c[6] = uniform(rng, 0.0, 0.2);
    while (c.size() > 3 && c.back() == 0.0) c.pop_back();
    return c;
}

CorpusEntry make_continuous_1d(std::mt19937_64& rng) {
    const double s = uniform(rng, 0.3, 3.0);
    CorpusEntry e;
    e.kind = "continuous_1d";
    e.alpha_bound = s;
    e.model_config = {{"family", "poly_potential"},
                      {"coeffs", random_axis_coeffs(rng, s, true)}};
    return e;
}

CorpusEntry make_continuous_nd(std::mt19937_64& rng, int d) {
    CorpusEntry e;
    e.kind = "continuous_nd";
    std::vector<std::vector<double>> axes;
    for (int j = 0; j < d; ++j) {
        const double s = uniform(rng, 0.3, 2.0);
        e.sigma_diag.push_back(s);
        axes.push_back(random_axis_coeffs(rng, s, true));
    }
    e.model_config = {{"family", "poly_potential"}, {"coeffs", axes}};
    return e;
}

CorpusEntry make_discrete(std::mt19937_64& rng) {
    const double lambda = uniform(rng, 0.5, 6.0);
    const double a = u01(rng) < 0.3 ? 0.0 : uniform(rng, 0.0, 0.05);
    const double b = uniform(rng, -0.3, 0.3);
    // Truncate against the dominating Poisson(lambda e^{-b}) tail; run the
    // terms far below the mass scale so boundary leakage stays orders under
    // the 1e-12 oracle-equivalence tolerance.
    const double lam_dom = lambda * std::exp(std::max(0.0, -b));
    std::vector<double> base;
    base.push_back(std::exp(-lam_dom));
    KahanSum sum;
    sum.add(base[0]);
    while (1.0 - sum.value() >= 1e-14 || base.back() > 1e-20) {
        base.push_back(base.back() * lam_dom / static_cast<double>(base.size()));
        sum.add(base.back());
    }
    const int K = static_cast<int>(base.size()) - 1;
    std::vector<double> probs(K + 1);
    double logterm = 0.0;  // log of lambda^k / k!
    for (int k = 0; k <= K; ++k) {
        if (k > 0) logterm += std::log(lambda) - std::log(k);
        probs[k] = std::exp(logterm - a * k * k - b * k);
    }
    CorpusEntry e;
    e.kind = "discrete";
    e.alpha_bound = lambda * std::exp(-a - b);
    e.model_config = {{"family", "tabulated_pmf"},
                      {"probs", probs},
                      {"tail_eps", 1e-14}};
    return e;
}

}  // namespace

nlohmann::json CorpusEntry::to_json() const {
    nlohmann::json j{{"kind", kind}, {"model", model_config}};
    if (kind == "continuous_nd")
        j["sigma_diag"] = sigma_diag;
    else
        j["alpha_bound"] = alpha_bound;
    return j;
}

std::vector<CorpusEntry> gen_corpus(std::uint64_t seed, int count) {
    if (count < 1) throw ConfigError("gen_corpus: count must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<CorpusEntry> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        switch (i % 10) {
            case 0:
            case 1:
            case 2:
            case 3:
                out.push_back(make_continuous_1d(rng));
                break;
            case 4:
            case 5:
                out.push_back(make_continuous_nd(rng, 2));
                break;
            case 6:
                out.push_back(make_continuous_nd(rng, 3));
                break;
            default:
                out.push_back(make_discrete(rng));
                break;
        }
    }
    return out;
}

}  // namespace slc
