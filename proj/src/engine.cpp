#include "slc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace slc {

namespace {

// Relative tail mass left outside the energy window. Zero when the window
// coincides with the declared domain (nothing was cut).
double tail_fraction(const ContinuousModel& m, const QuadratureSpec& spec) {
    auto [wlo, whi] = m.window(spec.energy_budget);
    bool cut = false;
    for (int i = 0; i < m.dim(); ++i)
        if (wlo[i] > m.domain_lo()[i] || whi[i] < m.domain_hi()[i]) cut = true;
    return cut ? std::exp(-spec.energy_budget) : 0.0;
}

ValueWithError integrate_scaled_1d(const ContinuousModel& m,
                                   const std::function<double(double)>& g,
                                   const QuadratureSpec& spec) {
    auto [a, b] = m.window1(spec.energy_budget);
    const double shift = m.potential_min();
    auto integrand = [&](double x) {
        const double v = g(x) * std::exp(-(m.potential1(x) - shift));
        if (!std::isfinite(v))
            throw NumericsError("expectation: non-finite integrand value");
        return v;
    };
    return integrate(integrand, a, b, spec);
}

}  // namespace

ValueWithError normalize(const ContinuousModel& model,
                         const QuadratureSpec& spec) {
    if (auto z = model.cached_normalization(spec.rtol, spec.atol,
                                            spec.energy_budget))
        return *z;

    const double shift = model.potential_min();
    ValueWithError zs;
    if (model.dim() == 1) {
        zs = integrate_scaled_1d(model, [](double) { return 1.0; }, spec);
    } else if (model.separable()) {
        // phi is a sum over axes, so Z is the product of the marginal Zs.
        ValueWithError out{1.0, 0.0};
        for (int i = 0; i < model.dim(); ++i) {
            const ValueWithError zi = normalize(model.marginal(i), spec);
            out.error = out.error * zi.value + std::abs(out.value) * zi.error;
            out.value *= zi.value;
        }
        out.error += tail_fraction(model, spec) * std::abs(out.value);
        model.cache_normalization(out, spec.rtol, spec.atol, spec.energy_budget);
        return out;
    } else {
        auto [wlo, whi] = model.window(spec.energy_budget);
        auto integrand = [&](const Eigen::VectorXd& x) {
            return std::exp(-(model.potential(x) - shift));
        };
        zs = integrate_box(integrand, wlo, whi, spec);
    }
    ValueWithError out{zs.value * std::exp(-shift),
                       zs.error * std::exp(-shift)};
    out.error += tail_fraction(model, spec) * std::abs(out.value);
    model.cache_normalization(out, spec.rtol, spec.atol, spec.energy_budget);
    return out;
}

ValueWithError expectation(const ContinuousModel& model,
                           const std::function<double(double)>& g,
                           const QuadratureSpec& spec) {
    if (model.dim() != 1) throw DomainError("expectation: 1D models only");
    const ValueWithError num = integrate_scaled_1d(model, g, spec);
    const ValueWithError den = integrate_scaled_1d(
        model, [](double) { return 1.0; }, spec);
    const double e = num.value / den.value;
    double err = (num.error + std::abs(e) * den.error) / den.value;
    const double tail = tail_fraction(model, spec);
    if (tail > 0) {
        auto [a, b] = model.window1(spec.energy_budget);
        err += tail * (std::abs(g(a)) + std::abs(g(b)) + std::abs(e));
    }
    return {e, err};
}

ValueWithError expect_axis(const ContinuousModel& model, int i,
                           const std::function<double(double)>& g,
                           const QuadratureSpec& spec) {
    if (model.dim() == 1) {
        if (i != 0) throw DomainError("expect_axis: axis out of range");
        return expectation(model, g, spec);
    }
    return expectation(model.marginal(i), g, spec);
}

ValueWithError expect_pair(const ContinuousModel& model, int i, int j,
                           const std::function<double(double)>& gi,
                           const std::function<double(double)>& gj,
                           const QuadratureSpec& spec) {
    if (i == j)
        return expect_axis(model, i, [&](double x) { return gi(x) * gj(x); },
                           spec);
    if (model.separable()) {
        const ValueWithError a = expect_axis(model, i, gi, spec);
        const ValueWithError b = expect_axis(model, j, gj, spec);
        return {a.value * b.value, std::abs(a.value) * b.error +
                                       std::abs(b.value) * a.error +
                                       a.error * b.error};
    }
    if (model.family() != Family::gaussian)
        throw DomainError("expect_pair: unsupported non-separable family");
    const ContinuousModel pair = model.marginal_pair(i, j);
    auto [wlo, whi] = pair.window(spec.energy_budget);
    auto integrand = [&](const Eigen::VectorXd& x) {
        return gi(x[0]) * gj(x[1]) * std::exp(-pair.potential(x));
    };
    const ValueWithError num = integrate_box(integrand, wlo, whi, spec);
    const ValueWithError den = normalize(pair, spec);
    const double e = num.value / den.value;
    double err = (num.error + std::abs(e) * den.error) / den.value;
    err += tail_fraction(pair, spec) * std::abs(e);
    return {e, err};
}

double expectation(const DiscretePmf& pmf, std::span<const double> values) {
    if (values.size() != pmf.probs().size())
        throw DomainError("expectation: sequence length must match support");
    KahanSum s;
    for (std::size_t k = 0; k < values.size(); ++k)
        s.add(pmf.probs()[k] * values[k]);
    return s.value();
}

Summary summarize(const ContinuousModel& model, int max_moment,
                  const QuadratureSpec& spec) {
    if (max_moment < 2 || max_moment > 12 || max_moment % 2 != 0)
        throw DomainError("summarize: max_moment must be even, in [2, 12]");
    const int d = model.dim();
    Summary s;
    s.mean.resize(d);
    s.mean_err.resize(d);
    s.cov.resize(d, d);
    s.cov_err.resize(d, d);
    auto ident = [](double x) { return x; };
    for (int i = 0; i < d; ++i) {
        const ValueWithError m = expect_axis(model, i, ident, spec);
        s.mean[i] = m.value;
        s.mean_err[i] = m.error;
    }
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            const ValueWithError xij = expect_pair(model, i, j, ident, ident, spec);
            const double c = xij.value - s.mean[i] * s.mean[j];
            const double e = xij.error + std::abs(s.mean[i]) * s.mean_err[j] +
                             std::abs(s.mean[j]) * s.mean_err[i];
            s.cov(i, j) = s.cov(j, i) = c;
            s.cov_err(i, j) = s.cov_err(j, i) = e;
        }
    if (d == 1) {
        const double mu = s.mean[0];
        for (int r = 2; r <= max_moment; ++r) {
            const ValueWithError mr = expectation(
                model, [mu, r](double x) { return std::pow(x - mu, r); }, spec);
            s.central_moments.push_back(mr.value);
            // Mean-location uncertainty enters through r*M_{r-1}.
            const double prev =
                r == 2 ? 0.0 : std::abs(s.central_moments[r - 3]);
            s.moment_err.push_back(mr.error + r * prev * s.mean_err[0]);
        }
    }
    return s;
}

Summary summarize(const DiscretePmf& pmf, int max_moment) {
    if (max_moment < 2 || max_moment > 12 || max_moment % 2 != 0)
        throw DomainError("summarize: max_moment must be even, in [2, 12]");
    const auto& f = pmf.probs();
    const int K = pmf.truncation_index();
    KahanSum mean;
    for (int k = 0; k <= K; ++k) mean.add(f[k] * k);
    const double mu = mean.value();

    Summary s;
    s.mean = Eigen::VectorXd::Constant(1, mu);
    s.mean_err = Eigen::VectorXd::Constant(
        1, pmf.tail_bound() * (K + 1.0) + 1e-15 * (std::abs(mu) + 1.0) * K);
    for (int r = 2; r <= max_moment; ++r) {
        KahanSum acc;
        for (int k = 0; k <= K; ++k) acc.add(f[k] * std::pow(k - mu, r));
        s.central_moments.push_back(acc.value());
        s.moment_err.push_back(pmf.tail_bound() * std::pow(K + 1.0, r) +
                               1e-15 * K * std::abs(acc.value()) + 1e-18);
    }
    s.cov = Eigen::MatrixXd::Constant(1, 1, s.central_moments[0]);
    s.cov_err = Eigen::MatrixXd::Constant(1, 1, s.moment_err[0]);
    return s;
}

// ---------------------------------------------------------------------------
// Sampler
// ---------------------------------------------------------------------------

namespace {

// Fritsch-Carlson monotone cubic Hermite interpolant slopes.
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            const double w1 = 2 * h[i] + h[i - 1];
            const double w2 = h[i] + 2 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (delta[i] == 0.0) {
            m[i] = m[i + 1] = 0.0;
        } else {
            const double a = m[i] / delta[i];
            const double b = m[i + 1] / delta[i];
            const double q = a * a + b * b;
            if (q > 9.0) {
                const double t = 3.0 / std::sqrt(q);
                m[i] = t * a * delta[i];
                m[i + 1] = t * b * delta[i];
            }
        }
    }
    return m;
}

double hermite_eval(double x0, double x1, double y0, double y1, double m0,
                    double m1, double x) {
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
}

}  // namespace

std::vector<double> sample(const ContinuousModel& model, std::size_t n,
                           std::uint64_t seed, const QuadratureSpec& spec) {
    if (model.dim() != 1) throw DomainError("sample: 1D models only");
    std::vector<double> out;
    if (n == 0) return out;
    out.reserve(n);

    auto [a, b] = model.window1(spec.energy_budget);
    const double shift = model.potential_min();
    const int M = 4096;
    std::vector<double> xs(M + 1), cdf(M + 1);
    KahanSum total;
    xs[0] = a;
    cdf[0] = 0.0;
    for (int i = 0; i < M; ++i) {
        const double x0 = a + (b - a) * i / M;
        const double x1 = a + (b - a) * (i + 1) / M;
        const ValueWithError cell = gk15(
            [&](double x) { return std::exp(-(model.potential1(x) - shift)); },
            x0, x1);
        total.add(cell.value);
        xs[i + 1] = x1;
        cdf[i + 1] = total.value();
    }
    const double z = total.value();
    for (double& c : cdf) c /= z;
    cdf[M] = 1.0;
    // Enforce monotonicity against rounding.
    for (int i = 1; i <= M; ++i) cdf[i] = std::max(cdf[i], cdf[i - 1]);
    const std::vector<double> slopes = pchip_slopes(xs, cdf);

    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
        // Bracketing panel, then bisection on the monotone cubic.
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        int i = static_cast<int>(it - cdf.begin()) - 1;
        i = std::clamp(i, 0, M - 1);
        double lo = xs[i], hi = xs[i + 1];
        for (int step = 0; step < 60 && hi - lo > 1e-14 * (std::abs(hi) + 1.0);
             ++step) {
            const double mid = 0.5 * (lo + hi);
            const double fm = hermite_eval(xs[i], xs[i + 1], cdf[i], cdf[i + 1],
                                           slopes[i], slopes[i + 1], mid);
            if (fm < u)
                lo = mid;
            else
                hi = mid;
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

}  // namespace slc
