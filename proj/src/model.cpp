#include "slc/model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "slc/engine.hpp"

namespace slc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Eigen::VectorXd const_vec(int d, double v) {
    return Eigen::VectorXd::Constant(d, v);
}

// Dense scan + golden refinement for the minimum of a 1D function.
std::pair<double, double> scan_min(const std::function<double(double)>& f,
                                   double lo, double hi, int n = 4097) {
    int best = 0;
    double fbest = kInfinity;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double fx = f(x);
        if (fx < fbest) {
            fbest = fx;
            best = i;
        }
    }
    const double step = (hi - lo) / n;
    const double a = std::max(lo, lo + best * step - step);
    const double b = std::min(hi, lo + best * step + step);
    const double x = golden_section_min(f, a, b, 1e-12 * std::max(1.0, std::abs(b)));
    return {x, f(x)};
}

// Search interval for an unbounded coercive axis potential.
std::pair<double, double> coercive_bracket(const std::function<double(double)>& f,
                                           double lo, double hi) {
    double a = std::isfinite(lo) ? lo : -1.0;
    double b = std::isfinite(hi) ? hi : 1.0;
    const double f0 = f(0.5 * (a + b));
    if (!std::isfinite(lo))
        while (f(a) < f0 + 200.0 && a > -1e12) a *= 2.0;
    if (!std::isfinite(hi))
        while (f(b) < f0 + 200.0 && b < 1e12) b *= 2.0;
    return {a, b};
}

}  // namespace

// ---------------------------------------------------------------------------
// ContinuousModel construction
// ---------------------------------------------------------------------------

ContinuousModel ContinuousModel::gaussian1(double mu, double sigma2) {
    Eigen::VectorXd m(1);
    m << mu;
    Eigen::MatrixXd S(1, 1);
    S << sigma2;
    return gaussian(m, S);
}

ContinuousModel ContinuousModel::gaussian(const Eigen::VectorXd& mu,
                                          const Eigen::MatrixXd& Sigma) {
    const int d = static_cast<int>(mu.size());
    if (d < 1 || d > 3) throw ConfigError("gaussian: dimension must be 1..3");
    if (Sigma.rows() != d || Sigma.cols() != d)
        throw ConfigError("gaussian: Sigma dimension mismatch");
    if (!Sigma.isApprox(Sigma.transpose(), 1e-12))
        throw ConfigError("gaussian: Sigma must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
    if (llt.info() != Eigen::Success)
        throw ConfigError("gaussian: Sigma is not positive definite");

    ContinuousModel m;
    m.d_ = d;
    m.family_ = Family::gaussian;
    m.mu_ = mu;
    m.sigma_ = Sigma;
    m.sigma_inv_ = llt.solve(Eigen::MatrixXd::Identity(d, d));
    m.lo_ = const_vec(d, -kInfinity);
    m.hi_ = const_vec(d, kInfinity);
    m.phi_argmin_ = mu;
    m.phi_min_ = 0.0;
    double det = 1.0;
    for (int i = 0; i < d; ++i) det *= llt.matrixL()(i, i);
    m.gauss_log_norm_ = 0.5 * d * std::log(kTwoPi) + std::log(det);
    m.cache_->z = ValueWithError{std::exp(m.gauss_log_norm_), 0.0};
    m.cache_->z_exact = true;
    std::ostringstream os;
    os << "gaussian(d=" << d << ")";
    m.label_ = os.str();
    return m;
}

ContinuousModel ContinuousModel::poly(
    std::vector<double> coeffs, std::optional<std::pair<double, double>> domain) {
    while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
    if (coeffs.size() < 3)
        throw ConfigError("poly_potential: degree must be >= 2");
    const std::size_t deg = coeffs.size() - 1;
    if (deg % 2 != 0 || coeffs.back() <= 0.0)
        throw ConfigError(
            "poly_potential: non-integrable (leading term must be even degree "
            "with positive coefficient)");
    ContinuousModel m;
    m.d_ = 1;
    m.family_ = Family::poly_potential;
    m.axis_coeffs_ = {coeffs};
    m.axis_d1_ = {poly_derivative(coeffs)};
    m.axis_d2_ = {poly_derivative(m.axis_d1_[0])};
    m.lo_ = const_vec(1, domain ? domain->first : -kInfinity);
    m.hi_ = const_vec(1, domain ? domain->second : kInfinity);
    if (domain && !(domain->first < domain->second))
        throw ConfigError("poly_potential: empty domain");
    m.label_ = "poly_potential";
    m.locate_minimum();
    return m;
}

ContinuousModel ContinuousModel::separable_poly(
    std::vector<std::vector<double>> axis_coeffs) {
    const int d = static_cast<int>(axis_coeffs.size());
    if (d < 1 || d > 3)
        throw ConfigError("poly_potential: dimension must be 1..3");
    ContinuousModel m;
    m.d_ = d;
    m.family_ = Family::poly_potential;
    for (auto& c : axis_coeffs) {
        while (!c.empty() && c.back() == 0.0) c.pop_back();
        if (c.size() < 3 || (c.size() - 1) % 2 != 0 || c.back() <= 0.0)
            throw ConfigError(
                "poly_potential: each axis needs an even degree >= 2 with "
                "positive leading coefficient");
        m.axis_d1_.push_back(poly_derivative(c));
        m.axis_d2_.push_back(poly_derivative(m.axis_d1_.back()));
        m.axis_coeffs_.push_back(std::move(c));
    }
    m.lo_ = const_vec(d, -kInfinity);
    m.hi_ = const_vec(d, kInfinity);
    m.label_ = "poly_potential(d=" + std::to_string(d) + ")";
    m.locate_minimum();
    return m;
}

ContinuousModel ContinuousModel::tabulated_logdensity(std::vector<double> xs,
                                                      std::vector<double> log_f) {
    ContinuousModel m;
    m.d_ = 1;
    m.family_ = Family::tabulated_logdensity;
    std::vector<double> phi(log_f.size());
    for (std::size_t i = 0; i < log_f.size(); ++i) phi[i] = -log_f[i];
    m.lo_ = const_vec(1, xs.front());
    m.hi_ = const_vec(1, xs.back());
    m.phi_spline_ = CubicSpline(std::move(xs), std::move(phi));
    m.label_ = "tabulated_logdensity";
    m.locate_minimum();
    return m;
}

ContinuousModel ContinuousModel::from_potential(
    int d, std::function<double(const Eigen::VectorXd&)> phi,
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad,
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess,
    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, std::string label) {
    if (d < 1 || d > 3) throw ConfigError("from_potential: dimension must be 1..3");
    ContinuousModel m;
    m.d_ = d;
    m.family_ = Family::custom;
    m.phi_fn_ = std::move(phi);
    m.grad_fn_ = std::move(grad);
    m.hess_fn_ = std::move(hess);
    m.lo_ = lo;
    m.hi_ = hi;
    m.label_ = std::move(label);
    m.locate_minimum();
    return m;
}

void ContinuousModel::locate_minimum() {
    if (family_ == Family::gaussian) {
        phi_argmin_ = mu_;
        phi_min_ = 0.0;
        return;
    }
    phi_argmin_ = Eigen::VectorXd::Zero(d_);
    if (family_ == Family::poly_potential) {
        for (int i = 0; i < d_; ++i) {
            auto f = [&](double t) { return poly_eval(axis_coeffs_[i], t); };
            auto [a, b] = coercive_bracket(f, lo_[i], hi_[i]);
            phi_argmin_[i] = scan_min(f, a, b).first;
        }
        phi_min_ = potential(phi_argmin_);
        return;
    }
    if (family_ == Family::tabulated_logdensity) {
        auto f = [&](double t) { return phi_spline_(t); };
        std::tie(phi_argmin_[0], phi_min_) = scan_min(f, lo_[0], hi_[0]);
        return;
    }
    // custom: coordinate descent from the domain center (or 0).
    Eigen::VectorXd x(d_);
    for (int i = 0; i < d_; ++i) {
        const double a = std::isfinite(lo_[i]) ? lo_[i] : -1.0;
        const double b = std::isfinite(hi_[i]) ? hi_[i] : 1.0;
        x[i] = 0.5 * (a + b);
    }
    for (int round = 0; round < (d_ == 1 ? 1 : 3); ++round) {
        for (int i = 0; i < d_; ++i) {
            auto f = [&](double t) {
                Eigen::VectorXd y = x;
                y[i] = t;
                return phi_fn_(y);
            };
            auto [a, b] = coercive_bracket(f, lo_[i], hi_[i]);
            x[i] = scan_min(f, a, b).first;
        }
    }
    phi_argmin_ = x;
    phi_min_ = phi_fn_(x);
}

// ---------------------------------------------------------------------------
// Potential evaluation
// ---------------------------------------------------------------------------

double ContinuousModel::potential(const Eigen::VectorXd& x) const {
    switch (family_) {
        case Family::gaussian: {
            const Eigen::VectorXd c = x - mu_;
            return 0.5 * c.dot(sigma_inv_ * c);
        }
        case Family::poly_potential: {
            double s = 0.0;
            for (int i = 0; i < d_; ++i) s += poly_eval(axis_coeffs_[i], x[i]);
            return s;
        }
        case Family::tabulated_logdensity:
            return phi_spline_(x[0]);
        case Family::custom:
            return phi_fn_(x);
    }
    return 0.0;
}

Eigen::VectorXd ContinuousModel::gradient(const Eigen::VectorXd& x) const {
    switch (family_) {
        case Family::gaussian:
            return sigma_inv_ * (x - mu_);
        case Family::poly_potential: {
            Eigen::VectorXd g(d_);
            for (int i = 0; i < d_; ++i) g[i] = poly_eval(axis_d1_[i], x[i]);
            return g;
        }
        case Family::tabulated_logdensity: {
            Eigen::VectorXd g(1);
            g[0] = dpotential1(x[0]);
            return g;
        }
        case Family::custom:
            if (grad_fn_) return grad_fn_(x);
            return fd_gradient([this](const Eigen::VectorXd& y) { return phi_fn_(y); },
                               x, 0.0, &lo_, &hi_);
    }
    return Eigen::VectorXd::Zero(d_);
}

Eigen::MatrixXd ContinuousModel::hessian(const Eigen::VectorXd& x) const {
    switch (family_) {
        case Family::gaussian:
            return sigma_inv_;
        case Family::poly_potential: {
            Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d_, d_);
            for (int i = 0; i < d_; ++i) H(i, i) = poly_eval(axis_d2_[i], x[i]);
            return H;
        }
        case Family::tabulated_logdensity: {
            Eigen::MatrixXd H(1, 1);
            H(0, 0) = d2potential1(x[0]);
            return H;
        }
        case Family::custom:
            if (hess_fn_) return hess_fn_(x);
            return fd_hessian([this](const Eigen::VectorXd& y) { return phi_fn_(y); },
                              x, 0.0, &lo_, &hi_);
    }
    return Eigen::MatrixXd::Zero(d_, d_);
}

double ContinuousModel::potential1(double x) const {
    if (d_ != 1) throw DomainError("potential1: model is not 1D");
    Eigen::VectorXd v(1);
    v << x;
    return potential(v);
}

double ContinuousModel::dpotential1(double x) const {
    if (d_ != 1) throw DomainError("dpotential1: model is not 1D");
    if (family_ == Family::tabulated_logdensity) {
        const double h =
            std::pow(kMachineEps, 1.0 / 3.0) * std::max(1.0, std::abs(x));
        if (x - 2 * h < lo_[0] || x + 2 * h > hi_[0])
            throw DomainError("finite difference: point too close to domain boundary");
        return fd_d1([this](double t) { return phi_spline_(t); }, x, h);
    }
    Eigen::VectorXd v(1);
    v << x;
    return gradient(v)[0];
}

double ContinuousModel::d2potential1(double x) const {
    if (d_ != 1) throw DomainError("d2potential1: model is not 1D");
    if (family_ == Family::tabulated_logdensity) {
        const double h = std::pow(kMachineEps, 0.25) * std::max(1.0, std::abs(x));
        if (x - 2 * h < lo_[0] || x + 2 * h > hi_[0])
            throw DomainError("finite difference: point too close to domain boundary");
        return fd_d2([this](double t) { return phi_spline_(t); }, x, h);
    }
    Eigen::VectorXd v(1);
    v << x;
    return hessian(v)(0, 0);
}

bool ContinuousModel::separable() const {
    if (d_ == 1) return true;
    if (family_ == Family::poly_potential) return true;
    if (family_ == Family::gaussian) {
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j)
                if (i != j && sigma_(i, j) != 0.0) return false;
        return true;
    }
    return false;
}

ContinuousModel ContinuousModel::marginal(int i) const {
    if (i < 0 || i >= d_) throw DomainError("marginal: axis out of range");
    if (d_ == 1) return *this;
    if (family_ == Family::gaussian) return gaussian1(mu_[i], sigma_(i, i));
    if (family_ == Family::poly_potential) {
        std::optional<std::pair<double, double>> dom;
        return poly(axis_coeffs_[i], dom);
    }
    throw DomainError("marginal: unsupported family for d > 1");
}

ContinuousModel ContinuousModel::marginal_pair(int i, int j) const {
    if (i == j) return marginal(i);
    if (family_ == Family::gaussian) {
        Eigen::VectorXd m(2);
        m << mu_[i], mu_[j];
        Eigen::MatrixXd S(2, 2);
        S << sigma_(i, i), sigma_(i, j), sigma_(j, i), sigma_(j, j);
        return gaussian(m, S);
    }
    if (family_ == Family::poly_potential)
        return separable_poly({axis_coeffs_[i], axis_coeffs_[j]});
    throw DomainError("marginal_pair: unsupported family for d > 1");
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ContinuousModel::window(
    double budget) const {
    if (cache_->win && cache_->win_budget == budget) return *cache_->win;
    Eigen::VectorXd wlo(d_), whi(d_);
    for (int i = 0; i < d_; ++i) {
        if (family_ == Family::gaussian) {
            const double w = std::sqrt(2.0 * budget * sigma_(i, i));
            wlo[i] = std::max(lo_[i], mu_[i] - w);
            whi[i] = std::min(hi_[i], mu_[i] + w);
            continue;
        }
        // Axis profile through the potential minimum.
        auto f = [&](double t) {
            Eigen::VectorXd y = phi_argmin_;
            y[i] = t;
            return potential(y);
        };
        const double target = phi_min_ + budget;
        const double x0 = phi_argmin_[i];
        double b = std::isfinite(hi_[i]) ? hi_[i] : x0 + 1.0;
        if (!std::isfinite(hi_[i]))
            while (f(b) < target && b < x0 + 1e12) b = x0 + 2.0 * (b - x0);
        whi[i] = (f(b) < target) ? b : bisect_root([&](double t) { return f(t) - target; },
                                                   x0, b, 1e-9 * std::max(1.0, std::abs(b)));
        double a = std::isfinite(lo_[i]) ? lo_[i] : x0 - 1.0;
        if (!std::isfinite(lo_[i]))
            while (f(a) < target && a > x0 - 1e12) a = x0 - 2.0 * (x0 - a);
        wlo[i] = (f(a) < target) ? a : bisect_root([&](double t) { return target - f(t); },
                                                   a, x0, 1e-9 * std::max(1.0, std::abs(a)));
    }
    cache_->win = std::make_pair(wlo, whi);
    cache_->win_budget = budget;
    return *cache_->win;
}

std::pair<double, double> ContinuousModel::window1(double budget) const {
    if (d_ != 1) throw DomainError("window1: model is not 1D");
    auto [lo, hi] = window(budget);
    return {lo[0], hi[0]};
}

std::optional<ValueWithError> ContinuousModel::cached_normalization(
    double rtol, double atol, double budget) const {
    if (!cache_->z) return std::nullopt;
    if (cache_->z_exact) return cache_->z;
    if (cache_->z_rtol == rtol && cache_->z_atol == atol &&
        cache_->z_budget == budget)
        return cache_->z;
    return std::nullopt;
}

void ContinuousModel::cache_normalization(ValueWithError z, double rtol,
                                          double atol, double budget) const {
    if (cache_->z_exact) return;
    cache_->z = z;
    cache_->z_rtol = rtol;
    cache_->z_atol = atol;
    cache_->z_budget = budget;
}

bool ContinuousModel::has_exact_normalization() const { return cache_->z_exact; }

const Eigen::VectorXd& ContinuousModel::gauss_mean() const {
    if (family_ != Family::gaussian) throw DomainError("not a gaussian model");
    return mu_;
}

const Eigen::MatrixXd& ContinuousModel::gauss_sigma() const {
    if (family_ != Family::gaussian) throw DomainError("not a gaussian model");
    return sigma_;
}

const Eigen::MatrixXd& ContinuousModel::gauss_sigma_inv() const {
    if (family_ != Family::gaussian) throw DomainError("not a gaussian model");
    return sigma_inv_;
}

// ---------------------------------------------------------------------------
// DiscretePmf
// ---------------------------------------------------------------------------

DiscretePmf DiscretePmf::poisson(double lambda, double tail_eps) {
    if (!(lambda > 0)) throw ConfigError("poisson: lambda must be > 0");
    if (!(tail_eps > 0) || !(tail_eps < 1))
        throw ConfigError("poisson: tail_eps must be in (0,1)");
    std::vector<double> f;
    f.push_back(std::exp(-lambda));
    KahanSum s;
    s.add(f[0]);
    // Smallest K with tail mass below tail_eps.
    while (1.0 - s.value() >= tail_eps) {
        if (f.size() > 2'000'000)
            throw NumericsError("poisson: truncation did not converge");
        f.push_back(f.back() * lambda / static_cast<double>(f.size()));
        s.add(f.back());
    }
    const double total = s.value();
    for (double& p : f) p /= total;
    DiscretePmf pmf;
    pmf.kind_ = SupportKind::naturals;
    pmf.K_ = static_cast<int>(f.size()) - 1;
    pmf.f_ = std::move(f);
    pmf.mean_ = lambda;
    pmf.tail_eps_ = 1.0 - total;
    pmf.lambda_ = lambda;
    pmf.tail_request_ = tail_eps;
    std::ostringstream os;
    os << "poisson(" << lambda << ")";
    pmf.label_ = os.str();
    return pmf;
}

DiscretePmf DiscretePmf::binomial(int N, double p) {
    if (N < 1) throw ConfigError("binomial: N must be >= 1");
    if (!(p > 0) || !(p < 1)) throw ConfigError("binomial: p must be in (0,1)");
    std::vector<double> f(static_cast<std::size_t>(N) + 1);
    const double f0 = std::pow(1.0 - p, N);
    if (f0 > 1e-290) {
        f[0] = f0;
        const double odds = p / (1.0 - p);
        for (int n = 0; n < N; ++n)
            f[n + 1] = f[n] * (double(N - n) / double(n + 1)) * odds;
    } else {
        for (int n = 0; n <= N; ++n)
            f[n] = std::exp(std::lgamma(N + 1.0) - std::lgamma(n + 1.0) -
                            std::lgamma(N - n + 1.0) + n * std::log(p) +
                            (N - n) * std::log1p(-p));
    }
    KahanSum s;
    for (double v : f) s.add(v);
    for (double& v : f) v /= s.value();
    DiscretePmf pmf;
    pmf.kind_ = SupportKind::finite;
    pmf.K_ = N;
    pmf.f_ = std::move(f);
    pmf.mean_ = static_cast<double>(N) * p;
    pmf.tail_eps_ = 0.0;
    pmf.np_ = std::make_pair(N, p);
    std::ostringstream os;
    os << "binomial(" << N << "," << p << ")";
    pmf.label_ = os.str();
    return pmf;
}

DiscretePmf DiscretePmf::tabulated(std::vector<double> probs, SupportKind kind,
                                   double tail_eps) {
    if (probs.empty()) throw ConfigError("pmf: empty support");
    KahanSum s;
    for (double v : probs) {
        if (v < 0) throw ConfigError("pmf: negative probabilities");
        s.add(v);
    }
    if (!(s.value() > 0)) throw ConfigError("pmf: total mass is zero");
    for (double& v : probs) v /= s.value();
    KahanSum mean;
    for (std::size_t k = 0; k < probs.size(); ++k)
        mean.add(static_cast<double>(k) * probs[k]);
    DiscretePmf pmf;
    pmf.kind_ = kind;
    pmf.K_ = static_cast<int>(probs.size()) - 1;
    pmf.f_ = std::move(probs);
    pmf.mean_ = mean.value();
    pmf.tail_eps_ = tail_eps;
    pmf.label_ = "tabulated_pmf";
    return pmf;
}

bool DiscretePmf::strictly_positive() const {
    for (double v : f_)
        if (!(v > 0)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

void require_keys(const nlohmann::json& doc, const std::set<std::string>& allowed) {
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown field '" + it.key() + "'");
}

std::optional<std::pair<double, double>> parse_domain(const nlohmann::json& doc) {
    if (!doc.contains("domain")) return std::nullopt;
    const auto& d = doc.at("domain");
    if (!d.is_array() || d.size() != 2)
        throw ConfigError("config: domain must be [lo, hi]");
    return std::make_pair(d[0].get<double>(), d[1].get<double>());
}

}  // namespace

namespace {
Model parse_config_impl(const nlohmann::json& doc);
}

Model parse_config(const nlohmann::json& doc) {
    try {
        return parse_config_impl(doc);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

namespace {

Model parse_config_impl(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    if (!doc.contains("family")) throw ConfigError("config: missing 'family'");
    const std::string family = doc.at("family").get<std::string>();

    if (family == "gaussian") {
        require_keys(doc, {"family", "mu", "sigma2", "Sigma"});
        if (doc.contains("sigma2")) {
            return ContinuousModel::gaussian1(doc.value("mu", 0.0),
                                              doc.at("sigma2").get<double>());
        }
        const auto mu = doc.at("mu").get<std::vector<double>>();
        const auto rows = doc.at("Sigma").get<std::vector<std::vector<double>>>();
        const int d = static_cast<int>(mu.size());
        Eigen::VectorXd m(d);
        Eigen::MatrixXd S(d, d);
        for (int i = 0; i < d; ++i) {
            m[i] = mu[i];
            if (static_cast<int>(rows.size()) != d ||
                static_cast<int>(rows[i].size()) != d)
                throw ConfigError("config: Sigma must be d x d");
            for (int j = 0; j < d; ++j) S(i, j) = rows[i][j];
        }
        return ContinuousModel::gaussian(m, S);
    }
    if (family == "poly_potential") {
        require_keys(doc, {"family", "coeffs", "domain"});
        const auto& c = doc.at("coeffs");
        if (!c.empty() && c[0].is_array()) {
            if (doc.contains("domain"))
                throw ConfigError("config: domain is only supported for 1D potentials");
            Model m = ContinuousModel::separable_poly(
                c.get<std::vector<std::vector<double>>>());
            normalize(std::get<ContinuousModel>(m), QuadratureSpec{});
            return m;
        }
        Model m = ContinuousModel::poly(c.get<std::vector<double>>(), parse_domain(doc));
        normalize(std::get<ContinuousModel>(m), QuadratureSpec{});
        return m;
    }
    if (family == "tabulated_logdensity") {
        require_keys(doc, {"family", "logdensity_grid"});
        const auto grid = doc.at("logdensity_grid").get<std::vector<std::vector<double>>>();
        std::vector<double> xs, lf;
        for (const auto& pair : grid) {
            if (pair.size() != 2)
                throw ConfigError("config: logdensity_grid entries are [x, log f(x)]");
            xs.push_back(pair[0]);
            lf.push_back(pair[1]);
        }
        Model m = ContinuousModel::tabulated_logdensity(std::move(xs), std::move(lf));
        normalize(std::get<ContinuousModel>(m), QuadratureSpec{});
        return m;
    }
    if (family == "poisson") {
        require_keys(doc, {"family", "lambda", "tail_eps"});
        return DiscretePmf::poisson(doc.at("lambda").get<double>(),
                                    doc.value("tail_eps", 1e-12));
    }
    if (family == "binomial") {
        require_keys(doc, {"family", "N", "p"});
        return DiscretePmf::binomial(doc.at("N").get<int>(), doc.at("p").get<double>());
    }
    if (family == "tabulated_pmf") {
        require_keys(doc, {"family", "probs", "support", "tail_eps"});
        SupportKind kind = SupportKind::naturals;
        if (doc.contains("support")) {
            const std::string s = doc.at("support").get<std::string>();
            if (s == "finite")
                kind = SupportKind::finite;
            else if (s != "naturals")
                throw ConfigError("config: support must be 'naturals' or 'finite'");
        }
        return DiscretePmf::tabulated(doc.at("probs").get<std::vector<double>>(),
                                      kind, doc.value("tail_eps", 0.0));
    }
    throw ConfigError("config: unknown family '" + family + "'");
}

}  // namespace

Model parse_config_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: malformed document: ") + e.what());
    }
    return parse_config(doc);
}

nlohmann::json emit_config(const Model& m) {
    nlohmann::json j;
    if (std::holds_alternative<DiscretePmf>(m)) {
        const DiscretePmf& pmf = std::get<DiscretePmf>(m);
        if (pmf.param_lambda()) {
            j["family"] = "poisson";
            j["lambda"] = *pmf.param_lambda();
            j["tail_eps"] = pmf.param_tail_eps().value_or(1e-12);
        } else if (pmf.param_binomial()) {
            j["family"] = "binomial";
            j["N"] = pmf.param_binomial()->first;
            j["p"] = pmf.param_binomial()->second;
        } else {
            j["family"] = "tabulated_pmf";
            j["probs"] = pmf.probs();
            j["support"] = pmf.kind() == SupportKind::finite ? "finite" : "naturals";
        }
        return j;
    }
    const ContinuousModel& cm = std::get<ContinuousModel>(m);
    switch (cm.family()) {
        case Family::gaussian:
            j["family"] = "gaussian";
            if (cm.dim() == 1) {
                j["mu"] = cm.gauss_mean()[0];
                j["sigma2"] = cm.gauss_sigma()(0, 0);
            } else {
                std::vector<double> mu(cm.gauss_mean().data(),
                                       cm.gauss_mean().data() + cm.dim());
                j["mu"] = mu;
                std::vector<std::vector<double>> S(cm.dim(),
                                                   std::vector<double>(cm.dim()));
                for (int i = 0; i < cm.dim(); ++i)
                    for (int k = 0; k < cm.dim(); ++k) S[i][k] = cm.gauss_sigma()(i, k);
                j["Sigma"] = S;
            }
            break;
        case Family::poly_potential:
            j["family"] = "poly_potential";
            if (cm.dim() == 1) {
                j["coeffs"] = cm.axis_coeffs()[0];
                if (std::isfinite(cm.domain_lo()[0]))
                    j["domain"] = {cm.domain_lo()[0], cm.domain_hi()[0]};
            } else {
                j["coeffs"] = cm.axis_coeffs();
            }
            break;
        default:
            throw ConfigError("emit_config: only built-in families round-trip");
    }
    return j;
}

}  // namespace slc
