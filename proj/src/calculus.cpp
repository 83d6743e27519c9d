#include "slc/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "slc/model.hpp"

namespace slc {

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

double poly_eval(std::span<const double> coeffs, double x) {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
}

std::vector<double> poly_derivative(std::span<const double> coeffs) {
    if (coeffs.size() <= 1) return {0.0};
    std::vector<double> d(coeffs.size() - 1);
    for (std::size_t i = 1; i < coeffs.size(); ++i)
        d[i - 1] = static_cast<double>(i) * coeffs[i];
    return d;
}

std::vector<double> poly_shift(std::span<const double> coeffs, double shift) {
    // Horner-style synthetic division: repeated evaluation of Taylor coeffs.
    std::vector<double> out(coeffs.begin(), coeffs.end());
    const std::size_t n = out.size();
    for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t i = n - 1; i > k; --i) out[i - 1] += shift * out[i];
    return out;
}

// ---------------------------------------------------------------------------
// CubicSpline (natural)
// ---------------------------------------------------------------------------

CubicSpline::CubicSpline(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    const std::size_t n = xs_.size();
    if (n < 3 || ys_.size() != n)
        throw ConfigError("spline: need >= 3 points with matching lengths");
    for (std::size_t i = 1; i < n; ++i)
        if (!(xs_[i] > xs_[i - 1]))
            throw ConfigError("spline: abscissae must be strictly increasing");
    m_.assign(n, 0.0);

    // Interior equations for the second derivatives m_i.
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = xs_[i] - xs_[i - 1];
        const double hr = xs_[i + 1] - xs_[i];
        a[i] = hl / 6.0;
        b[i] = (hl + hr) / 3.0;
        c[i] = hr / 6.0;
        r[i] = (ys_[i + 1] - ys_[i]) / hr - (ys_[i] - ys_[i - 1]) / hl;
    }

    if (n == 3) {
        // Single interior equation; natural ends.
        m_[1] = r[1] / b[1];
        return;
    }

    // Not-a-knot ends: continuous third derivative across the first and
    // last interior knots. A natural end condition would pin the boundary
    // curvature to zero and poison finite-difference Hessians near the
    // window edge. Eliminate m_0 and m_{n-1}:
    //   m_0 = m_1 - (h0/h1)(m_2 - m_1),  symmetrically at the other end.
    const double h0 = xs_[1] - xs_[0];
    const double h1 = xs_[2] - xs_[1];
    b[1] += a[1] * (1.0 + h0 / h1);
    c[1] -= a[1] * (h0 / h1);
    a[1] = 0.0;
    const double hm = xs_[n - 1] - xs_[n - 2];
    const double hm1 = xs_[n - 2] - xs_[n - 3];
    b[n - 2] += c[n - 2] * (1.0 + hm / hm1);
    a[n - 2] -= c[n - 2] * (hm / hm1);
    c[n - 2] = 0.0;

    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        r[i] -= w * r[i - 1];
    }
    m_[n - 2] = r[n - 2] / b[n - 2];
    for (std::size_t i = n - 2; i-- > 1;)
        m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
    m_[0] = m_[1] - (h0 / h1) * (m_[2] - m_[1]);
    m_[n - 1] = m_[n - 2] + (hm / hm1) * (m_[n - 2] - m_[n - 3]);
}

std::size_t CubicSpline::locate(double x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    if (i == 0) return 0;
    if (i >= xs_.size()) return xs_.size() - 2;
    return i - 1;
}

double CubicSpline::operator()(double x) const {
    const std::size_t i = locate(x);
    const double h = xs_[i + 1] - xs_[i];
    const double A = (xs_[i + 1] - x) / h;
    const double B = (x - xs_[i]) / h;
    return A * ys_[i] + B * ys_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double x) const {
    const std::size_t i = locate(x);
    const double h = xs_[i + 1] - xs_[i];
    const double A = (xs_[i + 1] - x) / h;
    const double B = (x - xs_[i]) / h;
    return (ys_[i + 1] - ys_[i]) / h +
           ((3 * B * B - 1) * m_[i + 1] - (3 * A * A - 1) * m_[i]) * h / 6.0;
}

// ---------------------------------------------------------------------------
// TestFunction
// ---------------------------------------------------------------------------

TestFunction TestFunction::poly(std::vector<double> coeffs, Monotonicity m) {
    if (coeffs.empty()) throw ConfigError("test function: empty coefficients");
    TestFunction t;
    t.kind_ = Kind::poly;
    t.monotone_ = m;
    t.dcoeffs_ = poly_derivative(coeffs);
    t.coeffs_ = std::move(coeffs);
    std::ostringstream os;
    os << "poly[";
    for (std::size_t i = 0; i < t.coeffs_.size(); ++i)
        os << (i ? "," : "") << t.coeffs_[i];
    os << "]";
    t.id_ = os.str();
    return t;
}

TestFunction TestFunction::centered_monomial(int degree, double center) {
    if (degree < 1) throw ConfigError("centered_monomial: degree must be >= 1");
    TestFunction t;
    t.kind_ = Kind::centered_monomial;
    t.degree_ = degree;
    t.center_ = center;
    t.monotone_ = (degree % 2 == 1) ? Monotonicity::strictly_increasing
                                    : Monotonicity::none;
    std::ostringstream os;
    os << "(x-" << center << ")^" << degree;
    t.id_ = os.str();
    return t;
}

TestFunction TestFunction::tabulated(std::vector<double> xs,
                                     std::vector<double> ys, Monotonicity m) {
    TestFunction t;
    t.kind_ = Kind::tabulated;
    t.monotone_ = m;
    t.spline_ = CubicSpline(std::move(xs), std::move(ys));
    t.id_ = "tabulated";
    return t;
}

TestFunction TestFunction::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("kind"))
        throw ConfigError("test function: expected object with 'kind'");
    const std::string kind = doc.at("kind").get<std::string>();
    Monotonicity m = Monotonicity::none;
    if (doc.contains("monotone")) {
        const std::string s = doc.at("monotone").get<std::string>();
        if (s == "strict")
            m = Monotonicity::strictly_increasing;
        else if (s == "nondecreasing")
            m = Monotonicity::nondecreasing;
        else if (s != "none")
            throw ConfigError("test function: unknown monotone flag '" + s + "'");
    }
    if (kind == "poly")
        return poly(doc.at("coeffs").get<std::vector<double>>(), m);
    if (kind == "centered_monomial")
        return centered_monomial(doc.at("degree").get<int>(),
                                 doc.value("center", 0.0));
    if (kind == "tabulated")
        return tabulated(doc.at("xs").get<std::vector<double>>(),
                         doc.at("ys").get<std::vector<double>>(), m);
    throw ConfigError("test function: unknown kind '" + kind + "'");
}

nlohmann::json TestFunction::to_json() const {
    nlohmann::json j;
    switch (kind_) {
        case Kind::poly:
            j["kind"] = "poly";
            j["coeffs"] = coeffs_;
            break;
        case Kind::centered_monomial:
            j["kind"] = "centered_monomial";
            j["degree"] = degree_;
            j["center"] = center_;
            break;
        case Kind::tabulated:
            j["kind"] = "tabulated";
            break;
    }
    if (monotone_ == Monotonicity::strictly_increasing) j["monotone"] = "strict";
    return j;
}

double TestFunction::operator()(double x) const {
    switch (kind_) {
        case Kind::poly:
            return poly_eval(coeffs_, x);
        case Kind::centered_monomial:
            return std::pow(x - center_, degree_);
        case Kind::tabulated:
            return spline_(x);
    }
    return 0.0;
}

double TestFunction::deriv(double x) const {
    switch (kind_) {
        case Kind::poly:
            return poly_eval(dcoeffs_, x);
        case Kind::centered_monomial:
            return degree_ * std::pow(x - center_, degree_ - 1);
        case Kind::tabulated:
            return spline_.deriv(x);
    }
    return 0.0;
}

void TestFunction::require_strictly_increasing(double lo, double hi) const {
    if (kind_ == Kind::centered_monomial && degree_ % 2 == 1) return;
    const int n = 2001;
    double prev = (*this)(lo);
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        if (deriv(x) < -1e-12)
            throw DomainError("test function '" + id_ +
                              "' is not strictly increasing on the window");
        if (i > 0) {
            const double y = (*this)(x);
            if (!(y > prev))
                throw DomainError("test function '" + id_ +
                                  "' is not strictly increasing on the window");
            prev = y;
        }
    }
}

std::vector<double> TestFunction::values_on_support(int K) const {
    std::vector<double> v(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) v[k] = (*this)(static_cast<double>(k));
    return v;
}

MultiTestFunction MultiTestFunction::linear(const Eigen::VectorXd& u) {
    MultiTestFunction g;
    std::ostringstream os;
    os << "linear[";
    for (int i = 0; i < u.size(); ++i) {
        g.axis.push_back(TestFunction::poly({0.0, u[i]}));
        os << (i ? "," : "") << u[i];
    }
    os << "]";
    g.id = os.str();
    return g;
}

MultiTestFunction MultiTestFunction::coordinate(int i, int d) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
    u[i] = 1.0;
    MultiTestFunction g = linear(u);
    g.id = "x_" + std::to_string(i);
    return g;
}

double MultiTestFunction::operator()(const Eigen::VectorXd& x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < axis.size(); ++j) s += axis[j](x[j]);
    return s;
}

Eigen::VectorXd MultiTestFunction::grad(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g(x.size());
    for (std::size_t j = 0; j < axis.size(); ++j) g[j] = axis[j].deriv(x[j]);
    return g;
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

namespace {

double default_step(double x, double exponent) {
    return std::pow(kMachineEps, exponent) * std::max(1.0, std::abs(x));
}

void check_margin(double x, double h, double lo, double hi) {
    if (x - 2 * h < lo || x + 2 * h > hi)
        throw DomainError("finite difference: point too close to domain boundary");
}

}  // namespace

Eigen::VectorXd fd_gradient(
    const std::function<double(const Eigen::VectorXd&)>& phi,
    const Eigen::VectorXd& x, double h, const Eigen::VectorXd* lo,
    const Eigen::VectorXd* hi) {
    const int d = static_cast<int>(x.size());
    Eigen::VectorXd g(d);
    Eigen::VectorXd xp = x, xm = x;
    for (int i = 0; i < d; ++i) {
        const double hi_ = h > 0 ? h : default_step(x[i], 1.0 / 3.0);
        check_margin(x[i], hi_, lo ? (*lo)[i] : -kInfinity, hi ? (*hi)[i] : kInfinity);
        xp[i] = x[i] + hi_;
        xm[i] = x[i] - hi_;
        g[i] = (phi(xp) - phi(xm)) / (2 * hi_);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return g;
}

Eigen::MatrixXd fd_hessian(
    const std::function<double(const Eigen::VectorXd&)>& phi,
    const Eigen::VectorXd& x, double h, const Eigen::VectorXd* lo,
    const Eigen::VectorXd* hi) {
    const int d = static_cast<int>(x.size());
    Eigen::MatrixXd H(d, d);
    const double f0 = phi(x);
    std::vector<double> step(d);
    for (int i = 0; i < d; ++i) {
        step[i] = h > 0 ? h : default_step(x[i], 0.25);
        check_margin(x[i], step[i], lo ? (*lo)[i] : -kInfinity,
                     hi ? (*hi)[i] : kInfinity);
    }
    Eigen::VectorXd y = x;
    for (int i = 0; i < d; ++i) {
        y[i] = x[i] + step[i];
        const double fp = phi(y);
        y[i] = x[i] - step[i];
        const double fm = phi(y);
        y[i] = x[i];
        H(i, i) = (fp - 2 * f0 + fm) / (step[i] * step[i]);
        for (int j = i + 1; j < d; ++j) {
            y[i] = x[i] + step[i];
            y[j] = x[j] + step[j];
            const double fpp = phi(y);
            y[j] = x[j] - step[j];
            const double fpm = phi(y);
            y[i] = x[i] - step[i];
            const double fmm = phi(y);
            y[j] = x[j] + step[j];
            const double fmp = phi(y);
            y[i] = x[i];
            y[j] = x[j];
            H(i, j) = (fpp - fpm - fmp + fmm) / (4 * step[i] * step[j]);
            H(j, i) = H(i, j);
        }
    }
    return 0.5 * (H + H.transpose());
}

double fd_d1(const std::function<double(double)>& f, double x, double h) {
    const double hh = h > 0 ? h : default_step(x, 1.0 / 3.0);
    return (f(x + hh) - f(x - hh)) / (2 * hh);
}

double fd_d2(const std::function<double(double)>& f, double x, double h) {
    const double hh = h > 0 ? h : default_step(x, 0.25);
    return (f(x + hh) - 2 * f(x) + f(x - hh)) / (hh * hh);
}

// ---------------------------------------------------------------------------
// Discrete operators (double instantiations)
// ---------------------------------------------------------------------------

std::vector<double> nabla(std::span<const double> u) { return nabla<double>(u); }

std::vector<double> nabla_star(std::span<const double> v) {
    return nabla_star<double>(v);
}

std::vector<double> nabla_N(std::span<const double> h, int N) {
    if (static_cast<int>(h.size()) != N + 1)
        throw DomainError("nabla_N: sequence length must be N+1");
    std::vector<double> out(h.size());
    out[0] = h[0];
    for (int n = 1; n <= N; ++n)
        out[n] = (double(N - n) / N) * h[n] - (double(N - n + 1) / N) * h[n - 1];
    return out;
}

std::vector<double> nabla_N_star(std::span<const double> v, int N) {
    if (static_cast<int>(v.size()) != N + 1)
        throw DomainError("nabla_N_star: sequence length must be N+1");
    std::vector<double> out(v.size());
    for (int n = 0; n < N; ++n) out[n] = (double(N - n) / N) * (v[n + 1] - v[n]);
    out[N] = 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Scores
// ---------------------------------------------------------------------------

std::function<double(double)> score_u_continuous(const ContinuousModel& model,
                                                 double alpha, double mu) {
    if (model.dim() != 1)
        throw DomainError("score_u_continuous: 1D models only");
    if (!(alpha > 0)) throw DomainError("score_u_continuous: alpha must be > 0");
    return [&model, alpha, mu](double x) {
        return -model.dpotential1(x) + (x - mu) / alpha;
    };
}

std::vector<double> score_u_discrete(const DiscretePmf& pmf, double alpha,
                                     double mu, DiscreteOp op) {
    if (!(alpha > 0)) throw DomainError("score_u_discrete: alpha must be > 0");
    const std::vector<double>& f = pmf.probs();
    for (double p : f)
        if (!(p > 0))
            throw DomainError("score_u_discrete: pmf has a zero mass point");
    std::vector<double> df;
    if (op == DiscreteOp::nabla) {
        df = nabla(std::span<const double>(f));
    } else {
        if (pmf.kind() != SupportKind::finite)
            throw DomainError("score_u_discrete: nabla_N needs a finite support pmf");
        df = nabla_N(std::span<const double>(f), pmf.truncation_index());
    }
    std::vector<double> u(f.size());
    for (std::size_t k = 0; k < f.size(); ++k)
        u[k] = df[k] / f[k] + (static_cast<double>(k) - mu) / alpha;
    return u;
}

}  // namespace slc
