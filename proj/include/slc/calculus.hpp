#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slc/common.hpp"
#include "json.hpp"

namespace slc {

class ContinuousModel;
class DiscretePmf;

// ---------------------------------------------------------------------------
// Polynomials (ascending coefficients) and natural cubic splines.
// ---------------------------------------------------------------------------

double poly_eval(std::span<const double> coeffs, double x);
std::vector<double> poly_derivative(std::span<const double> coeffs);
// Coefficients of p(x + shift), same degree.
std::vector<double> poly_shift(std::span<const double> coeffs, double shift);

class CubicSpline {
  public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> xs, std::vector<double> ys);
    double operator()(double x) const;
    double deriv(double x) const;
    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }
    bool empty() const { return xs_.empty(); }

  private:
    std::vector<double> xs_, ys_, m_;  // m_ = second derivatives at knots
    std::size_t locate(double x) const;
};

// ---------------------------------------------------------------------------
// Test functions: the g, u, v of the inequality battery.
// ---------------------------------------------------------------------------

enum class Monotonicity { none, nondecreasing, strictly_increasing, nonincreasing };

class TestFunction {
  public:
    enum class Kind { poly, centered_monomial, tabulated };

    static TestFunction poly(std::vector<double> coeffs,
                             Monotonicity monotone = Monotonicity::none);
    static TestFunction centered_monomial(int degree, double center = 0.0);
    static TestFunction tabulated(std::vector<double> xs, std::vector<double> ys,
                                  Monotonicity monotone = Monotonicity::none);
    static TestFunction from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;

    double operator()(double x) const;
    double deriv(double x) const;

    Kind kind() const { return kind_; }
    Monotonicity monotone() const { return monotone_; }
    const std::string& id() const { return id_; }

    // Strict-increase validation: odd centered monomials pass symbolically;
    // everything else is checked on a dense grid over [lo, hi] (derivative
    // >= -1e-12 and consecutive values increasing). Throws DomainError.
    void require_strictly_increasing(double lo, double hi) const;

    // Values at integer points 0..K (for discrete gaps).
    std::vector<double> values_on_support(int K) const;

  private:
    Kind kind_ = Kind::poly;
    Monotonicity monotone_ = Monotonicity::none;
    std::vector<double> coeffs_, dcoeffs_;
    int degree_ = 1;
    double center_ = 0.0;
    CubicSpline spline_;
    std::string id_;
};

// Sum of per-axis 1D functions: g(x) = sum_j p_j(x_j). Covers the linear and
// coordinate test functions the multivariate inequalities need.
struct MultiTestFunction {
    std::vector<TestFunction> axis;  // size d
    std::string id;

    static MultiTestFunction linear(const Eigen::VectorXd& u);
    static MultiTestFunction coordinate(int i, int d);
    double operator()(const Eigen::VectorXd& x) const;
    Eigen::VectorXd grad(const Eigen::VectorXd& x) const;
};

// ---------------------------------------------------------------------------
// Finite differences (central).
// ---------------------------------------------------------------------------

// Step defaults: cbrt(eps)*max(1,|x|) for gradients, eps^(1/4)*max(1,|x|) for
// Hessians. Throws DomainError when x is within 2h of the domain boundary.
Eigen::VectorXd fd_gradient(
    const std::function<double(const Eigen::VectorXd&)>& phi,
    const Eigen::VectorXd& x, double h = 0.0,
    const Eigen::VectorXd* lo = nullptr, const Eigen::VectorXd* hi = nullptr);

Eigen::MatrixXd fd_hessian(
    const std::function<double(const Eigen::VectorXd&)>& phi,
    const Eigen::VectorXd& x, double h = 0.0,
    const Eigen::VectorXd* lo = nullptr, const Eigen::VectorXd* hi = nullptr);

double fd_d1(const std::function<double(double)>& f, double x, double h = 0.0);
double fd_d2(const std::function<double(double)>& f, double x, double h = 0.0);

// ---------------------------------------------------------------------------
// Discrete derivative operators on {0..K}.
//
// nabla u(0) = u(0), nabla u(n) = u(n) - u(n-1).
// nabla_star v(n) = v(n+1) - v(n), with the sequence read as zero beyond its
// last index, so nabla_star v(K) = -v(K). This is the convention under which
// sum (nabla u) v = -sum u (nabla_star v) holds exactly on finite supports.
// nabla_N / nabla_N_star are the binomial-weighted operators on {0..N}; the
// pair is exactly dual with nabla_N_star v(N) = 0.
// ---------------------------------------------------------------------------

template <typename T>
std::vector<T> nabla(std::span<const T> u) {
    if (u.empty()) throw DomainError("nabla: empty sequence");
    std::vector<T> out(u.size());
    out[0] = u[0];
    for (std::size_t n = 1; n < u.size(); ++n) out[n] = u[n] - u[n - 1];
    return out;
}

template <typename T>
std::vector<T> nabla_star(std::span<const T> v) {
    if (v.size() < 2) throw DomainError("nabla_star: need length >= 2");
    std::vector<T> out(v.size());
    for (std::size_t n = 0; n + 1 < v.size(); ++n) out[n] = v[n + 1] - v[n];
    out[v.size() - 1] = -v[v.size() - 1];
    return out;
}

std::vector<double> nabla(std::span<const double> u);
std::vector<double> nabla_star(std::span<const double> v);
std::vector<double> nabla_N(std::span<const double> h, int N);
std::vector<double> nabla_N_star(std::span<const double> v, int N);

// ---------------------------------------------------------------------------
// Score functions.
// ---------------------------------------------------------------------------

enum class DiscreteOp { nabla, nabla_N };

// u(x) = -phi'(x) + (x - mu)/alpha = f'/f + (x - mu)/alpha. 1D models only.
std::function<double(double)> score_u_continuous(const ContinuousModel& model,
                                                 double alpha, double mu);

// u(k) = (op f)(k)/f(k) + (k - mu)/alpha; throws on zero mass points.
std::vector<double> score_u_discrete(const DiscretePmf& pmf, double alpha,
                                     double mu, DiscreteOp op);

}  // namespace slc
