#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "slc/calculus.hpp"
#include "slc/common.hpp"

namespace slc {

enum class Family { gaussian, poly_potential, tabulated_logdensity, custom };

// A continuous density e^(-phi)/Z on a box in R^d, d <= 3, carried as the
// potential phi with derivatives. Built-ins and polynomial potentials have
// closed-form derivatives; tabulated log-densities are spline-interpolated
// with finite-difference derivatives. Immutable after construction.
class ContinuousModel {
  public:
    static ContinuousModel gaussian1(double mu, double sigma2);
    static ContinuousModel gaussian(const Eigen::VectorXd& mu,
                                    const Eigen::MatrixXd& Sigma);
    // 1D polynomial potential, ascending coefficients. Requires even degree
    // with positive leading coefficient (integrability).
    static ContinuousModel poly(std::vector<double> coeffs,
                                std::optional<std::pair<double, double>> domain =
                                    std::nullopt);
    // Separable multivariate potential phi(x) = sum_j p_j(x_j).
    static ContinuousModel separable_poly(
        std::vector<std::vector<double>> axis_coeffs);
    static ContinuousModel tabulated_logdensity(std::vector<double> xs,
                                                std::vector<double> log_f);
    // Arbitrary closed-form potential (library API; not reachable by config).
    static ContinuousModel from_potential(
        int d, std::function<double(const Eigen::VectorXd&)> phi,
        std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad,
        std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess,
        const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
        std::string label = "custom");

    int dim() const { return d_; }
    Family family() const { return family_; }
    const std::string& label() const { return label_; }

    double potential(const Eigen::VectorXd& x) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

    // 1D conveniences (throw unless dim() == 1).
    double potential1(double x) const;
    double dpotential1(double x) const;
    double d2potential1(double x) const;

    const Eigen::VectorXd& domain_lo() const { return lo_; }
    const Eigen::VectorXd& domain_hi() const { return hi_; }

    // Coordinates are independent (1D, separable poly, diagonal gaussian).
    bool separable() const;

    // 1D (or 2D, for pairs) marginal model. Exact for gaussian families and
    // separable potentials; these are the only multivariate families.
    ContinuousModel marginal(int i) const;
    ContinuousModel marginal_pair(int i, int j) const;

    // Truncation window: the box where phi - min phi <= budget, intersected
    // with the declared domain. Cached per budget on first use.
    std::pair<Eigen::VectorXd, Eigen::VectorXd> window(double budget) const;
    std::pair<double, double> window1(double budget) const;

    // Location and value of the potential minimum over the domain.
    const Eigen::VectorXd& potential_argmin() const { return phi_argmin_; }
    double potential_min() const { return phi_min_; }

    // Exact normalization for gaussians on all of space; computed and cached
    // by engine::normalize otherwise (keyed by the quadrature controls).
    std::optional<ValueWithError> cached_normalization(double rtol, double atol,
                                                       double budget) const;
    void cache_normalization(ValueWithError z, double rtol, double atol,
                             double budget) const;
    bool has_exact_normalization() const;

    // Gaussian accessors (throw for other families).
    const Eigen::VectorXd& gauss_mean() const;
    const Eigen::MatrixXd& gauss_sigma() const;
    const Eigen::MatrixXd& gauss_sigma_inv() const;

    const std::vector<std::vector<double>>& axis_coeffs() const {
        return axis_coeffs_;
    }

  private:
    ContinuousModel() = default;
    void locate_minimum();

    int d_ = 1;
    Family family_ = Family::custom;
    std::string label_;
    Eigen::VectorXd lo_, hi_;

    // gaussian
    Eigen::VectorXd mu_;
    Eigen::MatrixXd sigma_, sigma_inv_;
    double gauss_log_norm_ = 0.0;

    // poly / separable poly: per-axis ascending coefficients + derivatives
    std::vector<std::vector<double>> axis_coeffs_, axis_d1_, axis_d2_;

    // tabulated
    CubicSpline phi_spline_;

    // custom
    std::function<double(const Eigen::VectorXd&)> phi_fn_;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_fn_;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess_fn_;

    Eigen::VectorXd phi_argmin_;
    double phi_min_ = 0.0;

    struct Cache {
        std::optional<ValueWithError> z;
        bool z_exact = false;
        double z_rtol = 0.0, z_atol = 0.0, z_budget = 0.0;
        std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> win;
        double win_budget = 0.0;
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

enum class SupportKind { naturals, finite };

// A pmf on {0..K}: either an exact finite-support family or a truncation of
// a pmf on the naturals (tail mass < tail_eps, then renormalized).
class DiscretePmf {
  public:
    static DiscretePmf poisson(double lambda, double tail_eps = 1e-12);
    static DiscretePmf binomial(int N, double p);
    // probs are renormalized; kind defaults to a truncated-naturals reading.
    static DiscretePmf tabulated(std::vector<double> probs,
                                 SupportKind kind = SupportKind::naturals,
                                 double tail_eps = 0.0);

    SupportKind kind() const { return kind_; }
    int truncation_index() const { return K_; }
    const std::vector<double>& probs() const { return f_; }
    double operator()(int k) const { return f_.at(static_cast<std::size_t>(k)); }
    // Exact family mean for built-ins (lambda, N p); the summed mean for
    // tabulated pmfs. Keeping the analytic value makes the score sequences
    // mean-zero on truncated supports.
    double mean() const { return mean_; }
    double tail_bound() const { return tail_eps_; }
    const std::string& label() const { return label_; }
    bool strictly_positive() const;

    // Construction parameters for emit_config (built-ins only).
    std::optional<double> param_lambda() const { return lambda_; }
    std::optional<double> param_tail_eps() const { return tail_request_; }
    std::optional<std::pair<int, double>> param_binomial() const {
        return np_;
    }

  private:
    DiscretePmf() = default;
    SupportKind kind_ = SupportKind::naturals;
    int K_ = 0;
    std::vector<double> f_;
    double mean_ = 0.0;
    double tail_eps_ = 0.0;
    std::string label_;
    std::optional<double> lambda_;
    std::optional<double> tail_request_;
    std::optional<std::pair<int, double>> np_;
};

using Model = std::variant<ContinuousModel, DiscretePmf>;

// Parse a config document (see README for the schema): exactly one model,
// unknown fields rejected. Continuous models come back normalized.
Model parse_config(const nlohmann::json& doc);
Model parse_config_text(const std::string& text);

// Canonical config for built-in families; parse_config(emit_config(m))
// reproduces m.
nlohmann::json emit_config(const Model& m);

}  // namespace slc
