#include <cmath>
#include <random>

#include "doctest.h"
#include "slc/calculus.hpp"
#include "slc/model.hpp"

using namespace slc;

TEST_CASE("polynomial evaluation and derivatives") {
    std::vector<double> c{0.0, 0.0, 0.5, 0.0, 1.0};  // x^2/2 + x^4
    CHECK(poly_eval(c, 2.0) == doctest::Approx(2.0 + 16.0));
    auto d1 = poly_derivative(c);
    CHECK(poly_eval(d1, 2.0) == doctest::Approx(2.0 + 32.0));
    auto d2 = poly_derivative(d1);
    CHECK(poly_eval(d2, 1.0) == doctest::Approx(13.0));

    auto shifted = poly_shift(c, 1.0);  // p(x + 1)
    CHECK(poly_eval(shifted, 0.0) == doctest::Approx(poly_eval(c, 1.0)));
    CHECK(poly_eval(shifted, 2.5) == doctest::Approx(poly_eval(c, 3.5)));
}

TEST_CASE("fd_gradient on simple potentials") {
    auto quad = [](const Eigen::VectorXd& x) { return 0.5 * x[0] * x[0]; };
    Eigen::VectorXd x(1);
    x << 1.0;
    CHECK(fd_gradient(quad, x)[0] == doctest::Approx(1.0).epsilon(1e-10));

    auto quartic = [](const Eigen::VectorXd& x) { return std::pow(x[0], 4); };
    x << 2.0;
    CHECK(fd_gradient(quartic, x)[0] == doctest::Approx(32.0).epsilon(1e-6));
}

TEST_CASE("fd_gradient boundary margin") {
    auto f = [](const Eigen::VectorXd& x) { return x[0] * x[0]; };
    Eigen::VectorXd lo(1), hi(1), x(1);
    lo << 0.0;
    hi << 1.0;
    x << 1.0 - 1e-9;
    CHECK_THROWS_AS(fd_gradient(f, x, 0.0, &lo, &hi), DomainError);
}

TEST_CASE("fd_hessian matches closed forms") {
    // gaussian(0, diag(2,3)): Hessian of phi is diag(1/2, 1/3) everywhere
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd S(2, 2);
    S << 2.0, 0.0, 0.0, 3.0;
    ContinuousModel m = ContinuousModel::gaussian(mu, S);
    auto phi = [&](const Eigen::VectorXd& x) { return m.potential(x); };
    Eigen::VectorXd x(2);
    x << 0.7, -1.3;
    Eigen::MatrixXd H = fd_hessian(phi, x);
    CHECK(H(0, 0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(H(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    CHECK(std::abs(H(0, 1)) < 1e-6);

    auto quartic1 = [](const Eigen::VectorXd& x) {
        return 0.5 * x[0] * x[0] + std::pow(x[0], 4);
    };
    Eigen::VectorXd y(1);
    y << 1.0;
    CHECK(fd_hessian(quartic1, y)(0, 0) == doctest::Approx(13.0).epsilon(1e-5));
    y << 0.0;
    auto half = [](const Eigen::VectorXd& x) { return 0.5 * x[0] * x[0]; };
    CHECK(fd_hessian(half, y)(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("fd_hessian equals Sigma^{-1} for gaussian models at random points") {
    std::mt19937_64 rng(7);
    auto u01 = [&] { return (double(rng() >> 11) + 0.5) * 0x1.0p-53; };
    Eigen::VectorXd mu(2);
    mu << 0.3, -0.2;
    Eigen::MatrixXd S(2, 2);
    S << 2.0, 0.7, 0.7, 1.5;
    ContinuousModel m = ContinuousModel::gaussian(mu, S);
    auto phi = [&](const Eigen::VectorXd& x) { return m.potential(x); };
    const Eigen::MatrixXd expected = m.gauss_sigma_inv();
    for (int it = 0; it < 100; ++it) {
        Eigen::VectorXd x(2);
        x << 4.0 * u01() - 2.0, 4.0 * u01() - 2.0;
        Eigen::MatrixXd H = fd_hessian(phi, x);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(H(i, j) == doctest::Approx(expected(i, j)).epsilon(1e-6));
    }
}

TEST_CASE("nabla: left difference with the boundary convention") {
    std::vector<double> u{1, 3, 6};
    auto du = nabla(std::span<const double>(u));
    CHECK(du == std::vector<double>{1, 2, 3});

    std::vector<double> c{5, 5, 5};
    CHECK(nabla(std::span<const double>(c)) == std::vector<double>{5, 0, 0});

    std::vector<double> empty;
    CHECK_THROWS_AS(nabla(std::span<const double>(empty)), DomainError);
}

TEST_CASE("nabla on the Poisson pmf reproduces 1 - k/lambda") {
    // oracle: f(k-1)/f(k) = k/lambda directly from the mass function
    const double lambda = 3.0;
    DiscretePmf pmf = DiscretePmf::poisson(lambda, 1e-12);
    const auto& f = pmf.probs();
    auto df = nabla(std::span<const double>(f));
    for (int k = 1; k <= 20; ++k) {
        const double oracle = 1.0 - k / lambda;
        CHECK(df[k] / f[k] == doctest::Approx(oracle).epsilon(1e-12));
    }
    CHECK(df[0] / f[0] == doctest::Approx(1.0));
}

TEST_CASE("nabla_star: forward difference, zero-padded tail") {
    std::vector<double> v{3, 5};
    auto dv = nabla_star(std::span<const double>(v));
    CHECK(dv[0] == 2);
    CHECK(dv[1] == -5);

    // v(k) = k: interior entries are 1
    std::vector<double> lin{0, 1, 2, 3, 4};
    auto dl = nabla_star(std::span<const double>(lin));
    for (int k = 0; k + 1 < 5; ++k) CHECK(dl[k] == 1);

    // constant v: interior entries vanish
    std::vector<double> c{2, 2, 2, 2};
    auto dc = nabla_star(std::span<const double>(c));
    for (int k = 0; k + 1 < 4; ++k) CHECK(dc[k] == 0);

    std::vector<double> tiny{1.0};
    CHECK_THROWS_AS(nabla_star(std::span<const double>(tiny)), DomainError);
}

TEST_CASE("summation by parts is exact on integer sequences") {
    // sum (nabla u) v + sum u (nabla* v) = 0, exact in integer arithmetic
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int K = 1 + int(rng() % 8);
        std::vector<long long> u(K + 1), v(K + 1);
        for (int k = 0; k <= K; ++k) {
            u[k] = int(rng() % 41) - 20;
            v[k] = int(rng() % 41) - 20;
        }
        auto du = nabla<long long>(u);
        auto dv = nabla_star<long long>(v);
        long long total = 0;
        for (int k = 0; k <= K; ++k) total += du[k] * v[k] + u[k] * dv[k];
        CHECK(total == 0);
    }
    // the spec's worked example: u = [1,2], v = [3,5]
    std::vector<long long> u{1, 2}, v{3, 5};
    auto du = nabla<long long>(u);
    long long lhs = du[0] * v[0] + du[1] * v[1];
    CHECK(lhs == 8);
    auto dv = nabla_star<long long>(v);
    long long rhs = -(u[0] * dv[0] + u[1] * dv[1]);
    CHECK(rhs == 8);
}

TEST_CASE("nabla_N: direct substitutions") {
    // N=1, h=[a,b]: nabla_1 h(1) = 0*b - 1*a = -a
    std::vector<double> h{4.0, 9.0};
    auto dh = nabla_N(std::span<const double>(h), 1);
    CHECK(dh[0] == 4.0);
    CHECK(dh[1] == -4.0);

    // constant h, N=2: nabla_2 h(1) = (1/2)c - (2/2)c = -c/2
    std::vector<double> c{3.0, 3.0, 3.0};
    auto dc = nabla_N(std::span<const double>(c), 2);
    CHECK(dc[1] == doctest::Approx(-1.5));

    std::vector<double> bad{1.0, 2.0};
    CHECK_THROWS_AS(nabla_N(std::span<const double>(bad), 5), DomainError);
}

TEST_CASE("nabla_N_star: binomial weights and zero last entry") {
    const int N = 10;
    std::vector<double> v(N + 1);
    for (int n = 0; n <= N; ++n) v[n] = n;
    auto dv = nabla_N_star(std::span<const double>(v), N);
    for (int n = 0; n < N; ++n)
        CHECK(dv[n] == doctest::Approx((10.0 - n) / 10.0));
    CHECK(dv[N] == 0.0);

    std::vector<double> c(N + 1, 7.0);
    auto dc = nabla_N_star(std::span<const double>(c), N);
    for (int n = 0; n <= N; ++n) CHECK(dc[n] == 0.0);
}

TEST_CASE("nabla_N_star relates to nabla_star by the (N-n)/N weight") {
    const int N = 7;
    std::mt19937_64 rng(3);
    std::vector<double> v(N + 1);
    for (auto& x : v) x = double(rng() % 100) / 10.0;
    auto a = nabla_N_star(std::span<const double>(v), N);
    auto b = nabla_star(std::span<const double>(v));
    for (int n = 0; n < N; ++n)
        CHECK(a[n] == doctest::Approx((double(N - n) / N) * b[n]));
}

TEST_CASE("nabla_N / nabla_N_star duality is exact on {0..N}") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int N = 2 + int(rng() % 7);
        std::vector<double> h(N + 1), g(N + 1);
        for (int n = 0; n <= N; ++n) {
            h[n] = double(int(rng() % 19) - 9);
            g[n] = double(int(rng() % 19) - 9);
        }
        auto dh = nabla_N(std::span<const double>(h), N);
        auto dg = nabla_N_star(std::span<const double>(g), N);
        double total = 0;
        for (int n = 0; n <= N; ++n) total += dh[n] * g[n] + h[n] * dg[n];
        CHECK(std::abs(total) < 1e-11);
    }
}

TEST_CASE("score_u_continuous") {
    // gaussian(mu, alpha) at matching alpha: u is identically zero
    ContinuousModel g = ContinuousModel::gaussian1(1.5, 2.0);
    auto u = score_u_continuous(g, 2.0, 1.5);
    for (double x : {-3.0, 0.0, 1.5, 4.0}) CHECK(std::abs(u(x)) < 1e-12);

    // gaussian(0,1) with alpha=2: u(x) = -x/2
    ContinuousModel s = ContinuousModel::gaussian1(0.0, 1.0);
    auto u2 = score_u_continuous(s, 2.0, 0.0);
    CHECK(u2(1.0) == doctest::Approx(-0.5));
    CHECK(u2(-2.0) == doctest::Approx(1.0));

    // phi = x^2/2 + x^4, alpha=1, mu=0: u(x) = -4x^3
    ContinuousModel q = ContinuousModel::poly({0.0, 0.0, 0.5, 0.0, 1.0});
    auto u3 = score_u_continuous(q, 1.0, 0.0);
    CHECK(u3(1.0) == doctest::Approx(-4.0));
    CHECK(u3(0.5) == doctest::Approx(-0.5));
}

TEST_CASE("score_u_discrete") {
    // Poisson(lambda) at alpha = mu = lambda: termwise zero
    DiscretePmf p = DiscretePmf::poisson(3.0, 1e-12);
    auto u = score_u_discrete(p, 3.0, 3.0, DiscreteOp::nabla);
    for (double x : u) CHECK(std::abs(x) < 1e-12);

    // Poisson(3), alpha=6: u(k) = 1 - k/3 + (k-3)/6, strictly decreasing
    auto u2 = score_u_discrete(p, 6.0, 3.0, DiscreteOp::nabla);
    for (std::size_t k = 0; k + 1 < u2.size(); ++k) CHECK(u2[k + 1] < u2[k]);
    CHECK(u2[0] == doctest::Approx(1.0 - 0.5).epsilon(1e-12));

    // Binomial(N, p) with alpha = Np under the binomial operator: constant
    DiscretePmf b = DiscretePmf::binomial(10, 0.3);
    auto u3 = score_u_discrete(b, 3.0, b.mean(), DiscreteOp::nabla_N);
    for (double x : u3) CHECK(std::abs(x - u3[0]) < 1e-12);
}

TEST_CASE("TestFunction kinds, derivatives, validation") {
    TestFunction p = TestFunction::poly({0.0, 1.0, 0.0, 0.1});
    CHECK(p(2.0) == doctest::Approx(2.0 + 0.8));
    CHECK(p.deriv(2.0) == doctest::Approx(1.0 + 1.2));
    CHECK_NOTHROW(p.require_strictly_increasing(-5, 5));

    TestFunction cm = TestFunction::centered_monomial(3, 1.0);
    CHECK(cm(3.0) == doctest::Approx(8.0));
    CHECK(cm.deriv(3.0) == doctest::Approx(12.0));
    CHECK(cm.monotone() == Monotonicity::strictly_increasing);
    CHECK_NOTHROW(cm.require_strictly_increasing(-10, 10));

    TestFunction sq = TestFunction::poly({0.0, 0.0, 1.0});
    CHECK_THROWS_AS(sq.require_strictly_increasing(-1, 1), DomainError);
    CHECK_NOTHROW(sq.require_strictly_increasing(0.0, 5.0));

    auto vals = TestFunction::poly({0.0, 2.0}).values_on_support(3);
    CHECK(vals == std::vector<double>{0, 2, 4, 6});
}

TEST_CASE("TestFunction JSON round trip") {
    auto j = nlohmann::json{{"kind", "poly"}, {"coeffs", {0.0, 1.0}},
                            {"monotone", "strict"}};
    TestFunction t = TestFunction::from_json(j);
    CHECK(t.monotone() == Monotonicity::strictly_increasing);
    CHECK(TestFunction::from_json(t.to_json())(2.0) == doctest::Approx(2.0));

    CHECK_THROWS_AS(TestFunction::from_json(nlohmann::json{{"kind", "mystery"}}),
                    ConfigError);
}

TEST_CASE("cubic spline interpolates smooth data") {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 200; ++i) {
        const double x = -3.0 + 6.0 * i / 200;
        xs.push_back(x);
        ys.push_back(std::sin(x));
    }
    CubicSpline s(xs, ys);
    CHECK(s(0.37) == doctest::Approx(std::sin(0.37)).epsilon(1e-6));
    CHECK(s.deriv(0.37) == doctest::Approx(std::cos(0.37)).epsilon(1e-4));
}
