#include "slc/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace slc {

namespace {

// Kronrod abscissae/weights for the (G7, K15) pair, QUADPACK dqk15 constants.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Gk15Result {
    double integral;
    double abserr;
    double resabs;  // integral of |f|
};

Gk15Result gk15_raw(const std::function<double(double)>& f, double a,
                    double b) {
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    const double dhlgth = std::abs(hlgth);

    double fv1[7], fv2[7];
    const double fc = f(centr);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);

    for (int j = 0; j < 3; ++j) {
        const int jtw = 2 * j + 1;  // Kronrod indices shared with Gauss
        const double absc = hlgth * kXgk[jtw];
        fv1[jtw] = f(centr - absc);
        fv2[jtw] = f(centr + absc);
        const double fsum = fv1[jtw] + fv2[jtw];
        resg += kWg[j] * fsum;
        resk += kWgk[jtw] * fsum;
        resabs += kWgk[jtw] * (std::abs(fv1[jtw]) + std::abs(fv2[jtw]));
    }
    for (int j = 0; j < 4; ++j) {
        const int jtwm1 = 2 * j;
        const double absc = hlgth * kXgk[jtwm1];
        fv1[jtwm1] = f(centr - absc);
        fv2[jtwm1] = f(centr + absc);
        const double fsum = fv1[jtwm1] + fv2[jtwm1];
        resk += kWgk[jtwm1] * fsum;
        resabs += kWgk[jtwm1] * (std::abs(fv1[jtwm1]) + std::abs(fv2[jtwm1]));
    }

    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    resabs *= dhlgth;
    resasc *= dhlgth;
    double abserr = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && abserr != 0.0)
        abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    const double uflow = std::numeric_limits<double>::min();
    if (resabs > uflow / (50.0 * kMachineEps))
        abserr = std::max(kMachineEps * 50.0 * resabs, abserr);

    return {resk * hlgth, abserr, resabs};
}

struct AdaptState {
    const std::function<double(double)>* f;
    double cell_tol_per_width;  // tolerance budget per unit width
    int cells_used = 0;
    int max_cells = 0;
    KahanSum integral;
    KahanSum error;
};

void adapt_recurse(AdaptState& st, double a, double b, const Gk15Result& r,
                   int depth) {
    const double width = b - a;
    if (r.abserr <= st.cell_tol_per_width * width || depth >= 52 ||
        width <= kMachineEps * (std::abs(a) + std::abs(b))) {
        st.integral.add(r.integral);
        st.error.add(r.abserr);
        return;
    }
    if (st.cells_used >= st.max_cells)
        throw NumericsError("quadrature: subdivision budget exhausted");
    st.cells_used += 2;
    const double m = 0.5 * (a + b);
    const Gk15Result left = gk15_raw(*st.f, a, m);
    const Gk15Result right = gk15_raw(*st.f, m, b);
    adapt_recurse(st, a, m, left, depth + 1);
    adapt_recurse(st, m, b, right, depth + 1);
}

}  // namespace

ValueWithError gk15(const std::function<double(double)>& f, double a,
                    double b) {
    const Gk15Result r = gk15_raw(f, a, b);
    return {r.integral, r.abserr};
}

ValueWithError integrate(const std::function<double(double)>& f, double a,
                         double b, const QuadratureSpec& spec) {
    if (!(b > a)) return {0.0, 0.0};
    const Gk15Result whole = gk15_raw(f, a, b);
    const double scale = std::max(std::abs(whole.integral), whole.resabs * 0.1);
    const double tol = std::max(spec.atol, spec.rtol * scale);

    AdaptState st;
    st.f = &f;
    st.cell_tol_per_width = tol / (b - a);
    st.max_cells = spec.max_subdiv;
    adapt_recurse(st, a, b, whole, 0);
    return {st.integral.value(), st.error.value()};
}

namespace {

ValueWithError integrate_box_rec(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, Eigen::VectorXd& x,
    int axis, const QuadratureSpec& spec) {
    const int d = static_cast<int>(lo.size());
    if (axis == d - 1) {
        auto g = [&](double t) {
            x[axis] = t;
            return f(x);
        };
        return integrate(g, lo[axis], hi[axis], spec);
    }
    QuadratureSpec inner = spec;
    inner.rtol = spec.rtol * 0.01;
    inner.atol = spec.atol * 0.01;
    double worst_inner = 0.0;
    auto g = [&](double t) {
        x[axis] = t;
        ValueWithError v = integrate_box_rec(f, lo, hi, x, axis + 1, inner);
        worst_inner = std::max(worst_inner, v.error);
        return v.value;
    };
    ValueWithError outer = integrate(g, lo[axis], hi[axis], spec);
    // Inner estimates are pointwise errors of the outer integrand.
    outer.error += worst_inner * (hi[axis] - lo[axis]);
    return outer;
}

}  // namespace

ValueWithError integrate_box(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
    const QuadratureSpec& spec) {
    const int d = static_cast<int>(lo.size());
    if (d < 1 || d > 3) throw DomainError("integrate_box: dimension must be 1..3");
    Eigen::VectorXd x(d);
    return integrate_box_rec(f, lo, hi, x, 0, spec);
}

}  // namespace slc
