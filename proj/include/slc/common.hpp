#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace slc {

// A numeric result together with an absolute error bound.
struct ValueWithError {
    double value = 0.0;
    double error = 0.0;
};

// Compensated (Neumaier) summation; keeps long sums accurate to a few ulps.
class KahanSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline constexpr double kMachineEps = std::numeric_limits<double>::epsilon();
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Margin tolerance used by certification verdicts.
inline constexpr double kCertifyTol = 1e-7;

// Equality-detection threshold for gap reports, relative to alpha.
inline constexpr double kEqualityTol = 1e-6;

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Golden-section minimization on [a, b]; assumes a single local minimum
// inside the bracket. Returns the abscissa of the minimum.
inline double golden_section_min(const std::function<double(double)>& f,
                                 double a, double b, double xtol) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Bisection for f(x) = 0 on [a, b] with f(a), f(b) of opposite sign.
inline double bisect_root(const std::function<double(double)>& f, double a,
                          double b, double xtol) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0))
        throw NumericsError("bisect_root: no sign change on bracket");
    for (int it = 0; it < 200 && b - a > xtol; ++it) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace slc
