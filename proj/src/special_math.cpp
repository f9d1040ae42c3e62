#include "esb3/special_math.hpp"

#include "esb3/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

namespace esb3 {

namespace {

// Godfrey's coefficients for g = 607/128, n = 15.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3, -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5};

double lanczos_ln_gamma(double x) {
    // Valid for x >= 0.5.
    const double xm1 = x - 1.0;
    double sum = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        sum += kLanczos[i] / (xm1 + static_cast<double>(i));
    }
    const double t = xm1 + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t +
           std::log(sum);
}

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

double checked_eval(const RealFn& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
        throw DomainError("integrate: non-finite integrand at x = " + std::to_string(x));
    }
    return v;
}

Panel gauss_kronrod(const RealFn& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = checked_eval(f, center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = checked_eval(f, center - dx) + checked_eval(f, center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) {
            gauss += kWg[j / 2] * sum;
        }
    }
    return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

QuadratureResult integrate_finite(const RealFn& f, double lo, double hi, double tol) {
    constexpr int kMaxPanels = 4000;
    std::priority_queue<Panel> panels;
    Panel first = gauss_kronrod(f, lo, hi);
    double value = first.value;
    double error = first.error;
    panels.push(first);
    int count = 1;
    const auto done = [&] {
        return error <= std::max(tol, 50.0 * std::numeric_limits<double>::epsilon() *
                                          std::abs(value));
    };
    while (!done()) {
        if (count >= kMaxPanels) {
            throw ConvergenceError("integrate: subdivision limit reached, error estimate " +
                                   std::to_string(error));
        }
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            throw ConvergenceError("integrate: panel width at machine resolution");
        }
        panels.pop();
        const Panel left = gauss_kronrod(f, worst.lo, mid);
        const Panel right = gauss_kronrod(f, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    // Re-sum to shed drift from the running updates.
    value = 0.0;
    error = 0.0;
    while (!panels.empty()) {
        value += panels.top().value;
        error += panels.top().error;
        panels.pop();
    }
    return {value, error, count};
}

// exp-sinh rule for the integral of f(anchor + direction * d) over d in (0, inf).
QuadratureResult integrate_half_line(const RealFn& f, double anchor, double direction,
                                     double tol) {
    constexpr double kTMax = 6.7;  // keeps exp(pi/2 sinh t) inside double range
    constexpr int kMaxLevel = 13;
    const double half_pi = 0.5 * std::numbers::pi;

    const auto term = [&](double t) {
        const double d = std::exp(half_pi * std::sinh(t));
        const double weight = half_pi * std::cosh(t) * d;
        const double x = anchor + direction * d;
        if (d == 0.0 || !std::isfinite(weight) || x == anchor) {
            return 0.0;
        }
        const double v = f(x);
        if (!std::isfinite(v)) {
            // Collapsed nodes at the extremes carry no representable mass.
            if (d < 1e-200 || d > 1e200) {
                return 0.0;
            }
            throw DomainError("integrate: non-finite integrand at x = " + std::to_string(x));
        }
        return weight * v;
    };

    double h = 0.5;
    double sum = term(0.0);
    for (int j = 1; j * h <= kTMax; ++j) {
        sum += term(j * h) + term(-j * h);
    }
    double estimate = h * sum;
    for (int level = 1; level <= kMaxLevel; ++level) {
        h *= 0.5;
        for (int j = 1; j * h <= kTMax; j += 2) {
            sum += term(j * h) + term(-j * h);
        }
        const double refined = h * sum;
        const double diff = std::abs(refined - estimate);
        estimate = refined;
        if (level >= 3 &&
            diff <= std::max(tol, 50.0 * std::numeric_limits<double>::epsilon() *
                                      std::abs(refined))) {
            return {refined, diff, level};
        }
    }
    throw ConvergenceError("integrate: double-exponential rule did not settle");
}

} // namespace

double ln_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("ln_gamma: argument must be positive and finite");
    }
    if (x < 0.5) {
        return lanczos_ln_gamma(x + 1.0) - std::log(x);
    }
    return lanczos_ln_gamma(x);
}

double log_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("beta: arguments must be positive");
    }
    return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
}

double beta_fn(double a, double b) { return std::exp(log_beta(a, b)); }

double log1pexp(double t) noexcept {
    if (t > 35.0) {
        return t + std::exp(-t);
    }
    if (t < -35.0) {
        return std::exp(t);
    }
    return std::log1p(std::exp(t));
}

double logistic_complement(double t) noexcept {
    if (t >= 0.0) {
        const double e = std::exp(-t);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(t));
}

QuadratureResult integrate(const RealFn& f, double lo, double hi, double tol) {
    if (!(tol > 0.0)) {
        throw DomainError("integrate: tolerance must be positive");
    }
    if (std::isnan(lo) || std::isnan(hi)) {
        throw DomainError("integrate: NaN limit");
    }
    if (lo == hi) {
        return {0.0, 0.0, 1};
    }
    if (lo > hi) {
        QuadratureResult r = integrate(f, hi, lo, tol);
        r.value = -r.value;
        return r;
    }
    const bool lo_inf = std::isinf(lo);
    const bool hi_inf = std::isinf(hi);
    if (!lo_inf && !hi_inf) {
        return integrate_finite(f, lo, hi, tol);
    }
    if (!lo_inf) {
        return integrate_half_line(f, lo, 1.0, tol);
    }
    if (!hi_inf) {
        return integrate_half_line(f, hi, -1.0, tol);
    }
    const QuadratureResult left = integrate_half_line(f, 0.0, -1.0, 0.5 * tol);
    const QuadratureResult right = integrate_half_line(f, 0.0, 1.0, 0.5 * tol);
    return {left.value + right.value, left.abs_error_estimate + right.abs_error_estimate,
            left.subdivisions + right.subdivisions};
}

RootResult find_root(const RealFn& g, double bracket_lo, double bracket_hi, double tol,
                     int max_iter) {
    double a = bracket_lo;
    double b = bracket_hi;
    double fa = g(a);
    double fb = g(b);
    if (std::isnan(fa) || std::isnan(fb)) {
        throw DomainError("find_root: function is NaN at a bracket end");
    }
    if (std::abs(fa) <= tol) {
        return {a, fa, 0};
    }
    if (std::abs(fb) <= tol) {
        return {b, fb, 0};
    }
    if ((fa > 0.0) == (fb > 0.0)) {
        throw NoBracket("find_root: no sign change on [" + std::to_string(bracket_lo) + ", " +
                        std::to_string(bracket_hi) + "]");
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    for (int iter = 1; iter <= max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + std::numeric_limits<double>::min();
        const double m = 0.5 * (c - b);
        if (std::abs(fb) <= tol || std::abs(m) <= tol1) {
            return {b, fb, iter};
        }
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            const double s = fb / fa;
            double p;
            double q;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) {
                q = -q;
            } else {
                p = -p;
            }
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (m > 0.0 ? tol1 : -tol1);
        fb = g(b);
        if (std::isnan(fb)) {
            throw DomainError("find_root: function is NaN inside the bracket");
        }
    }
    throw ConvergenceError("find_root: iteration limit reached");
}

double finite_diff(const RealFn& f, double x, double h) {
    if (!(h > 0.0)) {
        throw DomainError("finite_diff: step must be positive");
    }
    const double up = f(x + h);
    const double down = f(x - h);
    if (!std::isfinite(up) || !std::isfinite(down)) {
        throw DomainError("finite_diff: non-finite function value");
    }
    return (up - down) / (2.0 * h);
}

LineMaximum golden_section_maximize(const RealFn& f, double lo, double hi, double xtol,
                                    int max_iter) {
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo;
    double b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int iter = 0; iter < max_iter && (b - a) > xtol * (1.0 + std::abs(a) + std::abs(b));
         ++iter) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 >= f2 ? LineMaximum{x1, f1} : LineMaximum{x2, f2};
}

} // namespace esb3
