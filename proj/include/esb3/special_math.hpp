#pragma once

#include <functional>

namespace esb3 {

using RealFn = std::function<double(double)>;

/// Natural log of the gamma function for x > 0 (Lanczos, g = 607/128).
double ln_gamma(double x);

/// log B(a, b) for a, b > 0.
double log_beta(double a, double b);

/// Euler beta function B(a, b). Throws DomainError when a <= 0 or b <= 0.
double beta_fn(double a, double b);

/// log(1 + exp(t)) without overflow.
double log1pexp(double t) noexcept;

/// 1 / (1 + exp(t)) without overflow.
double logistic_complement(double t) noexcept;

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    int subdivisions = 0;
};

/// Integrates f over [lo, hi]; either limit may be +/-infinity.
///
/// Finite ranges use globally adaptive 7/15-point Gauss-Kronrod bisection.
/// Infinite ranges use the exp-sinh double-exponential substitution, which
/// also absorbs an algebraic singularity at the finite endpoint; a doubly
/// infinite range is split at the origin, so integrands with a singular point
/// should be shifted to put it at 0.
///
/// Throws ConvergenceError when the estimate cannot be brought under `tol`
/// and DomainError when f is non-finite at an interior node.
QuadratureResult integrate(const RealFn& f, double lo, double hi, double tol = 1e-9);

struct RootResult {
    double root = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Brent's bracketed root finder. Succeeds when |g(root)| <= tol, or when the
/// bracket has collapsed to adjacent doubles (a sign change with no
/// representable zero, as at a jump); `residual` always reports g(root).
/// Throws NoBracket without a sign change and ConvergenceError on
/// iteration exhaustion.
RootResult find_root(const RealFn& g, double bracket_lo, double bracket_hi,
                     double tol = 1e-10, int max_iter = 300);

/// Central difference (f(x+h) - f(x-h)) / 2h.
double finite_diff(const RealFn& f, double x, double h);

struct LineMaximum {
    double x = 0.0;
    double value = 0.0;
};

/// Golden-section search for a maximum of f on [lo, hi]. Unimodality is not
/// checked; on a multimodal f a local maximum is returned. The endpoints are
/// never evaluated.
LineMaximum golden_section_maximize(const RealFn& f, double lo, double hi,
                                    double xtol = 1e-10, int max_iter = 200);

} // namespace esb3
