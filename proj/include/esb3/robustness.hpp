#pragma once

// Score functions of a single standardized observation and the robustness
// diagnostics built on them.
//
// The psi functions are the per-observation derivatives of log f with
// respect to (mu, sigma, c, k, eps) at mu = 0, sigma = 1, written in the
// form they are usually quoted in:
//   psi_mu    = [(c+1) - c(k+1) w] / x
//   psi_sigma = c - c(k+1) w
//   psi_c     = 1/c - log z + (k+1) w log z
//   psi_k     = 1/k - log(1 + z^-c)
//   psi_eps   = s [(c+1) - c(k+1) w] / (1 + s eps)
// with w = 1/(1 + z^c). They equal minus the derivative of rho = -log f;
// boundedness, limits and redescent are unaffected by that sign.

#include "esb3/esbiii.hpp"
#include "esb3/fit.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace esb3 {

/// Evaluates psi at the standardized point x (x != 0); mu and sigma of `p`
/// are ignored.
double psi(const Params& p, Coordinate which, double x);

/// One-sided limit of a psi function as x -> +inf or x -> -inf.
struct SideLimit {
    bool finite = true;
    double value = 0.0;  // the limit when finite, otherwise +/-inf
};

struct LimitDescriptor {
    SideLimit plus;
    SideLimit minus;
    bool bounded() const { return plus.finite && minus.finite; }
};

/// Closed-form limits: mu -> 0, sigma -> c, c unbounded (-log z dominates),
/// k -> 1/k, eps -> +(c+1)/(1+eps) and -(c+1)/(1-eps).
std::map<Coordinate, LimitDescriptor> psi_limits(const Params& p);

/// psi evaluated at |x| in {1e4, 1e6, 1e8} on both sides.
struct ProbeRow {
    double x = 0.0;
    std::array<double, 5> psi{};
};

std::vector<ProbeRow> psi_probe_table(const Params& p);

/// Numeric boundedness: the increment between 1e6 and 1e8 is at most half the
/// increment between 1e4 and 1e6 (or both are below 1e-9), on both sides.
bool psi_probe_bounded(const Params& p, Coordinate which);

struct RedescendPoint {
    std::optional<double> x0;
    std::string reason;  // why x0 is absent; empty when present
};

/// Positive-branch critical point of psi_mu. The closed form
///   x0 = (1/a) [(-c^2k - c^2 - ck + c + 2 + sqrt(D)) / (2(ck - 1))]^(-1/c),
///   D  = c^4k^2 + 2c^4k + 2c^3k^2 + c^4 + c^2k^2 - 2c^3 - 2c^2k - 3c^2,
///   a  = 1/(1 + eps),
/// is evaluated in the rationalized form z0^c = (B + sqrt(D)) / (2(c+1)) with
/// B = c^2k + c^2 + ck - c - 2, identical wherever the former is defined and
/// continuous through ck = 1. Absent when D < 0 or z0 <= 0.
RedescendPoint redescend_point(const Params& p);

/// The four Huber-type conditions on rho = -log f.
struct RhoConditions {
    bool rho_zero_at_origin = false;       // rho(0) = 0
    bool rho_diverges = false;             // rho(x) -> inf as |x| -> inf
    bool rho_sublinear = false;            // rho(x)/|x| -> 0
    bool psi_redescending = false;         // holds for psi_mu only
};

RhoConditions rho_conditions(const Params& p);

struct TailProbe {
    double x = 0.0;
    double log_value = 0.0;  // lambda x + log(1 - F(x))
};

struct HeavyTailCheck {
    bool heavy = false;
    double lambda = 0.0;
    std::vector<TailProbe> probes;
};

/// Evaluates lambda x + log F-bar(x) at x = x_start * {1, 10, 100, 1000},
/// with x_start the first power of ten >= 10 at which lambda x - c log x
/// rises over a decade (9 lambda x > c ln 10); for small c/lambda that is 10.
/// heavy = strictly increasing.
HeavyTailCheck heavy_tail_check(const Params& p, double lambda);

/// Minus the log-log slope of F-bar between x_lo and x_hi (standardized).
double tail_index_estimate(const Params& p, double x_lo = 1e3, double x_hi = 1e5);

struct ScoreReport {
    std::map<Coordinate, LimitDescriptor> limits;
    std::map<Coordinate, bool> bounded;        // analytic verdicts
    std::map<Coordinate, bool> probe_bounded;  // numeric verdicts
    std::vector<std::string> conflicts;        // analytic vs numeric disagreements
    std::vector<ProbeRow> probes;
    RedescendPoint redescend;
    RhoConditions rho;
    HeavyTailCheck tail;
    double tail_index = 0.0;
};

ScoreReport diagnose(const Params& p, double lambda = 0.1);

} // namespace esb3
