#pragma once

// Maximum-likelihood estimation of (mu, sigma, c, k, eps) by cyclic
// coordinate updates: each pass solves one score equation for one parameter
// with the other four held fixed, in the order mu, sigma, c, k, eps.

#include "esb3/dataset.hpp"
#include "esb3/esbiii.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace esb3 {

enum class Coordinate { Mu, Sigma, C, K, Eps };

std::string_view to_string(Coordinate which);

inline constexpr std::array<Coordinate, 5> kCoordinateOrder = {
    Coordinate::Mu, Coordinate::Sigma, Coordinate::C, Coordinate::K, Coordinate::Eps};

/// Smallest distance (in units of sigma) the fitter lets mu come to an
/// observation, so the singular c k < 1 density cannot produce a spike
/// solution; also the offset used when mu coincides with an observation.
inline constexpr double kLocationNudge = 1e-8;

inline constexpr std::size_t kMinFitSample = 20;

struct FitConfig {
    int max_cycles = 500;
    /// Largest change per cycle, relative (|dmu|/sigma, |dsigma|/sigma,
    /// |dc|/c, |dk|/k, |deps|).
    double param_tol = 1e-6;
    /// Bound on score_norm; unset means 1e-5 * n.
    std::optional<double> score_tol;
    /// Starting point; unset means moment_init.
    std::optional<Params> init;
    /// Holds c at this value and counts 4 free parameters.
    std::optional<double> fixed_c;
};

/// Per-observation signs and standardized magnitudes.
struct StandardizedSample {
    std::vector<int> s;
    std::vector<double> z;
};

StandardizedSample standardize_sample(const Params& p, std::span<const double> data);

struct TracePoint {
    int cycle = 0;
    double loglik = 0.0;
};

struct FitResult {
    Params params;
    double loglik = 0.0;
    double aic = 0.0;
    int free_params = 5;
    bool converged = false;
    /// "converged"; "pinned" (c k < 1 and mu held kLocationNudge * sigma
    /// from an observation, where the likelihood is unbounded, with the other
    /// four score components below tolerance); "stalled" (parameters stopped
    /// moving without either); or "max_cycles". Except after "max_cycles",
    /// the cycles are followed by safeguarded Newton steps on the free
    /// parameters (mu excluded when pinned).
    std::string stop_reason;
    int cycles = 0;
    double score_norm = 0.0;
    /// Loglik after each cycle, starting from cycle 0 (the initial point); a
    /// last point with the final cycle number is added when the Newton steps
    /// raise it.
    std::vector<TracePoint> trace;
};

/// Sum of log f(x_i). A point equal to mu uses sign(0) = +1 and the
/// regime limit of the density, so the result can be +/-infinity.
double loglik(const Params& p, std::span<const double> data);

/// d loglik / d(mu, sigma, c, k, eps). Observations equal to mu are
/// evaluated with mu moved up by kLocationNudge * sigma.
std::array<double, 5> score(const Params& p, std::span<const double> data);

/// Euclidean norm of (sigma dl/dmu, sigma dl/dsigma, dl/dc, dl/dk, dl/deps),
/// which is unchanged by affine maps of the data.
double score_norm(const Params& p, std::span<const double> data);

/// Root of one score equation with the other parameters held at `p`.
/// mu: the smooth score root is located between adjacent order statistics
/// and the best root on either side of the straddled observation is kept.
/// sigma and eps: unique roots. c: root of the c-equation with k tied to its
/// closed form. k: closed form n / sum log(1 + z^-c).
/// Throws NoBracket when no sign change can be found.
double solve_coordinate(const Params& p, Coordinate which, std::span<const double> sorted_data,
                        const FitConfig& cfg);

/// Starting values: location from the median corrected for the skew implied
/// by each candidate (c, k), scale from the interquartile range matched to
/// the candidate's, eps from the fraction of points below that location;
/// the (c, k) pair with the highest likelihood is kept.
Params moment_init(std::span<const double> data);

/// Throws SmallSample (n < 20) or DegenerateData.
FitResult fit_ml(const Dataset& data, const FitConfig& cfg = {});

} // namespace esb3
