#pragma once

// Epsilon-skew Burr III law on the real line.
//
// The standard member is X = Z U with Z ~ Burr III(c, k) and U taking the
// value 1+eps with probability (1+eps)/2 and -(1-eps) with probability
// (1-eps)/2; the location-scale member is Y = mu + sigma X. Writing
// x = (y - mu)/sigma, s = sign(x) with sign(0) = +1 and
// z = s x / (1 + s eps), the density is
//
//   f(y) = ck / (2 sigma) * z^(ck-1) * (1 + z^c)^-(k+1),
//
// which is evaluated through log z throughout so that c in the tens does
// not overflow.

#include "esb3/burr3.hpp"
#include "esb3/rng.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace esb3 {

struct Params {
    double mu = 0.0;
    double sigma = 1.0;
    double c = 1.0;
    double k = 1.0;
    double eps = 0.0;
};

/// Throws DomainError naming the first violated constraint
/// (sigma > 0, c > 0, k > 0, -1 < eps < 1, all finite).
void validate(const Params& p);

inline Burr3Params base_of(const Params& p) { return {p.c, p.k}; }

/// A point expressed in the standardized coordinate.
struct Standardized {
    double x = 0.0;   // (y - mu) / sigma
    int sign = 1;     // sign(x), with sign(0) = +1
    double z = 0.0;   // s x / (1 + s eps), >= 0
    double log_z = 0.0;
};

Standardized standardize(const Params& p, double y);

/// Density at y = mu, where the formula is a limit. `saturated` marks the
/// c k < 1 case, whose limit is +infinity; `value` then holds DBL_MAX.
struct LocationDensity {
    double value = 0.0;
    bool saturated = false;
    std::string note;
};

LocationDensity density_at_location(const Params& p);

/// log f(y); +/-infinity at y = mu according to the c k regime.
double log_pdf(const Params& p, double y);
double pdf(const Params& p, double y);
double cdf(const Params& p, double y);

/// 1 - F(y), accurate in the right tail.
double survival(const Params& p, double y);

/// log(1 - F(y)) for y > mu, usable far into the tail.
double log_survival(const Params& p, double y);

double quantile(const Params& p, double prob);

double draw(const Params& p, Rng& rng);
std::vector<double> sample(const Params& p, std::size_t n, std::uint64_t seed);

struct MomentSpec {
    int r = 1;
};

/// E[X^r] of the standard member (mu and sigma are ignored).
/// Throws MomentDoesNotExist when c <= r.
double raw_moment(const Params& p, MomentSpec spec);

double mean(const Params& p);
double variance(const Params& p);

enum class KurtosisConvention { StandardizedFourthMoment, Excess };

/// Point the third and fourth moments are taken about. `Location` uses
/// E[X^3]/E[X^2]^{3/2} and E[X^4]/E[X^2]^2 of the standard member (moments
/// about mu); `Mean` is the usual central definition. The two agree at eps = 0.
enum class MomentReference { Location, Mean };

std::string_view to_string(KurtosisConvention convention);
std::string_view to_string(MomentReference reference);

struct ShapeStats {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
    KurtosisConvention convention = KurtosisConvention::StandardizedFourthMoment;
    MomentReference reference = MomentReference::Location;
};

/// Requires c > 4. The default reference reproduces the standard
/// skewness/kurtosis table for this family.
ShapeStats shape_stats(const Params& p, MomentReference reference = MomentReference::Location,
                       KurtosisConvention convention = KurtosisConvention::StandardizedFourthMoment);

struct CfSpec {
    double t = 0.0;
    int terms = 1;
};

/// Partial sum r = 0..terms of the moment series of E[exp(itY)].
/// Requires 1 <= terms <= floor(c) - 1.
std::complex<double> cf_partial_sum(const Params& p, CfSpec spec);

struct EntropySpec {
    double alpha = 2.0;
};

/// Negative-side (I1) and positive-side (I2) contributions to the integral
/// of f^alpha for the standard member. Each side reduces to
/// (1 -/+ eps) (ck/2)^alpha B(a, b) / c with a = alpha(1 + 1/c) - 1/c and
/// b = alpha(k + 1) - a; both carry +c in the denominator.
struct RenyiIntegrals {
    double negative_side = 0.0;
    double positive_side = 0.0;
};

RenyiIntegrals renyi_integrals(const Params& p, EntropySpec spec);

/// Renyi entropy of the standard member (mu and sigma are ignored).
/// Throws DomainError when alpha <= 0, alpha == 1 or the integral diverges.
double renyi_entropy(const Params& p, EntropySpec spec);

enum class ModeStructure { SkewUnimodal, SkewBimodal };

std::string_view to_string(ModeStructure m);

/// SkewBimodal iff c k > 1 (the boundary c k = 1 is unimodal).
ModeStructure mode_structure(const Params& p);

} // namespace esb3
