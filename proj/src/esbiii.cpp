#include "esb3/esbiii.hpp"

#include "esb3/errors.hpp"
#include "esb3/special_math.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace esb3 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Burr III quantile from log u, keeping precision when u is close to 1.
double burr3_quantile_from_log(const Params& p, double log_u) {
    return std::exp(-std::log(std::expm1(-log_u / p.k)) / p.c);
}

void require_moment(const Params& p, int r) {
    if (!(p.c > static_cast<double>(r))) {
        throw MomentDoesNotExist("moment of order " + std::to_string(r) +
                                 " requires c > " + std::to_string(r));
    }
}

} // namespace

void validate(const Params& p) {
    if (!std::isfinite(p.mu)) {
        throw DomainError("mu must be finite");
    }
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
        throw DomainError("sigma must be positive and finite");
    }
    if (!(p.c > 0.0) || !std::isfinite(p.c)) {
        throw DomainError("c must be positive and finite");
    }
    if (!(p.k > 0.0) || !std::isfinite(p.k)) {
        throw DomainError("k must be positive and finite");
    }
    if (!(p.eps > -1.0 && p.eps < 1.0)) {
        throw DomainError("eps must lie in (-1, 1)");
    }
}

Standardized standardize(const Params& p, double y) {
    Standardized s;
    s.x = (y - p.mu) / p.sigma;
    s.sign = s.x >= 0.0 ? 1 : -1;
    s.z = s.sign * s.x / (1.0 + s.sign * p.eps);
    s.log_z = std::log(s.z);
    return s;
}

LocationDensity density_at_location(const Params& p) {
    validate(p);
    const double ck = p.c * p.k;
    if (ck > 1.0) {
        return {0.0, false, "ck > 1: density vanishes at the location"};
    }
    if (ck == 1.0) {
        return {1.0 / (2.0 * p.sigma), false, "ck = 1: finite two-sided limit"};
    }
    return {std::numeric_limits<double>::max(), true,
            "ck < 1: density diverges at the location; saturated"};
}

double log_pdf(const Params& p, double y) {
    validate(p);
    const Standardized s = standardize(p, y);
    const double ck = p.c * p.k;
    const double log_norm = std::log(ck / (2.0 * p.sigma));
    if (s.z == 0.0) {
        if (ck > 1.0) {
            return -kInf;
        }
        return ck == 1.0 ? log_norm : kInf;
    }
    if (std::isinf(s.z)) {
        return -kInf;
    }
    return log_norm + (ck - 1.0) * s.log_z - (p.k + 1.0) * log1pexp(p.c * s.log_z);
}

double pdf(const Params& p, double y) {
    validate(p);
    if (y == p.mu) {
        return density_at_location(p).value;
    }
    return std::exp(log_pdf(p, y));
}

double cdf(const Params& p, double y) {
    validate(p);
    if (y == -kInf) {
        return 0.0;
    }
    if (y == kInf) {
        return 1.0;
    }
    const Standardized s = standardize(p, y);
    const double left_mass = 0.5 * (1.0 - p.eps);
    if (s.z == 0.0) {
        return left_mass;
    }
    const Burr3Params b = base_of(p);
    if (s.sign > 0) {
        return left_mass + 0.5 * (1.0 + p.eps) * burr3_cdf(b, s.z);
    }
    return left_mass * burr3_survival(b, s.z);
}

double survival(const Params& p, double y) {
    validate(p);
    if (y == -kInf) {
        return 1.0;
    }
    if (y == kInf) {
        return 0.0;
    }
    const Standardized s = standardize(p, y);
    const double left_mass = 0.5 * (1.0 - p.eps);
    if (s.z == 0.0) {
        return 1.0 - left_mass;
    }
    const Burr3Params b = base_of(p);
    if (s.sign > 0) {
        return 0.5 * (1.0 + p.eps) * burr3_survival(b, s.z);
    }
    return 1.0 - left_mass * burr3_survival(b, s.z);
}

double log_survival(const Params& p, double y) {
    validate(p);
    const Standardized s = standardize(p, y);
    if (s.sign > 0 && s.z > 0.0) {
        return std::log(0.5 * (1.0 + p.eps)) + burr3_log_survival(base_of(p), s.z);
    }
    return std::log(survival(p, y));
}

double quantile(const Params& p, double prob) {
    validate(p);
    if (!(prob > 0.0 && prob < 1.0)) {
        throw DomainError("quantile: probability must lie in (0, 1)");
    }
    const double left_mass = 0.5 * (1.0 - p.eps);
    double x = 0.0;
    if (prob < left_mass) {
        // Negative branch: G(-x/(1-eps)) = 1 - 2 prob / (1 - eps).
        const double ratio = 2.0 * prob / (1.0 - p.eps);
        const double log_v =
            ratio < 0.5 ? std::log1p(-ratio) : std::log((1.0 - p.eps - 2.0 * prob) / (1.0 - p.eps));
        x = -(1.0 - p.eps) * burr3_quantile_from_log(p, log_v);
    } else {
        // Positive branch: G(x/(1+eps)) = (2 prob - (1 - eps)) / (1 + eps).
        const double u = (2.0 * prob - (1.0 - p.eps)) / (1.0 + p.eps);
        if (u > 0.0) {
            const double log_u =
                u < 0.5 ? std::log(u) : std::log1p(-2.0 * (1.0 - prob) / (1.0 + p.eps));
            x = (1.0 + p.eps) * burr3_quantile_from_log(p, log_u);
        }
    }
    return p.mu + p.sigma * x;
}

double draw(const Params& p, Rng& rng) {
    const double z = burr3_draw(base_of(p), rng);
    const double u = rng.uniform_open();
    const double scale = u < 0.5 * (1.0 + p.eps) ? (1.0 + p.eps) : -(1.0 - p.eps);
    return p.mu + p.sigma * z * scale;
}

std::vector<double> sample(const Params& p, std::size_t n, std::uint64_t seed) {
    validate(p);
    if (n == 0) {
        throw DomainError("sample: n must be at least 1");
    }
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(draw(p, rng));
    }
    return out;
}

double raw_moment(const Params& p, MomentSpec spec) {
    validate(p);
    if (spec.r < 1) {
        throw DomainError("raw_moment: order must be at least 1");
    }
    require_moment(p, spec.r);
    const double r = spec.r;
    const double sign = (spec.r % 2 == 0) ? 1.0 : -1.0;
    const double bracket =
        std::pow(1.0 + p.eps, r + 1.0) + sign * std::pow(1.0 - p.eps, r + 1.0);
    return 0.5 * p.k * beta_fn(1.0 - r / p.c, r / p.c + p.k) * bracket;
}

double mean(const Params& p) {
    validate(p);
    require_moment(p, 1);
    // (k/2) B(1 - 1/c, 1/c + k) 4 eps
    return p.mu + p.sigma * 2.0 * p.k * beta_fn(1.0 - 1.0 / p.c, 1.0 / p.c + p.k) * p.eps;
}

double variance(const Params& p) {
    validate(p);
    require_moment(p, 2);
    const double b1 = beta_fn(1.0 - 1.0 / p.c, 1.0 / p.c + p.k);
    const double b2 = beta_fn(1.0 - 2.0 / p.c, 2.0 / p.c + p.k);
    const double e2 = p.eps * p.eps;
    const double standard = 0.5 * p.k * b2 * (2.0 + 6.0 * e2) - p.k * p.k * b1 * b1 * 4.0 * e2;
    return p.sigma * p.sigma * standard;
}

std::string_view to_string(KurtosisConvention convention) {
    return convention == KurtosisConvention::Excess ? "excess" : "standardized-fourth-moment";
}

std::string_view to_string(MomentReference reference) {
    return reference == MomentReference::Location ? "about-location" : "about-mean";
}

ShapeStats shape_stats(const Params& p, MomentReference reference,
                       KurtosisConvention convention) {
    validate(p);
    require_moment(p, 4);
    const double m1 = raw_moment(p, {1});
    const double m2 = raw_moment(p, {2});
    const double m3 = raw_moment(p, {3});
    const double m4 = raw_moment(p, {4});

    ShapeStats out;
    out.mean = p.mu + p.sigma * m1;
    out.variance = p.sigma * p.sigma * (m2 - m1 * m1);
    out.convention = convention;
    out.reference = reference;
    if (reference == MomentReference::Location) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.kurtosis = m4 / (m2 * m2);
    } else {
        const double var = m2 - m1 * m1;
        const double c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1;
        const double c4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
        out.skewness = c3 / std::pow(var, 1.5);
        out.kurtosis = c4 / (var * var);
    }
    if (convention == KurtosisConvention::Excess) {
        out.kurtosis -= 3.0;
    }
    return out;
}

std::complex<double> cf_partial_sum(const Params& p, CfSpec spec) {
    validate(p);
    if (spec.terms < 1) {
        throw DomainError("cf_partial_sum: at least one term is required");
    }
    if (static_cast<double>(spec.terms) > std::floor(p.c) - 1.0) {
        throw DomainError("cf_partial_sum: terms must not exceed floor(c) - 1");
    }
    const std::complex<double> its(0.0, spec.t * p.sigma);
    std::complex<double> power(1.0, 0.0);
    std::complex<double> sum(1.0, 0.0);  // r = 0 term
    double factorial = 1.0;
    for (int r = 1; r <= spec.terms; ++r) {
        power *= its;
        factorial *= r;
        sum += power / factorial * raw_moment(p, {r});
    }
    return std::exp(std::complex<double>(0.0, spec.t * p.mu)) * sum;
}

RenyiIntegrals renyi_integrals(const Params& p, EntropySpec spec) {
    validate(p);
    const double alpha = spec.alpha;
    if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
        throw DomainError("renyi: alpha must be positive and different from 1");
    }
    const double a = alpha * (1.0 + 1.0 / p.c) - 1.0 / p.c;
    const double b = alpha * (p.k + 1.0) - a;
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("renyi: integral of f^alpha diverges for this alpha");
    }
    const double log_common =
        alpha * std::log(0.5 * p.c * p.k) + log_beta(a, b) - std::log(p.c);
    return {(1.0 - p.eps) * std::exp(log_common), (1.0 + p.eps) * std::exp(log_common)};
}

double renyi_entropy(const Params& p, EntropySpec spec) {
    const RenyiIntegrals parts = renyi_integrals(p, spec);
    return std::log(parts.negative_side + parts.positive_side) / (1.0 - spec.alpha);
}

std::string_view to_string(ModeStructure m) {
    return m == ModeStructure::SkewBimodal ? "skew-bimodal" : "skew-unimodal";
}

ModeStructure mode_structure(const Params& p) {
    validate(p);
    return p.c * p.k > 1.0 ? ModeStructure::SkewBimodal : ModeStructure::SkewUnimodal;
}

} // namespace esb3
