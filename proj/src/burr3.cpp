#include "esb3/burr3.hpp"

#include "esb3/errors.hpp"
#include "esb3/special_math.hpp"

#include <cmath>
#include <limits>

namespace esb3 {

namespace {

void require_positive_z(double z) {
    if (!(z > 0.0)) {
        throw DomainError("burr3: z must be positive");
    }
}

} // namespace

std::string_view to_string(Burr3Shape shape) {
    return shape == Burr3Shape::LShaped ? "L-shaped" : "unimodal";
}

void validate(const Burr3Params& p) {
    if (!(p.c > 0.0) || !std::isfinite(p.c)) {
        throw DomainError("burr3: c must be positive and finite");
    }
    if (!(p.k > 0.0) || !std::isfinite(p.k)) {
        throw DomainError("burr3: k must be positive and finite");
    }
}

double burr3_log_pdf(const Burr3Params& p, double z) {
    validate(p);
    require_positive_z(z);
    if (std::isinf(z)) {
        return -std::numeric_limits<double>::infinity();
    }
    // g(z) = ck z^(ck-1) (1 + z^c)^-(k+1)
    const double lz = std::log(z);
    return std::log(p.c * p.k) + (p.c * p.k - 1.0) * lz - (p.k + 1.0) * log1pexp(p.c * lz);
}

double burr3_pdf(const Burr3Params& p, double z) { return std::exp(burr3_log_pdf(p, z)); }

double burr3_cdf(const Burr3Params& p, double z) {
    validate(p);
    require_positive_z(z);
    return std::exp(-p.k * log1pexp(-p.c * std::log(z)));
}

double burr3_survival(const Burr3Params& p, double z) {
    validate(p);
    require_positive_z(z);
    return -std::expm1(-p.k * log1pexp(-p.c * std::log(z)));
}

double burr3_log_survival(const Burr3Params& p, double z) {
    validate(p);
    require_positive_z(z);
    const double u = -p.c * std::log(z);
    if (u < -30.0) {
        // 1 - (1 + e^u)^-k = k e^u (1 - (k+1) e^u / 2 + O(e^2u))
        return std::log(p.k) + u + std::log1p(-0.5 * (p.k + 1.0) * std::exp(u));
    }
    return std::log(-std::expm1(-p.k * log1pexp(u)));
}

double burr3_quantile(const Burr3Params& p, double u) {
    validate(p);
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError("burr3_quantile: probability must lie in (0, 1)");
    }
    const double inner = std::expm1(-std::log(u) / p.k);
    return std::exp(-std::log(inner) / p.c);
}

double burr3_draw(const Burr3Params& p, Rng& rng) { return burr3_quantile(p, rng.uniform_open()); }

std::vector<double> burr3_sample(const Burr3Params& p, std::size_t n, std::uint64_t seed) {
    validate(p);
    if (n == 0) {
        throw DomainError("burr3_sample: n must be at least 1");
    }
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(burr3_draw(p, rng));
    }
    return out;
}

Burr3Shape burr3_shape_class(const Burr3Params& p) {
    validate(p);
    return p.c * p.k <= 1.0 ? Burr3Shape::LShaped : Burr3Shape::Unimodal;
}

} // namespace esb3
