#pragma once

#include "esb3/rng.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace esb3 {

/// Burr type III law on (0, inf): G(z) = (1 + z^-c)^-k.
struct Burr3Params {
    double c = 1.0;
    double k = 1.0;
};

enum class Burr3Shape { LShaped, Unimodal };

std::string_view to_string(Burr3Shape shape);

/// Throws DomainError unless c > 0 and k > 0 (both finite).
void validate(const Burr3Params& p);

/// log g(z) for z > 0, computed from log z so large c does not overflow.
double burr3_log_pdf(const Burr3Params& p, double z);

double burr3_pdf(const Burr3Params& p, double z);
double burr3_cdf(const Burr3Params& p, double z);

/// 1 - G(z), accurate in the far right tail.
double burr3_survival(const Burr3Params& p, double z);

/// log(1 - G(z)).
double burr3_log_survival(const Burr3Params& p, double z);

/// (u^{-1/k} - 1)^{-1/c}.
double burr3_quantile(const Burr3Params& p, double u);

/// Inverse-transform draws; one uniform per value.
std::vector<double> burr3_sample(const Burr3Params& p, std::size_t n, std::uint64_t seed);
double burr3_draw(const Burr3Params& p, Rng& rng);

/// LShaped iff c*k <= 1.
Burr3Shape burr3_shape_class(const Burr3Params& p);

} // namespace esb3
