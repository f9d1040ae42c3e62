#include "esb3/gof.hpp"

#include "esb3/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace esb3 {

Dataset::Dataset(std::vector<double> values, std::string label, std::string source)
    : values_(std::move(values)), label_(std::move(label)), source_(std::move(source)) {
    if (values_.empty()) {
        throw DomainError("dataset is empty");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw DomainError("dataset contains a non-finite value");
        }
    }
    sorted_ = values_;
    std::sort(sorted_.begin(), sorted_.end());
}

double ecdf(const Dataset& data, double y) {
    const auto sorted = data.sorted();
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), y) - sorted.begin();
    return static_cast<double>(count) / static_cast<double>(sorted.size());
}

double ks_statistic(const Dataset& data, const RealFn& model_cdf) {
    const auto sorted = data.sorted();
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = model_cdf(sorted[i]);
        const double above = static_cast<double>(i + 1) / n - f;
        const double below = f - static_cast<double>(i) / n;
        d = std::max({d, above, below});
    }
    return std::clamp(d, 0.0, 1.0);
}

double kolmogorov_q(double lambda) {
    if (!(lambda > 0.0)) {
        return 1.0;
    }
    constexpr double kCutoff = 1e-12;
    if (lambda < 1.18) {
        // Jacobi-theta form of the same function; converges fast for small lambda.
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double sum = 0.0;
        for (int j = 1; j < 100; ++j) {
            const double odd = 2.0 * j - 1.0;
            const double term = std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
            sum += term;
            if (term < kCutoff * sum) {
                break;
            }
        }
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j < 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < kCutoff) {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(double d, std::size_t n) {
    if (!(d >= 0.0 && d <= 1.0)) {
        throw DomainError("ks_pvalue: statistic must lie in [0, 1]");
    }
    if (n == 0) {
        throw DomainError("ks_pvalue: n must be at least 1");
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    return kolmogorov_q((root_n + 0.12 + 0.11 / root_n) * d);
}

double aic(double loglik, int free_params) {
    if (free_params < 1) {
        throw DomainError("aic: at least one free parameter");
    }
    return 2.0 * free_params - 2.0 * loglik;
}

GofReport gof_report(const Dataset& data, std::string label, const RealFn& model_cdf,
                     double loglik, int free_params) {
    GofReport r;
    r.n = data.size();
    r.ks_stat = ks_statistic(data, model_cdf);
    r.ks_pvalue = ks_pvalue(r.ks_stat, r.n);
    r.aic = aic(loglik, free_params);
    r.model_label = std::move(label);
    return r;
}

std::vector<RankedModel> compare_models(const Dataset& data,
                                        const std::vector<CandidateFit>& fits) {
    if (fits.empty()) {
        throw DomainError("compare_models: no fits supplied");
    }
    std::vector<GofReport> reports;
    reports.reserve(fits.size());
    for (const auto& fit : fits) {
        reports.push_back(gof_report(data, fit.label, fit.cdf, fit.loglik, fit.free_params));
    }
    std::vector<std::size_t> order(fits.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (reports[a].ks_pvalue != reports[b].ks_pvalue) {
            return reports[a].ks_pvalue > reports[b].ks_pvalue;
        }
        return reports[a].aic < reports[b].aic;
    });
    std::vector<RankedModel> ranked;
    ranked.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        ranked.push_back({static_cast<int>(i + 1), reports[order[i]]});
    }
    return ranked;
}

} // namespace esb3
