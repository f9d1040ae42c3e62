#pragma once

#include "esb3/dataset.hpp"
#include "esb3/special_math.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace esb3 {

inline constexpr std::string_view kKsPvalueMethod =
    "asymptotic Kolmogorov series Q(lambda), lambda = (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D";
inline constexpr std::string_view kKsEstimatedParamsCaveat =
    "p-values computed with parameters estimated from the same data are optimistic";
inline constexpr std::string_view kAicFormula = "AIC = 2 * free_params - 2 * loglik";

/// Fraction of observations <= y.
double ecdf(const Dataset& data, double y);

/// Two-sided Kolmogorov-Smirnov distance sup |F_n - F|.
double ks_statistic(const Dataset& data, const RealFn& model_cdf);

/// Kolmogorov tail probability Q(lambda) with the Stephens small-sample
/// factor; clipped to [0, 1].
double ks_pvalue(double d, std::size_t n);

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(j-1) exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

double aic(double loglik, int free_params);

struct GofReport {
    double ks_stat = 0.0;
    double ks_pvalue = 0.0;
    double aic = 0.0;
    std::size_t n = 0;
    std::string model_label;
};

GofReport gof_report(const Dataset& data, std::string label, const RealFn& model_cdf,
                     double loglik, int free_params);

/// A fitted model supplied for comparison; competitors can be fitted
/// elsewhere and passed in through their CDF and log-likelihood.
struct CandidateFit {
    std::string label;
    RealFn cdf;
    double loglik = 0.0;
    int free_params = 1;
};

struct RankedModel {
    int rank = 0;
    GofReport report;
};

/// Ranks by descending KS p-value, ties by ascending AIC, then input order.
std::vector<RankedModel> compare_models(const Dataset& data,
                                        const std::vector<CandidateFit>& fits);

} // namespace esb3
