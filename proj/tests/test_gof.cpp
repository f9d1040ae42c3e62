#include "doctest.h"

#include "esb3/errors.hpp"
#include "esb3/esbiii.hpp"
#include "esb3/fit.hpp"
#include "esb3/gof.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace esb3;

namespace {

Dataset make(std::vector<double> xs) { return Dataset(std::move(xs), "synthetic", "test"); }

const Params kTruth{0.0, 1.0, 5.0, 0.2, 0.4};

RealFn cdf_of(const Params& p) {
    return [p](double y) { return cdf(p, y); };
}

} // namespace

TEST_CASE("Dataset validates its values") {
    CHECK_THROWS_AS(make({}), DomainError);
    CHECK_THROWS_AS(make({1.0, std::nan("")}), DomainError);
    CHECK_THROWS_AS(make({1.0, std::numeric_limits<double>::infinity()}), DomainError);
    const Dataset d({3.0, 1.0, 2.0}, "x", "inline");
    CHECK(d.sorted()[0] == 1.0);
    CHECK(d.values()[0] == 3.0);
    CHECK(d.label() == "x");
    CHECK(d.source() == "inline");
}

TEST_CASE("ecdf examples") {
    const Dataset d = make({1.0, 2.0, 3.0});
    CHECK(ecdf(d, 0.5) == 0.0);
    CHECK(ecdf(d, 10.0) == 1.0);
    CHECK(ecdf(d, 2.0) == doctest::Approx(2.0 / 3.0));
    CHECK(ecdf(d, 1.999) == doctest::Approx(1.0 / 3.0));
    const Dataset permuted = make({3.0, 1.0, 2.0});
    for (double y : {0.0, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
        CHECK(ecdf(d, y) == ecdf(permuted, y));
    }
}

TEST_CASE("ks_statistic examples") {
    const std::size_t n = 200;
    std::vector<double> xs;
    for (std::size_t i = 1; i <= n; ++i) {
        xs.push_back(quantile(kTruth, (i - 0.5) / n));
    }
    CHECK(ks_statistic(make(xs), cdf_of(kTruth)) == doctest::Approx(0.5 / n).epsilon(1e-9));
    CHECK(ks_statistic(make({0.0}), [](double) { return 0.5; }) == 0.5);

    const auto big = sample(kTruth, 10000, 31);
    CHECK(ks_statistic(make(big), cdf_of(kTruth)) < 0.02);
}

TEST_CASE("ks_statistic is invariant under increasing maps and permutation") {
    auto xs = sample(kTruth, 300, 8);
    const double d = ks_statistic(make(xs), cdf_of(kTruth));
    std::vector<double> mapped;
    for (double x : xs) {
        mapped.push_back(std::atan(x));
    }
    const double d_mapped =
        ks_statistic(make(mapped), [](double y) { return cdf(kTruth, std::tan(y)); });
    CHECK(d_mapped == doctest::Approx(d).epsilon(1e-12));
    std::reverse(xs.begin(), xs.end());
    CHECK(ks_statistic(make(xs), cdf_of(kTruth)) == d);
}

TEST_CASE("kolmogorov_q against reference values") {
    // scipy.special.kolmogorov.
    const std::pair<double, double> table[] = {
        {0.3, 0.9999906941986655}, {0.5, 0.9639452436648751},   {0.8, 0.5441424115741981},
        {1.0, 0.26999967167735456}, {1.18, 0.1234538094297657}, {1.358, 0.05002679733444698},
        {2.0, 0.0006709252557796953}, {3.0, 3.045995948942526e-08},
    };
    for (const auto& [lambda, q] : table) {
        INFO("lambda = " << lambda);
        CHECK(std::abs(kolmogorov_q(lambda) - q) < 1e-11);
    }
    CHECK(kolmogorov_q(1.3580986393225507) == doctest::Approx(0.05).epsilon(1e-9));
    // Both branches agree at the switch point.
    CHECK(std::abs(kolmogorov_q(1.18 - 1e-12) - kolmogorov_q(1.18)) < 1e-11);
}

TEST_CASE("ks_pvalue examples and monotonicity") {
    CHECK(ks_pvalue(0.0, 100) == 1.0);
    CHECK(ks_pvalue(1.0, 10000) < 1e-12);
    const double n = 400.0;
    const double lambda_scale = std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n);
    CHECK(ks_pvalue(1.358 / lambda_scale, 400) == doctest::Approx(0.05).epsilon(1e-3));
    double prev = 1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double p = ks_pvalue(i / 1000.0, 50);
        CHECK(p <= prev);
        CHECK(p >= 0.0);
        prev = p;
    }
    CHECK_THROWS_AS(ks_pvalue(-0.1, 10), DomainError);
    CHECK_THROWS_AS(ks_pvalue(0.1, 0), DomainError);
}

TEST_CASE("ks_pvalue is close to uniform under the null") {
    int below = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const auto xs = sample(kTruth, 500, 1000 + rep);
        if (ks_pvalue(ks_statistic(make(xs), cdf_of(kTruth)), 500) < 0.1) {
            ++below;
        }
    }
    const double fraction = below / 200.0;
    CHECK(fraction >= 0.05);
    CHECK(fraction <= 0.17);
}

TEST_CASE("ks_pvalue detects a wrong scale") {
    const auto xs = sample(kTruth, 500, 3);
    Params wrong = kTruth;
    wrong.sigma = 5.0;
    CHECK(ks_pvalue(ks_statistic(make(xs), cdf_of(wrong)), 500) < 0.01);
}

TEST_CASE("aic examples") {
    CHECK(aic(0.0, 5) == 10.0);
    CHECK(aic(221.24465, 5) == doctest::Approx(-432.4893).epsilon(1e-12));
    CHECK(aic(-10.0, 3) == 26.0);
    CHECK_THROWS_AS(aic(0.0, 0), DomainError);
}

TEST_CASE("gof_report assembles the record") {
    const Dataset d = make(sample(kTruth, 300, 5));
    const double ll = loglik(kTruth, d.values());
    const auto r = gof_report(d, "ESBIII", cdf_of(kTruth), ll, 5);
    CHECK(r.n == 300);
    CHECK(r.model_label == "ESBIII");
    CHECK(r.aic == doctest::Approx(10.0 - 2.0 * ll));
    CHECK(r.ks_pvalue == ks_pvalue(r.ks_stat, 300));
}

TEST_CASE("compare_models ranks and breaks ties") {
    const Dataset d = make(sample(kTruth, 300, 5));
    CHECK_THROWS_AS(compare_models(d, {}), DomainError);
    const CandidateFit only{"only", cdf_of(kTruth), loglik(kTruth, d.values()), 5};
    const auto single = compare_models(d, {only});
    REQUIRE(single.size() == 1);
    CHECK(single[0].rank == 1);

    CandidateFit twin = only;
    twin.label = "twin";
    const auto pair = compare_models(d, {only, twin});
    CHECK(pair[0].report.model_label == "only");
    CHECK(pair[1].report.model_label == "twin");
    CHECK(pair[0].report.ks_stat == pair[1].report.ks_stat);
    CHECK(pair[1].rank == 2);

    // Same p-value: the lower AIC ranks first.
    CandidateFit lean = only;
    lean.label = "lean";
    lean.free_params = 4;
    CHECK(compare_models(d, {only, lean})[0].report.model_label == "lean");
}

TEST_CASE("compare_models puts the generating model first") {
    Params rival = kTruth;
    rival.eps = 0.0;
    int first = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const Dataset d = make(sample(kTruth, 500, 5000 + rep));
        const auto ranked =
            compare_models(d, {{"rival", cdf_of(rival), loglik(rival, d.values()), 5},
                               {"truth", cdf_of(kTruth), loglik(kTruth, d.values()), 5}});
        if (ranked[0].report.model_label == "truth") {
            ++first;
        }
    }
    CHECK(first > 45);
}
