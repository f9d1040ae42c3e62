#include "doctest.h"

#include "esb3/errors.hpp"
#include "esb3/esbiii.hpp"
#include "esb3/fit.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace esb3;

namespace {

Dataset make(std::vector<double> xs) { return Dataset(std::move(xs), "synthetic", "test"); }

const Params kTruth{0.0, 1.0, 5.0, 0.2, 0.4};

} // namespace

TEST_CASE("loglik examples") {
    const std::vector<double> one{1.0};
    CHECK(loglik({0.0, 1.0, 2.0, 1.0, 0.0}, one) == doctest::Approx(std::log(0.25)).epsilon(1e-15));
    const std::vector<double> copies(7, 1.0);
    CHECK(loglik({0.0, 1.0, 2.0, 1.0, 0.0}, copies) ==
          doctest::Approx(7.0 * std::log(0.25)).epsilon(1e-14));

    const Params row{-0.0061, 0.0770, 2.3826, 0.7786, 0.0533};
    const auto xs = sample(row, 500, 17);
    double direct = 0.0;
    for (double x : xs) {
        direct += log_pdf(row, x);
    }
    CHECK(std::abs(loglik(row, xs) - direct) < 1e-10 * std::abs(direct));
}

TEST_CASE("loglik at a point equal to mu follows the regime limit") {
    const std::vector<double> at_mu{0.0};
    CHECK(loglik({0.0, 1.0, 2.0, 0.25, 0.0}, at_mu) == std::numeric_limits<double>::infinity());
    CHECK(loglik({0.0, 1.0, 5.0, 0.2, 0.0}, at_mu) == doctest::Approx(std::log(0.5)));
    CHECK(loglik({0.0, 1.0, 5.0, 1.0, 0.0}, at_mu) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("standardize_sample uses sign(0) = +1") {
    const std::vector<double> xs{-2.0, 0.0, 3.0};
    const auto s = standardize_sample({0.0, 1.0, 2.0, 1.0, 0.5}, xs);
    CHECK(s.s == std::vector<int>{-1, 1, 1});
    CHECK(s.z[0] == doctest::Approx(4.0));
    CHECK(s.z[1] == 0.0);
    CHECK(s.z[2] == doctest::Approx(2.0));
}

TEST_CASE("score matches finite differences of loglik at 20 random points") {
    std::mt19937_64 gen(404);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    while (checked < 20) {
        const Params truth{u(gen) * 4.0 - 2.0, 0.3 + 2.0 * u(gen), 1.5 + 10.0 * u(gen),
                           0.2 + 2.0 * u(gen), 1.6 * u(gen) - 0.8};
        const auto xs = sample(truth, 60, gen());
        Params p = truth;
        p.mu += 0.2 * (u(gen) - 0.5) * p.sigma;
        p.sigma *= 0.8 + 0.4 * u(gen);
        p.c *= 0.8 + 0.4 * u(gen);
        p.k *= 0.8 + 0.4 * u(gen);
        p.eps = std::clamp(p.eps + 0.2 * (u(gen) - 0.5), -0.95, 0.95);
        // Keep mu away from the kinks at the observations.
        double gap = std::numeric_limits<double>::infinity();
        for (double x : xs) {
            gap = std::min(gap, std::abs(x - p.mu));
        }
        if (gap < 1e-3 * p.sigma) {
            continue;
        }
        ++checked;
        const auto g = score(p, xs);
        const auto along = [&](int i) {
            return [&, i](double t) {
                Params q = p;
                double* fields[] = {&q.mu, &q.sigma, &q.c, &q.k, &q.eps};
                *fields[i] = t;
                return loglik(q, xs);
            };
        };
        const double values[] = {p.mu, p.sigma, p.c, p.k, p.eps};
        const double steps[] = {std::min(1e-4 * p.sigma, 0.25 * gap), 1e-4 * p.sigma, 1e-4 * p.c,
                                1e-4 * p.k, 1e-4};
        for (int i = 0; i < 5; ++i) {
            const double fd = oracle::derivative(along(i), values[i], steps[i]);
            INFO("component " << i << " analytic " << g[i] << " fd " << fd);
            CHECK(oracle::near(g[i], fd, 1e-6));
        }
    }
}

TEST_CASE("k score on a two point dataset") {
    const Params p{0.0, 1.0, 2.0, 0.7, 0.0};
    const std::vector<double> xs{1.0, -2.0};
    const double expected = 2.0 / 0.7 - std::log(2.0) - std::log(1.25);
    CHECK(score(p, xs)[3] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("solve_coordinate: k is the closed form") {
    const auto xs = sample(kTruth, 300, 5);
    std::vector<double> sorted(xs);
    std::sort(sorted.begin(), sorted.end());
    const Params p{0.05, 1.1, 4.0, 0.5, 0.3};
    double sum = 0.0;
    for (double x : xs) {
        sum += log1pexp(-p.c * std::log(standardize(p, x).z));
    }
    const double k = solve_coordinate(p, Coordinate::K, sorted, {});
    CHECK(std::abs(k - 300.0 / sum) < 1e-10);
    Params q = p;
    q.k = k;
    CHECK(std::abs(score(q, xs)[3]) < 1e-8);
}

TEST_CASE("solve_coordinate: sigma on symmetric data is near 1") {
    const Params sym{0.0, 1.0, 5.0, 1.0, 0.0};
    auto xs = sample(sym, 4000, 8);
    std::sort(xs.begin(), xs.end());
    const double s = solve_coordinate(sym, Coordinate::Sigma, xs, {});
    CHECK(std::abs(s - 1.0) < 0.05);
    Params q = sym;
    q.sigma = s;
    CHECK(std::abs(score(q, xs)[1]) < 1e-6 * xs.size());
}

TEST_CASE("solve_coordinate: eps root has zero score") {
    auto xs = sample(kTruth, 1000, 9);
    std::sort(xs.begin(), xs.end());
    Params p = kTruth;
    p.eps = 0.0;
    p.eps = solve_coordinate(p, Coordinate::Eps, xs, {});
    CHECK(std::abs(p.eps - 0.4) < 0.1);
    CHECK(std::abs(score(p, xs)[4]) < 1e-6 * xs.size());
}

TEST_CASE("solve_coordinate: mu shifts with the data") {
    auto xs = sample({0.0, 1.0, 5.0, 1.5, 0.2}, 500, 10);
    std::sort(xs.begin(), xs.end());
    const Params p{0.1, 1.0, 5.0, 1.5, 0.2};
    const double m = solve_coordinate(p, Coordinate::Mu, xs, {});
    std::vector<double> shifted(xs);
    for (double& x : shifted) {
        x += 5.0;
    }
    Params q = p;
    q.mu += 5.0;
    CHECK(std::abs(solve_coordinate(q, Coordinate::Mu, shifted, {}) - (m + 5.0)) < 1e-6);
}

TEST_CASE("moment_init") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> normal;
    std::vector<double> gauss(4001);
    for (double& x : gauss) {
        x = normal(gen);
    }
    const Params g = moment_init(gauss);
    CHECK(std::abs(g.eps) < 0.05);

    std::vector<double> moved(gauss);
    for (double& x : moved) {
        x += 7.0;
    }
    CHECK(moment_init(moved).mu == doctest::Approx(g.mu + 7.0).epsilon(1e-12));

    const auto xs = sample(kTruth, 2000, 1);
    const double init_ll = loglik(moment_init(xs), xs);
    const auto fit = fit_ml(make(xs));
    CHECK(std::abs(init_ll - fit.loglik) <= 0.2 * std::abs(fit.loglik));

    CHECK_THROWS_AS(moment_init(std::vector<double>(19, 1.0)), SmallSample);
}

TEST_CASE("fit_ml rejects small and degenerate samples") {
    CHECK_THROWS_AS(fit_ml(make(std::vector<double>(19, 0.5))), SmallSample);
    CHECK_THROWS_AS(fit_ml(make(std::vector<double>(50, 0.5))), DegenerateData);
    FitConfig bad;
    bad.fixed_c = -1.0;
    CHECK_THROWS_AS(fit_ml(make(sample(kTruth, 50, 2)), bad), DomainError);
}

TEST_CASE("fit_ml recovers the parameters and ascends") {
    const auto xs = sample(kTruth, 2000, 2);
    const auto fit = fit_ml(make(xs));
    const Params& e = fit.params;
    CHECK(std::abs(e.mu) < 0.1);
    CHECK(std::abs(e.sigma - 1.0) < 0.15);
    CHECK(std::abs(e.c - 5.0) < 1.0);
    CHECK(std::abs(e.k - 0.2) < 0.08);
    CHECK(std::abs(e.eps - 0.4) < 0.1);
    CHECK(fit.loglik >= loglik(kTruth, xs));
    CHECK(fit.loglik == doctest::Approx(loglik(e, xs)).epsilon(1e-14));
    CHECK(fit.aic == doctest::Approx(10.0 - 2.0 * fit.loglik));
    for (std::size_t i = 1; i < fit.trace.size(); ++i) {
        CHECK(fit.trace[i].loglik >= fit.trace[i - 1].loglik);
    }
    CHECK((fit.stop_reason == "converged" || fit.stop_reason == "pinned"));
    if (fit.converged) {
        CHECK(fit.score_norm < 1e-5 * 2000);
    }
}

TEST_CASE("fit_ml is affine equivariant and reflects under negation") {
    const auto xs = sample(kTruth, 2000, 4);
    const auto base = fit_ml(make(xs));

    std::vector<double> affine(xs);
    for (double& x : affine) {
        x = 2.0 * x + 3.0;
    }
    const auto moved = fit_ml(make(affine));
    CHECK(oracle::near(moved.params.mu, 2.0 * base.params.mu + 3.0, 1e-6));
    CHECK(oracle::near(moved.params.sigma, 2.0 * base.params.sigma, 1e-6));
    CHECK(oracle::near(moved.params.c, base.params.c, 1e-6));
    CHECK(oracle::near(moved.params.k, base.params.k, 1e-6));
    CHECK(oracle::near(moved.params.eps, base.params.eps, 1e-6));

    std::vector<double> negated(xs);
    for (double& x : negated) {
        x = -x;
    }
    const auto flipped = fit_ml(make(negated));
    CHECK(oracle::near(flipped.params.mu, -base.params.mu, 1e-6));
    CHECK(oracle::near(flipped.params.sigma, base.params.sigma, 1e-6));
    CHECK(oracle::near(flipped.params.c, base.params.c, 1e-6));
    CHECK(oracle::near(flipped.params.k, base.params.k, 1e-6));
    CHECK(oracle::near(flipped.params.eps, -base.params.eps, 1e-6));
}

TEST_CASE("fit_ml with fixed c") {
    const auto xs = sample(kTruth, 1000, 6);
    FitConfig cfg;
    cfg.fixed_c = 4.5;
    const auto fit = fit_ml(make(xs), cfg);
    CHECK(fit.params.c == 4.5);
    CHECK(fit.free_params == 4);
    CHECK(fit.aic == doctest::Approx(8.0 - 2.0 * fit.loglik));
    for (std::size_t i = 1; i < fit.trace.size(); ++i) {
        CHECK(fit.trace[i].loglik >= fit.trace[i - 1].loglik);
    }
}

TEST_CASE("fit_ml from a user start in the c k > 1 regime converges") {
    const Params truth{1.0, 2.0, 4.0, 1.0, -0.3};
    const auto xs = sample(truth, 1500, 12);
    FitConfig cfg;
    cfg.init = Params{0.5, 1.5, 3.0, 1.5, 0.0};
    const auto fit = fit_ml(make(xs), cfg);
    CHECK(fit.converged);
    CHECK(fit.stop_reason == "converged");
    CHECK(fit.score_norm < 1e-5 * 1500);
    CHECK(std::abs(fit.params.eps + 0.3) < 0.1);
    CHECK(fit.loglik >= loglik(truth, xs));
}
