#include "doctest.h"

#include "esb3/errors.hpp"
#include "esb3/esbiii.hpp"
#include "esb3/robustness.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace esb3;

namespace {

// d/dtheta log f(x) at mu = 0, sigma = 1.
double log_density_slope(const Params& shape, Coordinate which, double x) {
    Params base{0.0, 1.0, shape.c, shape.k, shape.eps};
    const auto along = [&](double t) {
        Params q = base;
        switch (which) {
        case Coordinate::Mu: q.mu = t; break;
        case Coordinate::Sigma: q.sigma = t; break;
        case Coordinate::C: q.c = t; break;
        case Coordinate::K: q.k = t; break;
        case Coordinate::Eps: q.eps = t; break;
        }
        return log_pdf(q, x);
    };
    const double at[] = {0.0, 1.0, shape.c, shape.k, shape.eps};
    const double value = at[static_cast<int>(which)];
    double h = 1e-4 * std::max(std::abs(value), 1e-2);
    if (which == Coordinate::Mu) {
        h = 1e-4 * std::min(1.0, std::abs(x));
    }
    return oracle::derivative(along, value, h);
}

} // namespace

TEST_CASE("psi examples") {
    const Params p{0.0, 1.0, 2.0, 1.0, 0.0};
    CHECK(psi(p, Coordinate::K, 1.0) == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-15));
    CHECK(std::abs(psi(p, Coordinate::Sigma, 1e8) - 2.0) < 1e-6);
    CHECK_THROWS_AS(psi(p, Coordinate::Mu, 0.0), DomainError);
    CHECK_THROWS_AS(psi(p, Coordinate::Mu, std::nan("")), DomainError);
}

TEST_CASE("psi matches finite differences of log f at 20 random points") {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const Params p{0.0, 1.0, 1.5 + 10.0 * u(gen), 0.2 + 3.0 * u(gen), 1.6 * u(gen) - 0.8};
        const double x = (u(gen) < 0.5 ? -1.0 : 1.0) * std::pow(10.0, 2.5 * u(gen) - 1.0);
        for (Coordinate which : kCoordinateOrder) {
            const double analytic = psi(p, which, x);
            const double fd = log_density_slope(p, which, x);
            INFO(to_string(which) << " at x = " << x << ": " << analytic << " vs " << fd);
            CHECK(oracle::near(analytic, fd, 1e-6));
        }
    }
}

TEST_CASE("psi_limits examples") {
    const auto a = psi_limits({0.0, 1.0, 2.0, 1.0, 0.0});
    CHECK(a.at(Coordinate::Mu).plus.value == 0.0);
    CHECK(a.at(Coordinate::Mu).minus.value == 0.0);
    CHECK(a.at(Coordinate::Sigma).plus.value == 2.0);
    CHECK(a.at(Coordinate::Sigma).minus.value == 2.0);
    CHECK_FALSE(a.at(Coordinate::C).bounded());
    CHECK(a.at(Coordinate::K).plus.value == 1.0);
    CHECK(a.at(Coordinate::Eps).plus.value == doctest::Approx(3.0));
    CHECK(a.at(Coordinate::Eps).minus.value == doctest::Approx(-3.0));
    for (Coordinate which : {Coordinate::Mu, Coordinate::Sigma, Coordinate::K, Coordinate::Eps}) {
        CHECK(a.at(which).bounded());
    }

    const auto b = psi_limits({0.0, 1.0, 5.0, 0.2, 0.5});
    CHECK(b.at(Coordinate::K).plus.value == doctest::Approx(5.0));
    CHECK(b.at(Coordinate::Eps).plus.value == doctest::Approx(4.0));
    CHECK(b.at(Coordinate::Eps).minus.value == doctest::Approx(-12.0));
}

TEST_CASE("finite limits agree with probes at 1e8") {
    for (const Params p : {Params{0, 1, 2.0, 1.0, 0.0}, Params{0, 1, 5.0, 0.2, 0.5},
                           Params{0, 1, 3.0, 2.0, -0.4}, Params{0, 1, 10.0, 0.5, 0.8},
                           Params{0, 1, 20.0, 0.2, -0.7}}) {
        const auto limits = psi_limits(p);
        for (Coordinate which : kCoordinateOrder) {
            const auto& lim = limits.at(which);
            if (!lim.bounded()) {
                continue;
            }
            INFO(to_string(which));
            CHECK(std::abs(psi(p, which, 1e8) - lim.plus.value) < 1e-6);
            CHECK(std::abs(psi(p, which, -1e8) - lim.minus.value) < 1e-6);
            CHECK(psi_probe_bounded(p, which));
        }
        CHECK_FALSE(psi_probe_bounded(p, Coordinate::C));
        // psi_c grows like -log z: log(100) per two decades.
        const double step = psi(p, Coordinate::C, 1e6) - psi(p, Coordinate::C, 1e8);
        CHECK(step == doctest::Approx(std::log(100.0)).epsilon(0.01));
    }
}

TEST_CASE("redescend_point is a critical point of psi_mu") {
    for (const auto& [c, k] : {std::pair{2.0, 1.0}, std::pair{5.0, 0.2}, std::pair{20.0, 0.2}}) {
        const Params p{0.0, 1.0, c, k, 0.0};
        const auto r = redescend_point(p);
        REQUIRE(r.x0.has_value());
        const double x0 = *r.x0;
        CHECK(x0 > 0.0);
        const auto f = [&](double x) { return psi(p, Coordinate::Mu, x); };
        const double slope = oracle::derivative(f, x0, 1e-3 * x0);
        CHECK(std::abs(slope) < 1e-6 * std::abs(f(x0)) / x0);
        for (int i = 0; i < 40; ++i) {
            const double a = x0 * (0.5 + 0.5 * i / 40.0);
            const double b = x0 * (0.5 + 0.5 * (i + 1) / 40.0);
            CHECK(f(b) > f(a));
            CHECK(f(x0 * (1.0 + 1.0 * (i + 1) / 40.0)) < f(x0 * (1.0 + 1.0 * i / 40.0)));
        }
    }
    CHECK(*redescend_point({0, 1, 5.0, 0.2, 0.0}).x0 ==
          doctest::Approx(std::pow(4.0, 0.2)).epsilon(1e-14));
}

TEST_CASE("redescend_point absent and scaling") {
    const auto none = redescend_point({0.0, 1.0, 1.0, 1.0, 0.0});
    CHECK_FALSE(none.x0.has_value());
    CHECK(none.reason.find("ck=1") != std::string::npos);
    const double base = *redescend_point({0.0, 1.0, 2.0, 1.0, 0.0}).x0;
    const double skew = *redescend_point({0.0, 1.0, 2.0, 1.0, 0.5}).x0;
    CHECK(skew / base == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("rho_conditions") {
    for (const Params p : {Params{0, 1, 5.0, 0.2, 0.0}, Params{0, 1, 2.0, 1.0, 0.0},
                           Params{0, 1, 0.8, 0.5, 0.3}}) {
        CHECK_FALSE(rho_conditions(p).rho_zero_at_origin);
    }
    const auto a = rho_conditions({0, 1, 5.0, 0.2, 0.0});
    CHECK(a.rho_diverges);
    CHECK(a.rho_sublinear);
    const auto b = rho_conditions({0, 1, 2.0, 1.0, 0.0});
    CHECK(b.psi_redescending);
    CHECK(redescend_point({0, 1, 2.0, 1.0, 0.0}).x0.has_value());
    CHECK_FALSE(rho_conditions({0, 1, 1.0, 1.0, 0.0}).psi_redescending);
}

TEST_CASE("heavy_tail_check examples use the decade grid from 10") {
    const auto a = heavy_tail_check({0, 1, 2.0, 1.0, 0.0}, 0.1);
    CHECK(a.heavy);
    REQUIRE(a.probes.size() == 4);
    CHECK(a.probes.front().x == 10.0);
    CHECK(a.probes.back().x == 1e4);
    const auto b = heavy_tail_check({0, 1, 20.0, 0.2, 0.5}, 1.0);
    CHECK(b.heavy);
    CHECK(b.probes.front().x == 10.0);
    for (std::size_t i = 1; i < b.probes.size(); ++i) {
        CHECK(b.probes[i].log_value > b.probes[i - 1].log_value);
    }
    CHECK(a.probes[1].log_value ==
          doctest::Approx(0.1 * 100.0 + log_survival({0, 1, 2.0, 1.0, 0.0}, 100.0)));
}

TEST_CASE("every grid member is heavy tailed") {
    for (double c : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
        for (double k : {0.2, 1.0, 3.0}) {
            for (double eps : {-0.5, 0.0, 0.5}) {
                for (double lambda : {0.1, 1.0}) {
                    INFO(c << " " << k << " " << eps << " " << lambda);
                    CHECK(heavy_tail_check({0, 1, c, k, eps}, lambda).heavy);
                }
            }
        }
    }
    CHECK_THROWS_AS(heavy_tail_check({0, 1, 2.0, 1.0, 0.0}, 0.0), DomainError);
}

TEST_CASE("tail slope and tail constant") {
    for (double c : {2.0, 5.0}) {
        for (double eps : {-0.5, 0.0, 0.5}) {
            CHECK(tail_index_estimate({0, 1, c, 0.7, eps}) == doctest::Approx(c).epsilon(0.05));
        }
    }
    for (const Params p : {Params{0, 1, 2.0, 1.0, 0.0}, Params{0, 1, 5.0, 0.2, 0.4},
                           Params{0, 1, 20.0, 0.2, -0.5}}) {
        const double x = 1e5;
        const double scaled = std::exp(p.c * std::log(x) + log_survival(p, x));
        const double expected = p.k * std::pow(1.0 + p.eps, p.c + 1.0) / 2.0;
        CHECK(scaled == doctest::Approx(expected).epsilon(0.01));
    }
}

TEST_CASE("diagnose reports c as unbounded without conflicts") {
    for (const Params p : {Params{0, 1, 2.0, 1.0, 0.0}, Params{0, 1, 5.0, 0.2, 0.4},
                           Params{0, 1, 0.7, 2.0, -0.3}}) {
        const auto report = diagnose(p, 0.1);
        CHECK_FALSE(report.bounded.at(Coordinate::C));
        CHECK_FALSE(report.probe_bounded.at(Coordinate::C));
        CHECK(report.bounded.at(Coordinate::K));
        CHECK(report.conflicts.empty());
        CHECK(report.tail.heavy);
        CHECK(report.probes.size() == 6);
    }
}
