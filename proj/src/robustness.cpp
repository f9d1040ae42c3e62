#include "esb3/robustness.hpp"

#include "esb3/errors.hpp"
#include "esb3/special_math.hpp"

#include <cmath>
#include <limits>

namespace esb3 {

namespace {

constexpr std::array<double, 3> kProbeX = {1e4, 1e6, 1e8};

Params standard_member(const Params& p) { return {0.0, 1.0, p.c, p.k, p.eps}; }

double neg_log_pdf(const Params& p, double x) { return -log_pdf(standard_member(p), x); }

std::size_t index_of(Coordinate which) { return static_cast<std::size_t>(which); }

} // namespace

double psi(const Params& p, Coordinate which, double x) {
    validate(p);
    if (x == 0.0 || !std::isfinite(x)) {
        throw DomainError("psi: x must be finite and nonzero");
    }
    const double s = x > 0.0 ? 1.0 : -1.0;
    const double one_plus = 1.0 + s * p.eps;
    const double log_z = std::log(s * x / one_plus);
    const double c_log_z = p.c * log_z;
    const double w = std::exp(-log1pexp(c_log_z));  // 1 / (1 + z^c)
    const double core = (p.c + 1.0) - p.c * (p.k + 1.0) * w;
    switch (which) {
    case Coordinate::Mu:
        return core / x;
    case Coordinate::Sigma:
        return p.c - p.c * (p.k + 1.0) * w;
    case Coordinate::C:
        return 1.0 / p.c - log_z + (p.k + 1.0) * w * log_z;
    case Coordinate::K:
        return 1.0 / p.k - log1pexp(-c_log_z);
    case Coordinate::Eps:
        return s * core / one_plus;
    }
    throw DomainError("psi: unknown coordinate");
}

std::map<Coordinate, LimitDescriptor> psi_limits(const Params& p) {
    validate(p);
    const double inf = std::numeric_limits<double>::infinity();
    std::map<Coordinate, LimitDescriptor> out;
    out[Coordinate::Mu] = {{true, 0.0}, {true, 0.0}};
    out[Coordinate::Sigma] = {{true, p.c}, {true, p.c}};
    out[Coordinate::C] = {{false, -inf}, {false, -inf}};
    out[Coordinate::K] = {{true, 1.0 / p.k}, {true, 1.0 / p.k}};
    out[Coordinate::Eps] = {{true, (p.c + 1.0) / (1.0 + p.eps)},
                            {true, -(p.c + 1.0) / (1.0 - p.eps)}};
    return out;
}

std::vector<ProbeRow> psi_probe_table(const Params& p) {
    std::vector<ProbeRow> rows;
    for (double sign : {-1.0, 1.0}) {
        for (double mag : kProbeX) {
            ProbeRow row;
            row.x = sign * mag;
            for (Coordinate which : kCoordinateOrder) {
                row.psi[index_of(which)] = psi(p, which, row.x);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

bool psi_probe_bounded(const Params& p, Coordinate which) {
    for (double sign : {-1.0, 1.0}) {
        const double a = psi(p, which, sign * kProbeX[0]);
        const double b = psi(p, which, sign * kProbeX[1]);
        const double c = psi(p, which, sign * kProbeX[2]);
        const double near = std::abs(b - a);
        const double far = std::abs(c - b);
        const bool settled = near < 1e-9 && far < 1e-9;
        if (!settled && !(far <= 0.5 * near)) {
            return false;
        }
    }
    return true;
}

RedescendPoint redescend_point(const Params& p) {
    validate(p);
    const double c = p.c;
    const double k = p.k;
    const double c2 = c * c;
    const double disc = c2 * c2 * k * k + 2.0 * c2 * c2 * k + 2.0 * c2 * c * k * k + c2 * c2 +
                        c2 * k * k - 2.0 * c2 * c - 2.0 * c2 * k - 3.0 * c2;
    if (disc < 0.0) {
        return {std::nullopt, "discriminant is negative"};
    }
    const double b = c2 * k + c2 + c * k - c - 2.0;
    const double numer = b + std::sqrt(disc);
    if (!(numer > 0.0)) {
        return {std::nullopt, c * k == 1.0 ? "ck=1 and the positive root is zero"
                                           : "no positive root"};
    }
    const double log_t = std::log(numer) - std::log(2.0 * (c + 1.0));
    return {(1.0 + p.eps) * std::exp(log_t / c), ""};
}

RhoConditions rho_conditions(const Params& p) {
    validate(p);
    RhoConditions r;
    // rho(0) is -log f at the location: +inf, the log of a positive constant,
    // or -inf, never zero for this family.
    r.rho_zero_at_origin = false;
    bool diverges = true;
    bool sublinear = true;
    for (double sign : {-1.0, 1.0}) {
        const double near = neg_log_pdf(p, sign * 1e3);
        const double far = neg_log_pdf(p, sign * 1e6);
        diverges = diverges && far > near;
        sublinear = sublinear && std::abs(far) / 1e6 <= 0.1 * std::abs(near) / 1e3;
    }
    r.rho_diverges = diverges;
    r.rho_sublinear = sublinear;
    r.psi_redescending = redescend_point(p).x0.has_value();
    return r;
}

HeavyTailCheck heavy_tail_check(const Params& p, double lambda) {
    validate(p);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("heavy_tail_check: lambda must be positive");
    }
    // lambda x - c log x rises across a decade [x, 10x] once 9 lambda x > c ln 10.
    double start = 10.0;
    while (9.0 * lambda * start <= p.c * std::log(10.0)) {
        start *= 10.0;
    }
    const Params std_p = standard_member(p);
    HeavyTailCheck out;
    out.lambda = lambda;
    double x = start;
    for (int i = 0; i < 4; ++i, x *= 10.0) {
        out.probes.push_back({x, lambda * x + log_survival(std_p, x)});
    }
    bool increasing = true;
    for (std::size_t i = 1; i < out.probes.size(); ++i) {
        increasing = increasing && out.probes[i].log_value > out.probes[i - 1].log_value;
    }
    out.heavy = increasing;
    return out;
}

double tail_index_estimate(const Params& p, double x_lo, double x_hi) {
    validate(p);
    if (!(x_lo > 0.0 && x_hi > x_lo)) {
        throw DomainError("tail_index_estimate: need 0 < x_lo < x_hi");
    }
    const Params std_p = standard_member(p);
    return -(log_survival(std_p, x_hi) - log_survival(std_p, x_lo)) /
           (std::log(x_hi) - std::log(x_lo));
}

ScoreReport diagnose(const Params& p, double lambda) {
    ScoreReport r;
    r.limits = psi_limits(p);
    r.probes = psi_probe_table(p);
    for (Coordinate which : kCoordinateOrder) {
        const bool analytic = r.limits[which].bounded();
        const bool numeric = psi_probe_bounded(p, which);
        r.bounded[which] = analytic;
        r.probe_bounded[which] = numeric;
        if (analytic != numeric) {
            r.conflicts.push_back(std::string("psi_") + std::string(to_string(which)) +
                                  ": analytic limit says " +
                                  (analytic ? "bounded" : "unbounded") + ", probe says " +
                                  (numeric ? "bounded" : "unbounded"));
        }
    }
    r.redescend = redescend_point(p);
    r.rho = rho_conditions(p);
    r.tail = heavy_tail_check(p, lambda);
    r.tail_index = tail_index_estimate(p);
    return r;
}

} // namespace esb3
