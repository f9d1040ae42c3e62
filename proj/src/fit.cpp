#include "esb3/fit.hpp"

#include "esb3/errors.hpp"
#include "esb3/gof.hpp"
#include "esb3/special_math.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace esb3 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRootTol = 1e-12;
constexpr double kEpsBoundary = 1e-9;
constexpr int kStallCycles = 5;

struct Accumulated {
    double loglik = 0.0;
    std::array<double, 5> score{};
};

// One pass over the data for the log-likelihood and, optionally, the score.
Accumulated accumulate(const Params& p, std::span<const double> data, bool with_score) {
    const double n = static_cast<double>(data.size());
    const double ck = p.c * p.k;
    double sum_ll = 0.0;
    double sum_w = 0.0;
    double sum_c = 0.0;
    double sum_k = 0.0;
    double sum_mu = 0.0;
    double sum_eps = 0.0;
    bool hit_location = false;
    for (double y : data) {
        const double diff = y - p.mu;
        const double x = diff / p.sigma;
        const int s = x >= 0.0 ? 1 : -1;
        const double z = s * x / (1.0 + s * p.eps);
        if (z == 0.0) {
            hit_location = true;
            if (ck > 1.0) {
                sum_ll = -kInf;
            } else if (ck < 1.0 && sum_ll != -kInf) {
                sum_ll = kInf;
            }
            continue;
        }
        const double lz = std::log(z);
        const double log1p_zc = log1pexp(p.c * lz);
        sum_ll += (ck - 1.0) * lz - (p.k + 1.0) * log1p_zc;
        if (!with_score) {
            continue;
        }
        const double w = logistic_complement(p.c * lz);  // 1 / (1 + z^c)
        const double a = (p.c + 1.0) - p.c * (p.k + 1.0) * w;
        sum_w += w;
        sum_c += -lz + (p.k + 1.0) * lz * w;
        sum_k += log1p_zc - p.c * lz;  // log(1 + z^-c)
        sum_mu += a / diff;
        sum_eps += s / (1.0 + s * p.eps) * a;
    }
    Accumulated out;
    out.loglik = n * std::log(ck / (2.0 * p.sigma)) + sum_ll;
    if (with_score) {
        if (hit_location) {
            Params moved = p;
            moved.mu += kLocationNudge * p.sigma;
            return {out.loglik, accumulate(moved, data, true).score};
        }
        out.score[0] = sum_mu;
        out.score[1] = p.c / p.sigma * (n - (p.k + 1.0) * sum_w);
        out.score[2] = n / p.c + sum_c;
        out.score[3] = n / p.k - sum_k;
        out.score[4] = sum_eps;
    }
    return out;
}

double get(const Params& p, Coordinate which) {
    switch (which) {
    case Coordinate::Mu: return p.mu;
    case Coordinate::Sigma: return p.sigma;
    case Coordinate::C: return p.c;
    case Coordinate::K: return p.k;
    case Coordinate::Eps: return p.eps;
    }
    return 0.0;
}

Params with(Params p, Coordinate which, double value) {
    switch (which) {
    case Coordinate::Mu: p.mu = value; break;
    case Coordinate::Sigma: p.sigma = value; break;
    case Coordinate::C: p.c = value; break;
    case Coordinate::K: p.k = value; break;
    case Coordinate::Eps: p.eps = value; break;
    }
    return p;
}

// Closed-form maximizer of the likelihood in k.
double k_closed_form(const Params& p, std::span<const double> data) {
    double sum = 0.0;
    for (double y : data) {
        const Standardized s = standardize(p, y);
        if (s.z == 0.0) {
            continue;
        }
        sum += log1pexp(-p.c * s.log_z);
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        throw NoBracket("k equation has no positive root");
    }
    return static_cast<double>(data.size()) / sum;
}

// Walks outward from t0 in steps of `step` (doubling) until g changes sign,
// assuming g > 0 below the root and g < 0 above it.
std::pair<double, double> expand_bracket(const RealFn& g, double t0, double step, double t_min,
                                         double t_max) {
    const double g0 = g(t0);
    if (g0 == 0.0) {
        return {t0, t0};
    }
    const double dir = g0 > 0.0 ? 1.0 : -1.0;
    double inner = t0;
    for (int i = 0; i < 60; ++i) {
        const double outer = std::clamp(inner + dir * step, t_min, t_max);
        const double go = g(outer);
        if ((go > 0.0) != (g0 > 0.0) || go == 0.0) {
            return dir > 0.0 ? std::pair{inner, outer} : std::pair{outer, inner};
        }
        if (outer == t_min || outer == t_max) {
            break;
        }
        inner = outer;
        step *= 2.0;
    }
    throw NoBracket("score equation: no sign change within the feasible range");
}

double solve_eps(const Params& p, std::span<const double> data);

// eps maximizing the likelihood with the other parameters at `p`; `p.eps`
// when the eps equation has no sign change.
double eps_profile(const Params& p, std::span<const double> data) {
    try {
        return solve_eps(p, data);
    } catch (const NoBracket&) {
        return p.eps;
    } catch (const ConvergenceError&) {
        return p.eps;
    }
}

// With `profile_eps`, eps is re-solved at every trial mu, so the root found is
// that of the profile score along the mu-eps ridge.
double solve_mu(const Params& p, std::span<const double> sorted, bool profile_eps) {
    std::vector<double> u(sorted.begin(), sorted.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    if (u.size() < 2) {
        throw NoBracket("mu equation: fewer than two distinct observations");
    }
    const double n = static_cast<double>(sorted.size());
    const auto at = [&](double m) {
        Params q = with(p, Coordinate::Mu, m);
        if (profile_eps) {
            q.eps = eps_profile(q, sorted);
        }
        return q;
    };
    const auto scaled_score = [&](double m) {
        return p.sigma * accumulate(at(m), sorted, true).score[0] / n;
    };
    const double reach = 10.0 * std::max(p.sigma, u.back() - u.front());
    // Breakpoints: midpoints between distinct observations, padded by a far
    // point on either side where the score sign is known.
    const std::size_t m = u.size();
    const auto breakpoint = [&](std::ptrdiff_t j) {
        if (j < 0) {
            return u.front() - reach;
        }
        if (j >= static_cast<std::ptrdiff_t>(m) - 1) {
            return u.back() + reach;
        }
        return 0.5 * (u[j] + u[j + 1]);
    };
    const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(m) - 1;

    // Start from the gap holding the current mu and walk toward the sign change.
    std::ptrdiff_t j0 = std::upper_bound(u.begin(), u.end(), p.mu) - u.begin() - 1;
    j0 = std::clamp<std::ptrdiff_t>(j0, -1, last);
    std::ptrdiff_t pos;  // breakpoint index with score > 0
    std::ptrdiff_t neg;  // breakpoint index with score <= 0
    if (scaled_score(breakpoint(j0)) > 0.0) {
        pos = j0;
        std::ptrdiff_t step = 1;
        neg = std::min(j0 + step, last);
        while (scaled_score(breakpoint(neg)) > 0.0) {
            if (neg == last) {
                throw NoBracket("mu equation: score positive at the far right");
            }
            pos = neg;
            step *= 2;
            neg = std::min(neg + step, last);
        }
    } else {
        neg = j0;
        std::ptrdiff_t step = 1;
        pos = std::max<std::ptrdiff_t>(j0 - step, -1);
        while (!(scaled_score(breakpoint(pos)) > 0.0)) {
            if (pos == -1) {
                throw NoBracket("mu equation: score non-positive at the far left");
            }
            neg = pos;
            step *= 2;
            pos = std::max<std::ptrdiff_t>(pos - step, -1);
        }
    }
    while (neg - pos > 1) {
        const std::ptrdiff_t mid = pos + (neg - pos) / 2;
        if (scaled_score(breakpoint(mid)) > 0.0) {
            pos = mid;
        } else {
            neg = mid;
        }
    }

    // The smooth root lies between breakpoint(pos) and breakpoint(neg), which
    // straddle the single observation u[neg]. Collect the roots on each side
    // of it (and the nudged observation itself when the density is singular
    // there) and keep the one with the highest likelihood.
    const double lo = breakpoint(pos);
    const double hi = breakpoint(neg);
    const double obs = u[static_cast<std::size_t>(neg)];
    const double inset = std::max(1e-12 * p.sigma, 4.0 * std::abs(obs) *
                                                       std::numeric_limits<double>::epsilon());
    std::vector<double> candidates;
    const auto try_bracket = [&](double a, double b) {
        if (!(b > a)) {
            return;
        }
        try {
            candidates.push_back(find_root(scaled_score, a, b, kRootTol).root);
        } catch (const NoBracket&) {
        } catch (const ConvergenceError&) {
        }
    };
    if (obs - inset > lo) {
        try_bracket(lo, obs - inset);
    }
    if (obs + inset < hi) {
        try_bracket(obs + inset, hi);
    }
    // Local maximum inside the gap holding the current mu; with c k > 1 the
    // score runs from +inf to -inf across every gap, so this always exists.
    if (j0 >= 0 && j0 < last) {
        const double left = u[static_cast<std::size_t>(j0)];
        const double right = u[static_cast<std::size_t>(j0) + 1];
        const double pad = std::max(inset, 1e-9 * (right - left));
        try_bracket(left + pad, right - pad);
    }
    double best = std::numeric_limits<double>::quiet_NaN();
    double best_ll = -kInf;
    for (double cand : candidates) {
        const double ll = loglik(at(cand), sorted);
        if (std::isfinite(ll) && ll > best_ll) {
            best_ll = ll;
            best = cand;
        }
    }
    if (std::isnan(best)) {
        throw NoBracket("mu equation: no admissible root near the smooth score root");
    }
    return best;
}

double solve_sigma(const Params& p, std::span<const double> data) {
    const double n = static_cast<double>(data.size());
    const auto g = [&](double log_sigma) {
        const Params q = with(p, Coordinate::Sigma, std::exp(log_sigma));
        return accumulate(q, data, true).score[1] * q.sigma / (q.c * n);
    };
    const double t0 = std::log(p.sigma);
    const auto [a, b] = expand_bracket(g, t0, 0.25, t0 - 60.0, t0 + 60.0);
    if (a == b) {
        return p.sigma;
    }
    return std::exp(find_root(g, a, b, kRootTol).root);
}

double solve_c(const Params& p, std::span<const double> data) {
    const double n = static_cast<double>(data.size());
    const auto g = [&](double log_c) {
        Params q = with(p, Coordinate::C, std::exp(log_c));
        q.k = k_closed_form(q, data);
        return accumulate(q, data, true).score[2] / n;
    };
    const double t0 = std::log(p.c);
    const auto [a, b] = expand_bracket(g, t0, 0.1, std::log(1e-3), std::log(1e3));
    if (a == b) {
        return p.c;
    }
    return std::exp(find_root(g, a, b, kRootTol).root);
}

double solve_eps(const Params& p, std::span<const double> data) {
    const double n = static_cast<double>(data.size());
    const auto g = [&](double t) {
        return accumulate(with(p, Coordinate::Eps, std::tanh(t)), data, true).score[4] / n;
    };
    const double t_limit = std::atanh(1.0 - kEpsBoundary);
    const double t0 = std::atanh(std::clamp(p.eps, -1.0 + kEpsBoundary, 1.0 - kEpsBoundary));
    const auto [a, b] = expand_bracket(g, t0, 0.1, -t_limit, t_limit);
    if (a == b) {
        return p.eps;
    }
    return std::tanh(find_root(g, a, b, kRootTol).root);
}

// Golden-section step on one coordinate in its natural unconstrained scale.
double line_search(const Params& p, Coordinate which, std::span<const double> data) {
    const auto objective = [&](auto to_param) {
        return [&, to_param](double t) {
            const double ll = loglik(with(p, which, to_param(t)), data);
            return std::isnan(ll) ? -kInf : ll;
        };
    };
    switch (which) {
    case Coordinate::Mu: {
        const auto id = [](double t) { return t; };
        return golden_section_maximize(objective(id), p.mu - p.sigma, p.mu + p.sigma).x;
    }
    case Coordinate::Eps: {
        const auto th = [](double t) { return std::tanh(t); };
        const double t_limit = std::atanh(1.0 - kEpsBoundary);
        const double t0 = std::atanh(p.eps);
        return std::tanh(golden_section_maximize(objective(th), std::max(t0 - 0.5, -t_limit),
                                                 std::min(t0 + 0.5, t_limit))
                             .x);
    }
    default: {
        const auto ex = [](double t) { return std::exp(t); };
        const double t0 = std::log(get(p, which));
        return std::exp(golden_section_maximize(objective(ex), t0 - std::log(2.0),
                                                t0 + std::log(2.0))
                            .x);
    }
    }
}

// Moves mu off any observation closer than kLocationNudge * sigma, to
// whichever edge of the excluded interval has the higher likelihood.
double clear_of_data(const Params& p, std::span<const double> sorted) {
    const double gap = kLocationNudge * p.sigma;
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), p.mu);
    double obs = 0.0;
    if (it != sorted.end() && *it - p.mu < gap) {
        obs = *it;
    } else if (it != sorted.begin() && p.mu - *(it - 1) < gap) {
        obs = *(it - 1);
    } else {
        return p.mu;
    }
    const double below = obs - gap;
    const double above = obs + gap;
    return loglik(with(p, Coordinate::Mu, above), sorted) >=
                   loglik(with(p, Coordinate::Mu, below), sorted)
               ? above
               : below;
}

// True when c k < 1 and mu sits on the edge of the exclusion zone around an
// observation, where the likelihood rises without bound toward the point.
bool pinned_to_observation(const Params& p, std::span<const double> sorted) {
    if (!(p.c * p.k < 1.0)) {
        return false;
    }
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), p.mu);
    double nearest = kInf;
    if (it != sorted.end()) {
        nearest = *it - p.mu;
    }
    if (it != sorted.begin()) {
        nearest = std::min(nearest, p.mu - *(it - 1));
    }
    return nearest <= 1.001 * kLocationNudge * p.sigma;
}

// score_norm without the mu component.
double free_score_norm(const Params& p, std::span<const double> data) {
    const auto g = accumulate(p, data, true).score;
    return std::hypot(p.sigma * g[1], g[2], g[3]) + std::abs(g[4]);
}

double sample_quantile(std::span<const double> sorted, double prob) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double relative_change(const Params& a, const Params& b) {
    return std::max({std::abs(a.mu - b.mu) / b.sigma, std::abs(a.sigma - b.sigma) / b.sigma,
                     std::abs(a.c - b.c) / b.c, std::abs(a.k - b.k) / b.k,
                     std::abs(a.eps - b.eps)});
}

double nearest_gap(double mu, std::span<const double> sorted) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), mu);
    double gap = kInf;
    if (it != sorted.end()) {
        gap = std::min(gap, *it - mu);
    }
    if (it != sorted.begin()) {
        gap = std::min(gap, mu - *std::prev(it));
    }
    return gap;
}

// Safeguarded Newton steps on the free coordinates after the cycles stop.
// The Hessian is the central difference of the analytic score; a step is
// halved until loglik does not decrease and mu stays in its gap between
// observations.
Params newton_polish(Params p, std::span<const double> sorted, bool mu_free, bool c_free,
                     double& ll) {
    std::vector<Coordinate> free;
    for (Coordinate which : kCoordinateOrder) {
        if ((which == Coordinate::Mu && !mu_free) || (which == Coordinate::C && !c_free)) {
            continue;
        }
        free.push_back(which);
    }
    const auto m = static_cast<Eigen::Index>(free.size());
    const auto idx = [](Coordinate which) { return static_cast<std::size_t>(which); };
    for (int iter = 0; iter < 8; ++iter) {
        const auto g_full = score(p, sorted);
        const double gap = nearest_gap(p.mu, sorted);
        Eigen::VectorXd g(m);
        Eigen::MatrixXd hess(m, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            g[j] = g_full[idx(free[j])];
            double h = 1e-6 * std::max(std::abs(get(p, free[j])), 1e-3);
            if (free[j] == Coordinate::Mu || free[j] == Coordinate::Sigma) {
                h = 1e-6 * p.sigma;
            }
            if (free[j] == Coordinate::Mu) {
                h = std::min(h, 0.25 * gap);
            }
            const auto up = score(with(p, free[j], get(p, free[j]) + h), sorted);
            const auto down = score(with(p, free[j], get(p, free[j]) - h), sorted);
            for (Eigen::Index i = 0; i < m; ++i) {
                hess(i, j) = (up[idx(free[i])] - down[idx(free[i])]) / (2.0 * h);
            }
        }
        const Eigen::MatrixXd neg = -0.5 * (hess + hess.transpose());
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(neg);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
            break;
        }
        const Eigen::VectorXd delta = ldlt.solve(g);
        if (!delta.allFinite()) {
            break;
        }
        bool accepted = false;
        double t = 1.0;
        for (int halving = 0; halving < 30 && !accepted; ++halving, t *= 0.5) {
            Params q = p;
            for (Eigen::Index j = 0; j < m; ++j) {
                q = with(q, free[j], get(q, free[j]) + t * delta[j]);
            }
            if (!(q.sigma > 0.0 && q.c > 0.0 && q.k > 0.0 && std::abs(q.eps) < 1.0 - kEpsBoundary)) {
                continue;
            }
            if (mu_free) {
                const auto lo = std::min(p.mu, q.mu);
                const auto hi = std::max(p.mu, q.mu);
                const auto first = std::lower_bound(sorted.begin(), sorted.end(), lo);
                if ((first != sorted.end() && *first <= hi) ||
                    nearest_gap(q.mu, sorted) < kLocationNudge * q.sigma) {
                    continue;
                }
            }
            const double lq = loglik(q, sorted);
            if (std::isfinite(lq) && lq >= ll) {
                const double change = relative_change(q, p);
                p = q;
                ll = lq;
                accepted = true;
                if (change < 1e-14) {
                    return p;
                }
            }
        }
        if (!accepted) {
            break;
        }
    }
    return p;
}

} // namespace

std::string_view to_string(Coordinate which) {
    switch (which) {
    case Coordinate::Mu: return "mu";
    case Coordinate::Sigma: return "sigma";
    case Coordinate::C: return "c";
    case Coordinate::K: return "k";
    case Coordinate::Eps: return "eps";
    }
    return "?";
}

StandardizedSample standardize_sample(const Params& p, std::span<const double> data) {
    validate(p);
    StandardizedSample out;
    out.s.reserve(data.size());
    out.z.reserve(data.size());
    for (double y : data) {
        const Standardized s = standardize(p, y);
        out.s.push_back(s.sign);
        out.z.push_back(s.z);
    }
    return out;
}

double loglik(const Params& p, std::span<const double> data) {
    validate(p);
    if (data.empty()) {
        throw DomainError("loglik: empty data");
    }
    return accumulate(p, data, false).loglik;
}

std::array<double, 5> score(const Params& p, std::span<const double> data) {
    validate(p);
    if (data.empty()) {
        throw DomainError("score: empty data");
    }
    return accumulate(p, data, true).score;
}

double score_norm(const Params& p, std::span<const double> data) {
    const auto g = score(p, data);
    const std::array<double, 5> scaled = {p.sigma * g[0], p.sigma * g[1], g[2], g[3], g[4]};
    double sum = 0.0;
    for (double v : scaled) {
        sum += v * v;
    }
    return std::sqrt(sum);
}

double solve_coordinate(const Params& p, Coordinate which, std::span<const double> sorted_data,
                        const FitConfig& cfg) {
    validate(p);
    if (which == Coordinate::C && cfg.fixed_c) {
        return *cfg.fixed_c;
    }
    switch (which) {
    case Coordinate::Mu: return solve_mu(p, sorted_data, false);
    case Coordinate::Sigma: return solve_sigma(p, sorted_data);
    case Coordinate::C: return solve_c(p, sorted_data);
    case Coordinate::K: return k_closed_form(p, sorted_data);
    case Coordinate::Eps: return solve_eps(p, sorted_data);
    }
    return get(p, which);
}

Params moment_init(std::span<const double> data) {
    if (data.size() < kMinFitSample) {
        throw SmallSample("moment_init: at least 20 observations are required");
    }
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double median = sample_quantile(sorted, 0.5);
    double spread = sample_quantile(sorted, 0.75) - sample_quantile(sorted, 0.25);
    if (!(spread > 0.0)) {
        spread = 0.5 * (sorted.back() - sorted.front());
    }
    if (!(spread > 0.0)) {
        throw DegenerateData("all observations are identical");
    }
    const double n = static_cast<double>(sorted.size());

    constexpr std::array<std::array<double, 2>, 4> kShapeGrid = {
        {{2.0, 1.0}, {5.0, 0.2}, {1.5, 3.0}, {20.0, 0.2}}};
    Params best;
    double best_ll = -kInf;
    bool have_best = false;
    for (const auto& [c, k] : kShapeGrid) {
        Params q{0.0, 1.0, c, k, 0.0};
        for (int iter = 0; iter < 5; ++iter) {
            const Params unit{0.0, 1.0, c, k, q.eps};
            const double model_spread = quantile(unit, 0.75) - quantile(unit, 0.25);
            q.sigma = spread / model_spread;
            q.mu = median - q.sigma * quantile(unit, 0.5);
            const auto below = std::lower_bound(sorted.begin(), sorted.end(), q.mu) - sorted.begin();
            q.eps = std::clamp(1.0 - 2.0 * static_cast<double>(below) / n, -0.9, 0.9);
        }
        if (std::binary_search(sorted.begin(), sorted.end(), q.mu)) {
            q.mu += kLocationNudge * q.sigma;
        }
        const double ll = loglik(q, sorted);
        if (!have_best || (std::isfinite(ll) && ll > best_ll)) {
            best = q;
            best_ll = std::isfinite(ll) ? ll : -kInf;
            have_best = true;
        }
    }
    return best;
}

FitResult fit_ml(const Dataset& data, const FitConfig& cfg) {
    if (data.size() < kMinFitSample) {
        throw SmallSample("fit_ml: at least 20 observations are required, got " +
                          std::to_string(data.size()));
    }
    if (cfg.fixed_c && !(*cfg.fixed_c > 0.0)) {
        throw DomainError("fixed c must be positive");
    }
    if (!(cfg.param_tol > 0.0) || cfg.max_cycles < 1) {
        throw DomainError("fit config: tolerances must be positive and max_cycles >= 1");
    }
    const auto sorted = data.sorted();
    if (sorted.front() == sorted.back()) {
        throw DegenerateData("all observations are identical");
    }
    const double n = static_cast<double>(data.size());
    const double score_tol = cfg.score_tol.value_or(1e-5 * n);

    Params p = cfg.init ? *cfg.init : moment_init(sorted);
    if (cfg.fixed_c) {
        p.c = *cfg.fixed_c;
    }
    validate(p);
    p.mu = clear_of_data(p, sorted);
    double ll = loglik(p, sorted);
    if (std::isnan(ll) || ll == kInf) {
        throw DegenerateData("initial log-likelihood is not finite");
    }

    FitResult result;
    result.free_params = cfg.fixed_c ? 4 : 5;
    result.trace.push_back({0, ll});

    int still = 0;
    for (int cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
        const Params start = p;
        for (Coordinate which : kCoordinateOrder) {
            if (which == Coordinate::C && cfg.fixed_c) {
                continue;
            }
            double proposal_ll = -kInf;
            Params proposal = p;
            try {
                if (which == Coordinate::Mu) {
                    proposal.mu = solve_mu(p, sorted, true);
                    proposal.eps = eps_profile(proposal, sorted);
                    proposal_ll = loglik(proposal, sorted);
                    if (!(proposal_ll >= ll)) {
                        proposal = with(p, which, solve_coordinate(p, which, sorted, cfg));
                        proposal_ll = loglik(proposal, sorted);
                    }
                } else {
                    proposal = with(p, which, solve_coordinate(p, which, sorted, cfg));
                    proposal_ll = loglik(proposal, sorted);
                }
            } catch (const NoBracket&) {
            } catch (const ConvergenceError&) {
            }
            if (!(proposal_ll >= ll) || std::isnan(proposal_ll)) {
                proposal = with(p, which, line_search(p, which, sorted));
                proposal_ll = loglik(proposal, sorted);
            }
            if (which == Coordinate::Mu) {
                const double cleared = clear_of_data(proposal, sorted);
                if (cleared != proposal.mu) {
                    proposal.mu = cleared;
                    proposal_ll = loglik(proposal, sorted);
                }
            }
            if (proposal_ll >= ll && std::isfinite(proposal_ll)) {
                p = proposal;
                ll = proposal_ll;
            }
        }
        result.trace.push_back({cycle, ll});
        result.cycles = cycle;
        const double change = relative_change(p, start);
        result.score_norm = score_norm(p, sorted);
        if (change < cfg.param_tol && result.score_norm < score_tol) {
            result.converged = true;
            result.stop_reason = "converged";
            break;
        }
        if (change < cfg.param_tol && pinned_to_observation(p, sorted) &&
            free_score_norm(p, sorted) < score_tol) {
            result.stop_reason = "pinned";
            break;
        }
        still = change < cfg.param_tol ? still + 1 : 0;
        if (still >= kStallCycles) {
            result.stop_reason = "stalled";
            break;
        }
    }
    if (result.stop_reason.empty()) {
        result.stop_reason = "max_cycles";
    }
    if (result.stop_reason != "max_cycles") {
        const double before = ll;
        p = newton_polish(p, sorted, !pinned_to_observation(p, sorted), !cfg.fixed_c, ll);
        if (ll > before) {
            result.trace.push_back({result.cycles, ll});
        }
        if (result.stop_reason == "stalled" && score_norm(p, sorted) < score_tol) {
            result.converged = true;
            result.stop_reason = "converged";
        }
    }
    result.params = p;
    result.loglik = ll;
    result.score_norm = score_norm(p, sorted);
    result.aic = aic(ll, result.free_params);
    return result;
}

} // namespace esb3
