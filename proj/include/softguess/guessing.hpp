#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "softguess/entropy.hpp"
#include "softguess/errors.hpp"
#include "softguess/pmf.hpp"

namespace softguess {

/// The soft-guessing strategy: an ordered partition of the sorted alphabet
/// into lists of size at most L, with stopping probabilities pi and survival
/// probabilities lambda. Each list induces a soft reconstruction uniform on
/// it, so every covered symbol incurs log-loss log2|list| <= D.
struct SoftStrategy {
    struct Cell {
        std::int64_t first = 0;  // 1-based, inclusive
        std::int64_t last = 0;
        std::int64_t size() const { return last - first + 1; }
    };

    std::vector<Cell> lists;
    std::vector<double> pi;      // stopping probability before each guess
    std::vector<double> lambda;  // survival probability of each guess
    std::int64_t L = 1;
    std::size_t cutoff = 0;      // 1-based index K of the cut-off list
};

struct MomentReport {
    double moment = 0.0;
    double error_prob = 0.0;
    double rho = 0.0;
    double D = 0.0;
    double eps = 0.0;
    std::size_t n_lists = 0;
    std::size_t cutoff = 0;
};

struct BoundsReport {
    double exact = 0.0;
    double thm1_upper = 0.0;
    double thm1_lower = 0.0;
    double prop2_upper = 0.0;
    double prop2_lower = 0.0;
};

namespace detail {

inline double ipow(std::int64_t i, double rho) {
    return std::pow(static_cast<double>(i), rho);
}

inline double cell_mass(const Pmf& p, const SoftStrategy::Cell& c) {
    double m = 0.0;
    for (std::int64_t j = c.first; j <= c.last; ++j) m += p.probs[static_cast<std::size_t>(j - 1)];
    return m;
}

} // namespace detail

inline SoftStrategy build_optimal_strategy_with_L(const Pmf& p, std::int64_t L, double eps) {
    if (L < 1) throw BadParameter("list size must be >= 1");
    const auto M = static_cast<std::int64_t>(p.size());
    const SmoothTruncation tr = smooth_truncation(p, eps);
    const auto i_star = static_cast<std::int64_t>(tr.i_star);

    const std::int64_t K = (i_star + L - 1) / L;
    const std::int64_t Kp = (M - i_star + L - 1) / L;  // 0 when i_star == M
    const std::int64_t N = K + Kp;

    SoftStrategy s;
    s.L = L;
    s.cutoff = static_cast<std::size_t>(K);
    s.lists.reserve(static_cast<std::size_t>(N));
    for (std::int64_t i = 1; i < K; ++i) s.lists.push_back({(i - 1) * L + 1, i * L});
    s.lists.push_back({(K - 1) * L + 1, i_star});
    for (std::int64_t jj = 1; jj < Kp; ++jj)
        s.lists.push_back({(jj - 1) * L + i_star + 1, jj * L + i_star});
    if (Kp >= 1) s.lists.push_back({(Kp - 1) * L + i_star + 1, M});

    // pi is zero before the cut-off list, one after it, and at the cut-off
    // equals one minus the ratio of truncated to true mass on that list.
    double q_cut = 0.0, p_cut = 0.0;
    for (std::int64_t j = (K - 1) * L + 1; j <= i_star; ++j) {
        q_cut += tr.q[static_cast<std::size_t>(j - 1)];
        p_cut += p.probs[static_cast<std::size_t>(j - 1)];
    }
    double pi_K = 1.0 - q_cut / p_cut;
    pi_K = std::clamp(pi_K, 0.0, 1.0);

    s.pi.assign(static_cast<std::size_t>(N), 0.0);
    s.lambda.assign(static_cast<std::size_t>(N), 1.0);
    s.pi[static_cast<std::size_t>(K - 1)] = pi_K;
    for (std::int64_t i = K; i < N; ++i) s.pi[static_cast<std::size_t>(i)] = 1.0;
    double lam = 1.0;
    for (std::int64_t i = 0; i < N; ++i) {
        lam *= 1.0 - s.pi[static_cast<std::size_t>(i)];
        s.lambda[static_cast<std::size_t>(i)] = lam;
    }
    return s;
}

inline SoftStrategy build_optimal_strategy(const Pmf& p, double D, double eps) {
    return build_optimal_strategy_with_L(p, list_size(D), eps);
}

/// Probability that the guesser gives up before covering X.
inline double strategy_error_prob(const SoftStrategy& s, const Pmf& p) {
    double success = 0.0;
    for (std::size_t i = 0; i < s.lists.size(); ++i) {
        success += s.lambda[i] * detail::cell_mass(p, s.lists[i]);
    }
    return 1.0 - success;
}

/// rho-th moment of the stochastic guess count under strategy s.
inline double strategy_moment(const SoftStrategy& s, const Pmf& p, double rho) {
    if (!(rho > 0.0)) throw BadParameter("rho must be > 0");
    double m = 0.0;
    for (std::size_t i = 0; i < s.lists.size(); ++i) {
        if (s.lambda[i] == 0.0) continue;
        m += s.lambda[i] * detail::cell_mass(p, s.lists[i]) *
             detail::ipow(static_cast<std::int64_t>(i) + 1, rho);
    }
    return m;
}

/// Exact minimal rho-th soft guessing moment: the truncated list-index sum
/// sum_{i <= i*_Z} Q^eps_Z(i) i^rho.
inline MomentReport min_moment_with_L(const Pmf& p, double rho, std::int64_t L, double eps) {
    if (!(rho > 0.0)) throw BadParameter("rho must be > 0");
    const Pmf z = z_variable(p, L);
    const SmoothTruncation tr = smooth_truncation(z, eps);
    double moment = 0.0;
    for (std::size_t i = 0; i < tr.q.size(); ++i) {
        moment += tr.q[i] * detail::ipow(static_cast<std::int64_t>(i) + 1, rho);
    }
    MomentReport r;
    r.moment = moment;
    r.error_prob = 1.0 - tr.mass();
    r.rho = rho;
    r.D = std::log2(static_cast<double>(L));
    r.eps = eps;
    r.n_lists = z.size();
    r.cutoff = tr.i_star;
    return r;
}

inline MomentReport min_moment(const Pmf& p, double rho, double D, double eps) {
    MomentReport r = min_moment_with_L(p, rho, list_size(D), eps);
    r.D = D;
    return r;
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

namespace detail {

// Cost of the best give-up schedule for a fixed ordered partition, given as
// cell masses in guessing order. For fixed cells the optimal schedule keeps
// lambda = 1 on a prefix, a fractional value on the next cell, and 0 after,
// chosen so the success mass is exactly 1 - eps: success mass bought at step
// i costs i^rho per unit and that price increases with i, so any schedule
// spending on a later cell while an earlier one is below capacity can be
// improved by exchanging mass toward the earlier cell.
inline double greedy_schedule_cost(const std::vector<double>& masses, double rho, double eps) {
    double need = 1.0 - eps;
    double cost = 0.0;
    for (std::size_t i = 0; i < masses.size() && need > 0.0; ++i) {
        const double take = std::min(masses[i], need);
        cost += take * ipow(static_cast<std::int64_t>(i) + 1, rho);
        need -= take;
    }
    return cost;
}

// Enumerates ordered partitions of {0..M-1} into nonempty cells of size at
// most L, invoking visit(cell_masses) for each complete partition.
template <typename Visit>
inline void enumerate_partitions(const Pmf& p, std::int64_t L, Visit&& visit) {
    const std::size_t M = p.size();
    std::vector<bool> used(M, false);
    std::vector<double> masses;

    std::vector<std::size_t> cell;
    auto rec = [&](auto&& self, std::size_t remaining) -> void {
        if (remaining == 0) {
            visit(masses);
            return;
        }
        // Choose the next cell: subsets of the unused atoms, size 1..L. To
        // avoid double counting, force the lowest unused atom into the cell.
        std::size_t anchor = 0;
        while (used[anchor]) ++anchor;
        std::vector<std::size_t> pool;
        for (std::size_t i = anchor + 1; i < M; ++i)
            if (!used[i]) pool.push_back(i);

        auto pick = [&](auto&& pickself, std::size_t start, double mass, std::size_t count) -> void {
            // Current cell = anchor + chosen pool atoms.
            masses.push_back(mass);
            for (std::size_t i : cell) used[i] = true;
            used[anchor] = true;
            self(self, remaining - count);
            used[anchor] = false;
            for (std::size_t i : cell) used[i] = false;
            masses.pop_back();

            if (count < static_cast<std::size_t>(L)) {
                for (std::size_t k = start; k < pool.size(); ++k) {
                    cell.push_back(pool[k]);
                    pickself(pickself, k + 1, mass + p.probs[pool[k]], count + 1);
                    cell.pop_back();
                }
            }
        };
        cell.clear();
        const std::vector<std::size_t> saved_cell;  // cells nest; keep a local
        std::vector<std::size_t> local_cell;
        std::swap(local_cell, cell);
        pick(pick, 0, p.probs[anchor], 1);
        std::swap(local_cell, cell);
    };
    rec(rec, M);
}

} // namespace detail

/// Independent oracle: minimum over all ordered partitions into cells of at
/// most L atoms of the optimal give-up schedule value. Exponential in |X|.
inline double brute_force_min_moment_with_L(const Pmf& p, double rho, std::int64_t L, double eps) {
    constexpr std::size_t kMaxAtoms = 6;
    if (p.size() > kMaxAtoms) throw TooLargeForOracle(p.size(), kMaxAtoms);
    if (!(rho > 0.0)) throw BadParameter("rho must be > 0");
    if (!(eps >= 0.0 && eps < 1.0)) throw BadParameter("eps must lie in [0,1)");
    double best = std::numeric_limits<double>::infinity();
    detail::enumerate_partitions(p, L, [&](const std::vector<double>& masses) {
        best = std::min(best, detail::greedy_schedule_cost(masses, rho, eps));
    });
    return best;
}

inline double brute_force_min_moment(const Pmf& p, double rho, double D, double eps) {
    return brute_force_min_moment_with_L(p, rho, list_size(D), eps);
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

/// Z-based bounds: exp(rho H^eps_{1/(1+rho)}(Z)) above, the same with the
/// (1+log|X|)^{-rho} prefactor below.
inline std::pair<double, double> theorem1_bounds_with_L(const Pmf& p, double rho, std::int64_t L,
                                                        double eps) {
    const Pmf z = z_variable(p, L);
    const double hz = smooth_renyi(z, order_from_rho(rho), eps);
    const double upper = std::exp2(rho * hz);
    const double lower = std::pow(1.0 + p.log_alphabet_size(), -rho) * upper;
    return {upper, lower};
}

inline std::pair<double, double> theorem1_bounds(const Pmf& p, double rho, double D, double eps) {
    return theorem1_bounds_with_L(p, rho, list_size(D), eps);
}

/// Explicit bounds in terms of X itself. For L = 1 the upper bound is
/// strengthened to exp(rho H^eps(X)).
inline std::pair<double, double> prop2_bounds_with_L(const Pmf& p, double rho, std::int64_t L,
                                                     double eps) {
    const double hx = smooth_renyi(p, order_from_rho(rho), eps);
    const double logL = std::log2(static_cast<double>(L));
    const double core = std::exp2(rho * (hx - logL));
    const double upper = L == 1 ? core : 1.0 - eps + std::exp2(rho) * core;
    const double lower = std::pow(1.0 + p.log_alphabet_size(), -rho) * core;
    return {upper, lower};
}

inline std::pair<double, double> prop2_bounds(const Pmf& p, double rho, double D, double eps) {
    return prop2_bounds_with_L(p, rho, list_size(D), eps);
}

inline BoundsReport bounds_report_with_L(const Pmf& p, double rho, std::int64_t L, double eps) {
    BoundsReport r;
    r.exact = min_moment_with_L(p, rho, L, eps).moment;
    std::tie(r.thm1_upper, r.thm1_lower) = theorem1_bounds_with_L(p, rho, L, eps);
    std::tie(r.prop2_upper, r.prop2_lower) = prop2_bounds_with_L(p, rho, L, eps);
    return r;
}

inline BoundsReport bounds_report(const Pmf& p, double rho, double D, double eps) {
    return bounds_report_with_L(p, rho, list_size(D), eps);
}

struct UpperBoundComparison {
    double z_bound = 0.0;         // Z-based upper bound
    double explicit_bound = 0.0;  // explicit X-based upper bound
    bool z_tighter = false;
};

/// Compares the two upper bounds. The Z-based one is provably no looser when
/// floor(2^D) <= 2; beyond that regime the comparison is reported only.
inline UpperBoundComparison compare_upper_bounds_with_L(const Pmf& p, double rho, std::int64_t L,
                                                        double eps) {
    UpperBoundComparison c;
    c.z_bound = theorem1_bounds_with_L(p, rho, L, eps).first;
    c.explicit_bound = prop2_bounds_with_L(p, rho, L, eps).first;
    c.z_tighter = c.z_bound <= c.explicit_bound + 1e-12;
    return c;
}

inline UpperBoundComparison compare_upper_bounds(const Pmf& p, double rho, double D, double eps) {
    return compare_upper_bounds_with_L(p, rho, list_size(D), eps);
}

} // namespace softguess
