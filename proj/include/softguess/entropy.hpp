#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "softguess/errors.hpp"
#include "softguess/pmf.hpp"

namespace softguess {

/// Renyi order alpha in (0,1], where 1 stands for the Shannon limit.
/// Orders within 1e-6 of 1 are routed to the Shannon limit to avoid the
/// 1/(1-alpha) blow-up.
struct EntropyOrder {
    double alpha;

    static constexpr double kShannonWindow = 1e-6;

    bool is_shannon() const { return std::abs(alpha - 1.0) <= kShannonWindow; }
};

inline EntropyOrder entropy_order(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw BadParameter("entropy order must lie in (0,1]");
    }
    return EntropyOrder{alpha};
}

inline EntropyOrder shannon_order() { return EntropyOrder{1.0}; }

/// Order 1/(1+rho), the one that characterizes rho-th guessing moments.
inline EntropyOrder order_from_rho(double rho) {
    if (!(rho > 0.0)) throw BadParameter("rho must be > 0");
    return EntropyOrder{1.0 / (1.0 + rho)};
}

namespace detail {

// Masses below this are treated as zero before exponentiation; they arise
// when the truncation boundary mass underflows at an exact-boundary eps.
inline constexpr double kMassFloor = 1e-15;

inline double pow_mass(double m, double alpha) {
    return m > kMassFloor ? std::pow(m, alpha) : 0.0;
}

} // namespace detail

/// Shannon entropy in bits.
inline double shannon_entropy(const Pmf& p) {
    double h = 0.0;
    for (double v : p.probs) h -= v * std::log2(v);
    return h;
}

/// Renyi entropy of order alpha in bits; alpha = 1 gives the Shannon limit.
inline double renyi(const Pmf& p, EntropyOrder order) {
    if (order.is_shannon()) return shannon_entropy(p);
    double s = 0.0;
    for (double v : p.probs) s += detail::pow_mass(v, order.alpha);
    return std::log2(s) / (1.0 - order.alpha);
}

/// Smooth Renyi entropy via the explicit truncation formula. Equals renyi()
/// at eps = 0.
inline double smooth_renyi(const Pmf& p, EntropyOrder order, double eps) {
    if (order.is_shannon()) throw BadParameter("smooth Renyi entropy needs order < 1");
    const SmoothTruncation tr = smooth_truncation(p, eps);
    double s = 0.0;
    for (double v : tr.q) s += detail::pow_mass(v, order.alpha);
    return std::log2(s) / (1.0 - order.alpha);
}

/// Arimoto-Renyi conditional entropy of X given Y (rows of the joint are y).
inline double arimoto_renyi_conditional(const JointPmf& j, EntropyOrder order) {
    if (order.is_shannon()) {
        // Shannon conditional entropy as the limit.
        double h = 0.0;
        for (std::size_t y = 0; y < j.ny(); ++y) {
            const double py = j.p_y(y);
            for (double v : j.matrix[y])
                if (v > 0.0) h -= v * std::log2(v / py);
        }
        return h;
    }
    const double a = order.alpha;
    double outer = 0.0;
    for (const auto& row : j.matrix) {
        double inner = 0.0;
        for (double v : row) inner += detail::pow_mass(v, a);
        outer += std::pow(inner, 1.0 / a);
    }
    return a / (1.0 - a) * std::log2(outer);
}

/// Renner-Wolf conditional smooth Renyi entropy at smoothing 0: the largest
/// Renyi entropy among the conditional rows with positive mass.
inline double renner_wolf_conditional_zero(const JointPmf& j, EntropyOrder order) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < j.ny(); ++y) {
        best = std::max(best, renyi(j.conditional_row(y), order));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Kuzuoka conditional smooth Renyi entropy
// ---------------------------------------------------------------------------

namespace detail {

// Per-row evaluator of S_y(eps) = sum_j Q^eps(j)^alpha over the sorted
// conditional row, with breakpoints at the row's tail cumulative sums.
struct RowPowSum {
    std::vector<double> probs;    // sorted descending, zeros stripped
    std::vector<double> cum;      // cum[i] = sum of probs[0..i]
    std::vector<double> pow_cum;  // same for probs^alpha
    double alpha = 0.5;
    double tol = kDefaultAtol;

    static RowPowSum make(const Pmf& row, double alpha) {
        RowPowSum r;
        r.probs = row.probs;
        r.alpha = alpha;
        r.tol = row.atol * static_cast<double>(row.size());
        r.cum.resize(r.probs.size());
        r.pow_cum.resize(r.probs.size());
        double c = 0.0, pc = 0.0;
        for (std::size_t i = 0; i < r.probs.size(); ++i) {
            c += r.probs[i];
            pc += pow_mass(r.probs[i], alpha);
            r.cum[i] = c;
            r.pow_cum[i] = pc;
        }
        return r;
    }

    double power_sum(double eps) const {
        const double target = 1.0 - eps;
        if (target <= kMassFloor) return 0.0;
        // First index with cum >= target - tol.
        const auto it = std::lower_bound(cum.begin(), cum.end(), target - tol);
        const std::size_t i_star = std::min<std::size_t>(
            static_cast<std::size_t>(it - cum.begin()), probs.size() - 1);
        const double before = i_star == 0 ? 0.0 : cum[i_star - 1];
        const double before_pow = i_star == 0 ? 0.0 : pow_cum[i_star - 1];
        const double q = std::clamp(target - before, 0.0, probs[i_star]);
        return before_pow + pow_mass(q, alpha);
    }

    // f_y(eps) = S_y(eps)^{1/alpha}, the inner term weighted by P_Y(y).
    double f(double eps) const {
        const double s = power_sum(eps);
        return s > 0.0 ? std::pow(s, 1.0 / alpha) : 0.0;
    }
};

struct KuzuokaProblem {
    std::vector<double> py;
    std::vector<RowPowSum> rows;
    double eps = 0.0;

    double objective(const std::vector<double>& eps_y) const {
        double g = 0.0;
        for (std::size_t y = 0; y < py.size(); ++y) g += py[y] * rows[y].f(eps_y[y]);
        return g;
    }
};

// Golden-section minimization of g over [lo, hi] after a coarse bracket scan.
// The per-row terms are piecewise smooth, not certifiably unimodal, so the
// coarse scan picks the bracket first.
template <typename F>
inline std::pair<double, double> line_min(F&& g, double lo, double hi) {
    constexpr int kCoarse = 33;
    double best_t = lo, best_v = g(lo);
    for (int i = 1; i < kCoarse; ++i) {
        const double t = lo + (hi - lo) * i / (kCoarse - 1);
        const double v = g(t);
        if (v < best_v) {
            best_v = v;
            best_t = t;
        }
    }
    const double step = (hi - lo) / (kCoarse - 1);
    double a = std::max(lo, best_t - step);
    double b = std::min(hi, best_t + step);
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 90 && (b - a) > 1e-15; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = g(x2);
        }
    }
    const double mid = 0.5 * (a + b);
    const double vm = g(mid);
    if (vm < best_v) return {mid, vm};
    return {best_t, best_v};
}

// Cyclic pairwise budget exchange on the constraint sum_y P_y eps_y = eps.
// Terminates when no exchange of budget 1e-7 improves the objective by more
// than 1e-12; throws OptimizerNotConverged if descent stalls above that.
inline std::pair<std::vector<double>, double> solve_allocation(const KuzuokaProblem& prob,
                                                               std::vector<double> eps_y) {
    constexpr double kProbeBudget = 1e-7;
    constexpr double kImproveTol = 1e-12;
    const std::size_t m = prob.py.size();
    double cur = prob.objective(eps_y);

    auto pair_bounds = [&](std::size_t a, std::size_t b) {
        // Moving budget t to coordinate a: eps_a + t/P_a, eps_b - t/P_b.
        const double lo = std::max(-eps_y[a] * prob.py[a], (eps_y[b] - 1.0) * prob.py[b]);
        const double hi = std::min((1.0 - eps_y[a]) * prob.py[a], eps_y[b] * prob.py[b]);
        return std::pair<double, double>{lo, hi};
    };
    auto pair_value = [&](std::size_t a, std::size_t b, double t) {
        return prob.py[a] * prob.rows[a].f(eps_y[a] + t / prob.py[a]) +
               prob.py[b] * prob.rows[b].f(eps_y[b] - t / prob.py[b]);
    };

    for (int sweep = 0; sweep < 400; ++sweep) {
        double sweep_gain = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = a + 1; b < m; ++b) {
                const auto [lo, hi] = pair_bounds(a, b);
                if (hi - lo <= 0.0) continue;
                const double base = pair_value(a, b, 0.0);
                auto [t, v] = line_min([&](double tt) { return pair_value(a, b, tt); }, lo, hi);
                if (v < base - 1e-15) {
                    eps_y[a] = std::clamp(eps_y[a] + t / prob.py[a], 0.0, 1.0);
                    eps_y[b] = std::clamp(eps_y[b] - t / prob.py[b], 0.0, 1.0);
                    sweep_gain += base - v;
                }
            }
        }
        cur = prob.objective(eps_y);
        if (sweep_gain < 1e-13) {
            // Converged sweep; verify with the probe exchange.
            double worst_gain = 0.0;
            for (std::size_t a = 0; a < m; ++a) {
                for (std::size_t b = a + 1; b < m; ++b) {
                    const auto [lo, hi] = pair_bounds(a, b);
                    for (double t : {std::max(lo, -kProbeBudget), std::min(hi, kProbeBudget)}) {
                        if (t == 0.0) continue;
                        const double v = pair_value(a, b, t);
                        worst_gain = std::max(worst_gain, pair_value(a, b, 0.0) - v);
                    }
                }
            }
            if (worst_gain <= kImproveTol) return {std::move(eps_y), cur};
            if (sweep >= 398) throw OptimizerNotConverged(worst_gain, kImproveTol);
        }
    }
    throw OptimizerNotConverged(1.0, kImproveTol);
}

} // namespace detail

/// Optimal split of the error budget found by the allocation solver, plus
/// the resulting entropy value.
struct KuzuokaResult {
    double entropy = 0.0;
    std::vector<double> eps_y;
};

inline KuzuokaResult kuzuoka_conditional_smooth_detail(const JointPmf& j, EntropyOrder order,
                                                       double eps) {
    if (order.is_shannon()) throw BadParameter("conditional smooth entropy needs order < 1");
    if (!(eps >= 0.0 && eps < 1.0)) throw BadParameter("eps must lie in [0,1)");
    const double a = order.alpha;

    detail::KuzuokaProblem prob;
    prob.eps = eps;
    for (std::size_t y = 0; y < j.ny(); ++y) {
        prob.py.push_back(j.p_y(y));
        prob.rows.push_back(detail::RowPowSum::make(j.conditional_row(y), a));
    }

    if (eps == 0.0 || j.ny() == 1) {
        // Budget is forced: every eps_y equals eps.
        std::vector<double> eps_y(j.ny(), eps);
        return {a / (1.0 - a) * std::log2(prob.objective(eps_y)), std::move(eps_y)};
    }

    // Multi-start: the uniform split plus, for each y, the budget pushed onto
    // y as far as feasible.
    std::vector<std::vector<double>> starts;
    starts.emplace_back(j.ny(), eps);
    for (std::size_t y = 0; y < j.ny(); ++y) {
        std::vector<double> s(j.ny(), 0.0);
        const double cap = std::min(1.0, eps / prob.py[y]);
        s[y] = cap;
        const double leftover = eps - prob.py[y] * cap;
        if (leftover > 0.0) {
            const double rest = 1.0 - prob.py[y];
            for (std::size_t o = 0; o < j.ny(); ++o)
                if (o != y) s[o] = leftover / rest;
        }
        starts.push_back(std::move(s));
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_eps;
    for (auto& s : starts) {
        auto [alloc, value] = detail::solve_allocation(prob, std::move(s));
        if (value < best) {
            best = value;
            best_eps = std::move(alloc);
        }
    }
    return {a / (1.0 - a) * std::log2(best), std::move(best_eps)};
}

/// Kuzuoka conditional smooth Renyi entropy H^eps_alpha(X|Y) in bits.
/// Equals the Arimoto-Renyi conditional entropy at eps = 0.
inline double kuzuoka_conditional_smooth(const JointPmf& j, EntropyOrder order, double eps) {
    return kuzuoka_conditional_smooth_detail(j, order, eps).entropy;
}

// ---------------------------------------------------------------------------
// Self-information statistics
// ---------------------------------------------------------------------------

/// Entropy, varentropy and third absolute central moment of -log2 P_X(X).
struct SourceStats {
    double h = 0.0;  // bits
    double v = 0.0;  // bits^2
    double t = 0.0;  // bits^3
};

inline SourceStats source_stats(const Pmf& p) {
    const double h = shannon_entropy(p);
    double v = 0.0, t = 0.0;
    for (double m : p.probs) {
        const double d = -std::log2(m) - h;
        v += m * d * d;
        t += m * std::abs(d * d * d);
    }
    return SourceStats{h, v, t};
}

/// Conditional entropy H(X|Y) and conditional varentropy U(X|Y).
inline std::pair<double, double> conditional_stats(const JointPmf& j) {
    double h = 0.0;
    for (std::size_t y = 0; y < j.ny(); ++y) {
        const double py = j.p_y(y);
        for (double v : j.matrix[y])
            if (v > 0.0) h -= v * std::log2(v / py);
    }
    double u = 0.0;
    for (std::size_t y = 0; y < j.ny(); ++y) {
        const double py = j.p_y(y);
        for (double v : j.matrix[y]) {
            if (v > 0.0) {
                const double d = -std::log2(v / py) - h;
                u += v * d * d;
            }
        }
    }
    return {h, u};
}

} // namespace softguess
