#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "softguess/errors.hpp"

namespace softguess {

inline constexpr double kDefaultAtol = 1e-9;

/// A validated probability vector, sorted in descending order with all
/// zero-mass atoms removed. probs[0] is the most likely symbol; symbols are
/// identified with their 1-based rank throughout the library.
struct Pmf {
    std::vector<double> probs;
    double atol = kDefaultAtol;

    std::size_t size() const { return probs.size(); }
    double operator[](std::size_t i) const { return probs[i]; }

    double log_alphabet_size() const { return std::log2(static_cast<double>(probs.size())); }
};

/// Joint distribution of (X, Y). Row y holds the masses P_{X,Y}(. , y).
/// Rows with zero total mass are stripped at construction; zero entries
/// inside a row are allowed.
struct JointPmf {
    std::vector<std::vector<double>> matrix;
    double atol = kDefaultAtol;

    std::size_t ny() const { return matrix.size(); }
    std::size_t nx() const { return matrix.empty() ? 0 : matrix[0].size(); }

    double p_y(std::size_t y) const {
        return std::accumulate(matrix[y].begin(), matrix[y].end(), 0.0);
    }

    Pmf marginal_x() const;
    Pmf conditional_row(std::size_t y) const;
    Pmf flatten() const;
};

/// The truncated sub-distribution that attains the smooth Renyi entropy:
/// the first i_star masses of the sorted pmf, with the i_star-th reduced so
/// that the total is exactly 1 - eps.
struct SmoothTruncation {
    std::size_t i_star = 0;         // 1-based index of the boundary atom
    std::vector<double> q;          // i_star entries, sum = 1 - eps

    double mass() const { return std::accumulate(q.begin(), q.end(), 0.0); }
};

inline Pmf make_pmf(std::vector<double> raw, double atol = kDefaultAtol) {
    if (raw.empty()) throw EmptyInput();
    const double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
    if (std::abs(sum - 1.0) > atol * static_cast<double>(raw.size())) {
        throw NotNormalized(sum);
    }
    for (double v : raw) {
        if (v < 0.0 || !std::isfinite(v)) throw BadParameter("pmf entries must be finite and >= 0");
    }
    // Stable descending sort; ties keep input order.
    std::stable_sort(raw.begin(), raw.end(), [](double a, double b) { return a > b; });
    while (!raw.empty() && raw.back() == 0.0) raw.pop_back();
    if (raw.empty()) throw EmptyInput();
    return Pmf{std::move(raw), atol};
}

/// Wraps an already-descending vector without re-sorting.
inline Pmf pmf_from_sorted(std::vector<double> sorted, double atol = kDefaultAtol) {
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        if (sorted[i] + atol < sorted[i + 1]) {
            throw BadParameter("pmf_from_sorted: vector is not descending");
        }
    }
    return Pmf{std::move(sorted), atol};
}

inline JointPmf make_joint(std::vector<std::vector<double>> matrix, double atol = kDefaultAtol) {
    if (matrix.empty() || matrix[0].empty()) throw EmptyInput();
    const std::size_t nx = matrix[0].size();
    double sum = 0.0;
    for (const auto& row : matrix) {
        if (row.size() != nx) throw BadParameter("joint pmf rows must have equal length");
        for (double v : row) {
            if (v < 0.0 || !std::isfinite(v)) throw BadParameter("joint entries must be finite and >= 0");
            sum += v;
        }
    }
    if (std::abs(sum - 1.0) > atol * static_cast<double>(nx * matrix.size())) {
        throw NotNormalized(sum);
    }
    // Strip side-information symbols that never occur.
    std::vector<std::vector<double>> kept;
    kept.reserve(matrix.size());
    for (auto& row : matrix) {
        const double rs = std::accumulate(row.begin(), row.end(), 0.0);
        if (rs > 0.0) kept.push_back(std::move(row));
    }
    if (kept.empty()) throw EmptyInput();
    return JointPmf{std::move(kept), atol};
}

inline Pmf JointPmf::marginal_x() const {
    std::vector<double> px(nx(), 0.0);
    for (const auto& row : matrix)
        for (std::size_t x = 0; x < row.size(); ++x) px[x] += row[x];
    return make_pmf(std::move(px), atol);
}

inline Pmf JointPmf::conditional_row(std::size_t y) const {
    const double py = p_y(y);
    std::vector<double> row;
    row.reserve(nx());
    for (double v : matrix[y]) row.push_back(v / py);
    return make_pmf(std::move(row), atol);
}

inline Pmf JointPmf::flatten() const {
    std::vector<double> all;
    all.reserve(nx() * ny());
    for (const auto& row : matrix) all.insert(all.end(), row.begin(), row.end());
    return make_pmf(std::move(all), atol);
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

inline Pmf dyadic_pmf(std::size_t m) {
    if (m < 1) throw BadParameter("dyadic pmf needs m >= 1");
    std::vector<double> p;
    p.reserve(m);
    for (std::size_t i = 1; i + 1 <= m; ++i) p.push_back(std::exp2(-static_cast<double>(i)));
    p.push_back(std::exp2(-static_cast<double>(m - 1)));
    return pmf_from_sorted(std::move(p));
}

inline Pmf uniform_pmf(std::size_t m) {
    if (m < 1) throw BadParameter("uniform pmf needs m >= 1");
    return pmf_from_sorted(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

inline Pmf bernoulli_pmf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw BadParameter("bernoulli parameter must lie in (0,1)");
    return Pmf{{std::max(p, 1.0 - p), std::min(p, 1.0 - p)}, kDefaultAtol};
}

namespace detail {

// Minimal deterministic PRNG pipeline (splitmix64 seeded xorshift-style
// stream) so that generated instances are reproducible across platforms;
// std::*_distribution output is implementation-defined.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in (0,1].
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Exponential(1) via inverse transform.
    double next_exponential() { return -std::log(next_unit()); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }
};

} // namespace detail

/// Seeded sample from the interior of the probability simplex (Dirichlet(1)).
inline Pmf random_pmf(std::size_t m, std::uint64_t seed) {
    if (m < 1) throw BadParameter("random pmf needs m >= 1");
    detail::Rng rng(seed);
    std::vector<double> p(m);
    double sum = 0.0;
    for (auto& v : p) {
        v = rng.next_exponential();
        sum += v;
    }
    for (auto& v : p) v /= sum;
    std::sort(p.begin(), p.end(), std::greater<>());
    return Pmf{std::move(p), kDefaultAtol};
}

/// Seeded joint distribution with strictly positive entries.
inline JointPmf random_joint(std::size_t ny, std::size_t nx, std::uint64_t seed) {
    if (ny < 1 || nx < 1) throw BadParameter("random joint needs ny, nx >= 1");
    detail::Rng rng(seed);
    std::vector<std::vector<double>> m(ny, std::vector<double>(nx));
    double sum = 0.0;
    for (auto& row : m)
        for (auto& v : row) {
            v = rng.next_exponential();
            sum += v;
        }
    for (auto& row : m)
        for (auto& v : row) v /= sum;
    return JointPmf{std::move(m), kDefaultAtol};
}

// ---------------------------------------------------------------------------
// List size and the derived list-index variable Z
// ---------------------------------------------------------------------------

/// floor(2^D), robust against floating-point underflow of the floor: a D
/// within 2^-40 of log2(k) for an integer k snaps to k.
inline std::int64_t list_size(double D) {
    if (!(D >= 0.0)) throw NegativeDistortion(D);
    if (D >= 62.0) return std::int64_t{1} << 62;  // saturates; covers any finite alphabet
    const double x = std::exp2(D);
    const auto k = static_cast<std::int64_t>(std::floor(x));
    constexpr double snap = 0x1.0p-40;
    for (std::int64_t cand : {k, k + 1}) {
        if (cand >= 1 && std::abs(D - std::log2(static_cast<double>(cand))) <= snap) return cand;
    }
    return k;
}

inline SmoothTruncation smooth_truncation(const Pmf& p, double eps) {
    if (!(eps >= 0.0 && eps < 1.0)) throw BadParameter("eps must lie in [0,1)");
    const double target = 1.0 - eps;
    const double tol = p.atol * static_cast<double>(p.size());
    double cum = 0.0;
    std::size_t i_star = p.size();
    double before = 0.0;  // cumulative mass of the first i_star - 1 atoms
    for (std::size_t i = 0; i < p.size(); ++i) {
        before = cum;
        cum += p.probs[i];
        if (cum >= target - tol) {
            i_star = i + 1;
            break;
        }
    }
    std::vector<double> q(p.probs.begin(), p.probs.begin() + static_cast<std::ptrdiff_t>(i_star));
    q.back() = std::clamp(target - before, 0.0, p.probs[i_star - 1]);
    return SmoothTruncation{i_star, std::move(q)};
}

/// Masses of the list index Z = ceil(rank / L): consecutive blocks of L
/// sorted atoms merged into one symbol. The induced order is already
/// descending because p is descending; this is checked, not re-sorted.
inline Pmf z_variable(const Pmf& p, std::int64_t L) {
    if (L < 1) throw BadParameter("list size must be >= 1");
    if (L == 1) return p;
    std::vector<double> z;
    z.reserve((p.size() + static_cast<std::size_t>(L) - 1) / static_cast<std::size_t>(L));
    for (std::size_t start = 0; start < p.size(); start += static_cast<std::size_t>(L)) {
        const std::size_t stop = std::min(p.size(), start + static_cast<std::size_t>(L));
        double m = 0.0;
        for (std::size_t j = start; j < stop; ++j) m += p.probs[j];
        z.push_back(m);
    }
    return pmf_from_sorted(std::move(z), p.atol);
}

// ---------------------------------------------------------------------------
// Run-length i.i.d. extension (type classes)
// ---------------------------------------------------------------------------

/// One group of equiprobable sequences in the sorted n-fold product pmf.
struct Run {
    double value = 0.0;        // probability of each sequence in the group
    std::int64_t count = 0;    // number of sequences
};

/// Sorted product pmf stored as runs; sum(value * count) = 1.
struct RunPmf {
    std::vector<Run> runs;
    std::int64_t total_atoms = 0;
    double atol = kDefaultAtol;
};

struct ExtensionBudget {
    // Keeps every sequence index and multiplicity exactly representable in a
    // double, and bounds the number of type classes enumerated.
    double max_alphabet_bits = 52.0;
    std::size_t max_runs = 10'000'000;
};

namespace detail {

inline void enumerate_types(const Pmf& base, int n, std::vector<Run>& out) {
    const std::size_t m = base.size();
    std::vector<int> counts(m, 0);
    // Depth-first over compositions of n into m parts; multiplicity built
    // incrementally as a product of binomials (exact in double within budget).
    auto rec = [&](auto&& self, std::size_t i, int left, double value, double mult) -> void {
        if (i + 1 == m) {
            out.push_back(Run{value * std::pow(base.probs[i], left),
                              static_cast<std::int64_t>(mult)});
            return;
        }
        double choose = 1.0;  // C(left, k), updated incrementally
        for (int k = 0; k <= left; ++k) {
            if (k > 0) choose = choose * static_cast<double>(left - k + 1) / static_cast<double>(k);
            self(self, i + 1, left - k, value * std::pow(base.probs[i], k), mult * choose);
        }
    };
    rec(rec, 0, n, 1.0, 1.0);
}

} // namespace detail

inline RunPmf iid_extension(const Pmf& base, int n, const ExtensionBudget& budget = {}) {
    if (n < 1) throw BadParameter("iid extension needs n >= 1");
    const double bits = static_cast<double>(n) * std::log2(static_cast<double>(base.size()));
    if (bits > budget.max_alphabet_bits) {
        throw TooLarge("iid extension of " + std::to_string(base.size()) + "^" +
                       std::to_string(n) + " sequences exceeds the " +
                       std::to_string(budget.max_alphabet_bits) + "-bit budget");
    }
    // Number of type classes: C(n + m - 1, m - 1).
    double n_types = 1.0;
    for (std::size_t j = 1; j < base.size(); ++j) {
        n_types *= static_cast<double>(n + j) / static_cast<double>(j);
        if (n_types > static_cast<double>(budget.max_runs)) {
            throw TooLarge("type-class count exceeds the run budget of " +
                           std::to_string(budget.max_runs));
        }
    }

    std::vector<Run> runs;
    runs.reserve(static_cast<std::size_t>(n_types) + 1);
    detail::enumerate_types(base, n, runs);
    std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) { return a.value > b.value; });

    // Merge exactly-equal probabilities.
    std::vector<Run> merged;
    merged.reserve(runs.size());
    for (const Run& r : runs) {
        if (!merged.empty() && merged.back().value == r.value) {
            merged.back().count += r.count;
        } else {
            merged.push_back(r);
        }
    }
    std::int64_t total = 0;
    for (const Run& r : merged) total += r.count;
    return RunPmf{std::move(merged), total, base.atol};
}

/// Expands a run-length pmf into an explicit one (small cases only).
inline Pmf expand_runs(const RunPmf& rp) {
    std::vector<double> p;
    p.reserve(static_cast<std::size_t>(rp.total_atoms));
    for (const Run& r : rp.runs)
        for (std::int64_t k = 0; k < r.count; ++k) p.push_back(r.value);
    return pmf_from_sorted(std::move(p), rp.atol);
}

/// n-fold product of a joint distribution, rows indexed by y-tuples.
inline JointPmf product_extension(const JointPmf& j, int n) {
    if (n < 1) throw BadParameter("product extension needs n >= 1");
    std::vector<std::vector<double>> cur = j.matrix;
    for (int step = 1; step < n; ++step) {
        std::vector<std::vector<double>> next;
        next.reserve(cur.size() * j.ny());
        for (const auto& row : cur) {
            for (const auto& jrow : j.matrix) {
                std::vector<double> prod;
                prod.reserve(row.size() * jrow.size());
                for (double a : row)
                    for (double b : jrow) prod.push_back(a * b);
                next.push_back(std::move(prod));
            }
        }
        cur = std::move(next);
        if (cur.size() * cur[0].size() > 50'000'000) {
            throw TooLarge("product extension grew past the 5e7-entry budget");
        }
    }
    return JointPmf{std::move(cur), j.atol};
}

} // namespace softguess
