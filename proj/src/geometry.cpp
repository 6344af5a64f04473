#include "corebatch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <omp.h>

namespace corebatch {

namespace {

// Squared Euclidean distance with a 4-way unrolled accumulator. The partial
// sums are combined in a fixed order so every caller sees the same value.
inline double sq_dist(const double* a, const double* b, std::size_t d) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t j = 0;
    for (; j + 4 <= d; j += 4) {
        const double d0 = a[j] - b[j];
        const double d1 = a[j + 1] - b[j + 1];
        const double d2 = a[j + 2] - b[j + 2];
        const double d3 = a[j + 3] - b[j + 3];
        s0 += d0 * d0;
        s1 += d1 * d1;
        s2 += d2 * d2;
        s3 += d3 * d3;
    }
    for (; j < d; ++j) {
        const double dj = a[j] - b[j];
        s0 += dj * dj;
    }
    return (s0 + s1) + (s2 + s3);
}

struct Scan {
    double best_d2 = -1.0;
    std::size_t best_idx = 0;
    bool found = false;
};

// (d2, idx) ordering used by the farthest-point argmax: larger distance wins,
// equal distances go to the lower row index.
inline bool beats(double d2, std::size_t idx, const Scan& s) {
    return !s.found || d2 > s.best_d2 || (d2 == s.best_d2 && idx < s.best_idx);
}

// Fold the new center into the nearest-center distances and locate the
// farthest unselected row in the same pass.
Scan update_and_scan_serial(const Matrix& pts, std::size_t center,
                            std::vector<double>& min_d2, const std::vector<char>& taken) {
    const double* c = pts.row(center);
    Scan s;
    for (std::size_t i = 0; i < pts.rows; ++i) {
        const double d2 = sq_dist(pts.row(i), c, pts.cols);
        if (d2 < min_d2[i]) min_d2[i] = d2;
        if (!taken[i] && beats(min_d2[i], i, s)) {
            s.best_d2 = min_d2[i];
            s.best_idx = i;
            s.found = true;
        }
    }
    return s;
}

Scan update_and_scan_parallel(const Matrix& pts, std::size_t center,
                              std::vector<double>& min_d2, const std::vector<char>& taken) {
    const double* c = pts.row(center);
    const std::size_t n = pts.rows;
    Scan global;
#pragma omp parallel
    {
        Scan local;
#pragma omp for schedule(static) nowait
        for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            const double d2 = sq_dist(pts.row(i), c, pts.cols);
            if (d2 < min_d2[i]) min_d2[i] = d2;
            if (!taken[i] && beats(min_d2[i], i, local)) {
                local.best_d2 = min_d2[i];
                local.best_idx = i;
                local.found = true;
            }
        }
#pragma omp critical
        {
            // The (d2, -idx) order is total, so the merge result does not
            // depend on which thread gets here first.
            if (local.found && beats(local.best_d2, local.best_idx, global)) global = local;
        }
    }
    return global;
}

CoresetResult greedy_run(const Matrix& pts, std::size_t k, std::size_t first, Exec exec) {
    const std::size_t n = pts.rows;
    std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
    std::vector<char> taken(n, 0);

    CoresetResult result;
    result.indices.reserve(k);

    std::size_t cur = first;
    for (std::size_t picked = 0; picked < k; ++picked) {
        taken[cur] = 1;
        result.indices.push_back(cur);
        const Scan s = exec == Exec::Parallel
                           ? update_and_scan_parallel(pts, cur, min_d2, taken)
                           : update_and_scan_serial(pts, cur, min_d2, taken);
        if (picked + 1 < k) cur = s.best_idx;
    }

    double worst = 0.0;
    for (double d2 : min_d2) worst = std::max(worst, d2);
    result.coverage_radius = std::sqrt(worst);
    return result;
}

void check_selection_args(const Matrix& pts, std::size_t k) {
    if (pts.rows == 0 || pts.cols == 0)
        throw std::invalid_argument("greedy_coreset: empty point set");
    if (k == 0) throw std::invalid_argument("greedy_coreset: k must be at least 1");
    if (k > pts.rows)
        throw std::invalid_argument("greedy_coreset: k=" + std::to_string(k) +
                                    " exceeds point count n=" + std::to_string(pts.rows));
}

}  // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("squared_distance: dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                    ")");
    return sq_dist(a.data(), b.data(), a.size());
}

double pairwise_distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

double coverage_radius(const Matrix& points, std::span<const std::size_t> selected) {
    if (selected.empty()) throw std::invalid_argument("coverage_radius: empty selection");
    for (std::size_t j : selected)
        if (j >= points.rows)
            throw std::invalid_argument("coverage_radius: index " + std::to_string(j) +
                                        " out of range");
    double worst = 0.0;
    for (std::size_t i = 0; i < points.rows; ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j : selected)
            nearest = std::min(nearest, sq_dist(points.row(i), points.row(j), points.cols));
        worst = std::max(worst, nearest);
    }
    return std::sqrt(worst);
}

CoresetResult greedy_coreset(const Matrix& points, std::size_t k, std::uint64_t seed, Exec exec) {
    check_selection_args(points, k);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, points.rows - 1);
    return greedy_run(points, k, pick(rng), exec);
}

CoresetResult greedy_coreset_from(const Matrix& points, std::size_t k, std::size_t first,
                                  Exec exec) {
    check_selection_args(points, k);
    if (first >= points.rows)
        throw std::invalid_argument("greedy_coreset_from: first index out of range");
    return greedy_run(points, k, first, exec);
}

CoresetResult greedy_coreset_reference(const Matrix& points, std::size_t k, std::size_t first) {
    check_selection_args(points, k);
    if (first >= points.rows)
        throw std::invalid_argument("greedy_coreset_reference: first index out of range");

    CoresetResult result;
    result.indices.push_back(first);
    for (std::size_t picked = 1; picked < k; ++picked) {
        Scan s;
        for (std::size_t i = 0; i < points.rows; ++i) {
            if (std::find(result.indices.begin(), result.indices.end(), i) !=
                result.indices.end())
                continue;
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t j : result.indices)
                nearest = std::min(nearest, sq_dist(points.row(i), points.row(j), points.cols));
            if (beats(nearest, i, s)) {
                s.best_d2 = nearest;
                s.best_idx = i;
                s.found = true;
            }
        }
        result.indices.push_back(s.best_idx);
    }
    result.coverage_radius = coverage_radius(points, result.indices);
    return result;
}

CoresetResult exact_kcenter(const Matrix& points, std::size_t k) {
    check_selection_args(points, k);
    const std::size_t n = points.rows;
    if (n > kExactOracleMaxN)
        throw std::invalid_argument("exact_kcenter: instance too large for oracle (n=" +
                                    std::to_string(n) + ", cap " +
                                    std::to_string(kExactOracleMaxN) + ")");

    // Walk subsets in lexicographic order; strict improvement keeps the first
    // (lexicographically smallest) optimal subset.
    std::vector<std::size_t> subset(k);
    for (std::size_t i = 0; i < k; ++i) subset[i] = i;

    CoresetResult best;
    best.coverage_radius = std::numeric_limits<double>::infinity();

    for (;;) {
        const double r = coverage_radius(points, subset);
        if (r < best.coverage_radius) {
            best.coverage_radius = r;
            best.indices = subset;
        }
        // Advance to the next k-combination of [0, n).
        std::size_t i = k;
        while (i > 0 && subset[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) break;
        ++subset[i - 1];
        for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
    return best;
}

}  // namespace corebatch
