#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "corebatch/matrix.hpp"

namespace corebatch {

// Selected rows of a source point set, in selection order, plus the achieved
// max-min distance over the full input.
struct CoresetResult {
    std::vector<std::size_t> indices;
    double coverage_radius = 0.0;
};

enum class Exec { Serial, Parallel };

double squared_distance(std::span<const double> a, std::span<const double> b);
double pairwise_distance(std::span<const double> a, std::span<const double> b);

// Max over all rows of the distance to the nearest selected row.
double coverage_radius(const Matrix& points, std::span<const std::size_t> selected);

// Greedy k-center: start from a random row, then repeatedly add the row
// farthest from the current centers (ties to the lowest row index).
// Identical output for Serial and Parallel execution, bit for bit.
CoresetResult greedy_coreset(const Matrix& points, std::size_t k, std::uint64_t seed,
                             Exec exec = Exec::Parallel);

// Same selection rule with the first center fixed by the caller.
CoresetResult greedy_coreset_from(const Matrix& points, std::size_t k, std::size_t first,
                                  Exec exec = Exec::Parallel);

// Reference selection: recomputes every nearest-center distance from scratch
// each round, O(n k^2 d). Kept as the check on the incremental kernel.
CoresetResult greedy_coreset_reference(const Matrix& points, std::size_t k, std::size_t first);

// Brute-force optimum over all C(n,k) subsets; among optimal subsets returns
// the lexicographically smallest index list. Refuses n > 20.
CoresetResult exact_kcenter(const Matrix& points, std::size_t k);

inline constexpr std::size_t kExactOracleMaxN = 20;

}  // namespace corebatch
