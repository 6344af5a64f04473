#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "corebatch/geometry.hpp"
#include "corebatch/matrix.hpp"
#include "corebatch/projection.hpp"

namespace corebatch {

// Uniform prior over a hypercube, one bound pair for every coordinate.
struct PriorSpec {
    std::size_t dim = 2;
    double low = -1.0;
    double high = 1.0;
};

struct SamplerConfig {
    std::size_t batch_size = 128;
    std::size_t prior_factor = 4;
    std::size_t target_factor = 8;
    bool coreset_prior = true;
    bool coreset_target = true;
    std::optional<std::size_t> projection_dim = 32;  // nullopt disables projection
};

// Draw prior_factor * k points i.i.d. from the hypercube and keep the greedy
// core-set of k. With coreset_prior off this is a plain i.i.d. batch of k and
// matches random_batch for the same seed.
Matrix sample_prior_batch(const PriorSpec& spec, const SamplerConfig& cfg, std::uint64_t seed);

// Pick target_factor * k distinct pool rows, compress them with the greedy
// core-set in the (projected) point space, and hand back the dataset ids of
// the kept rows. With coreset_target off this equals random_batch.
std::vector<std::uint64_t> sample_data_batch(const PointSet& pool, const SamplerConfig& cfg,
                                             std::uint64_t seed);

// Baseline arms: plain i.i.d. prior batch / uniform id sample without
// replacement.
Matrix random_batch(const PriorSpec& spec, std::size_t k, std::uint64_t seed);
std::vector<std::uint64_t> random_batch(std::span<const std::uint64_t> pool_ids, std::size_t k,
                                        std::uint64_t seed);

// First `count` entries of a uniformly random permutation of [0, n).
std::vector<std::size_t> draw_without_replacement(std::size_t n, std::size_t count,
                                                  std::mt19937_64& rng);

}  // namespace corebatch
