#include "corebatch/sampling.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace corebatch {

namespace {

void check_prior(const PriorSpec& spec) {
    if (spec.dim == 0) throw std::invalid_argument("prior dim must be positive");
    if (!(spec.low < spec.high))
        throw std::invalid_argument("prior bounds must satisfy low < high");
}

void check_config(const SamplerConfig& cfg) {
    if (cfg.batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    if (cfg.prior_factor == 0 || cfg.target_factor == 0)
        throw std::invalid_argument("oversampling factors must be at least 1");
}

Matrix draw_uniform(const PriorSpec& spec, std::size_t count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(spec.low, spec.high);
    Matrix out(count, spec.dim);
    for (double& v : out.data) v = u(rng);
    return out;
}

}  // namespace

std::vector<std::size_t> draw_without_replacement(std::size_t n, std::size_t count,
                                                  std::mt19937_64& rng) {
    if (count > n) throw std::invalid_argument("cannot draw more rows than the pool holds");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates: only the first `count` slots are needed.
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(count);
    return idx;
}

Matrix sample_prior_batch(const PriorSpec& spec, const SamplerConfig& cfg, std::uint64_t seed) {
    check_prior(spec);
    check_config(cfg);
    std::mt19937_64 rng(seed);
    if (!cfg.coreset_prior) return draw_uniform(spec, cfg.batch_size, rng);

    const std::size_t n = cfg.prior_factor * cfg.batch_size;
    const Matrix pool = draw_uniform(spec, n, rng);
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    const CoresetResult sel = greedy_coreset_from(pool, cfg.batch_size, first(rng));
    return take_rows(pool, sel.indices);
}

std::vector<std::uint64_t> sample_data_batch(const PointSet& pool, const SamplerConfig& cfg,
                                             std::uint64_t seed) {
    check_config(cfg);
    if (pool.points.rows != pool.ids.size())
        throw std::invalid_argument("pool rows and ids disagree");
    if (!cfg.coreset_target) return random_batch(pool.ids, cfg.batch_size, seed);

    const std::size_t n = cfg.target_factor * cfg.batch_size;
    if (pool.points.rows < n)
        throw std::invalid_argument("pool exhausted: need " + std::to_string(n) +
                                    " rows, pool has " + std::to_string(pool.points.rows));

    std::mt19937_64 rng(seed);
    const std::vector<std::size_t> rows = draw_without_replacement(pool.points.rows, n, rng);
    const Matrix sub = take_rows(pool.points, rows);
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    const CoresetResult sel = greedy_coreset_from(sub, cfg.batch_size, first(rng));

    std::vector<std::uint64_t> ids;
    ids.reserve(cfg.batch_size);
    for (std::size_t i : sel.indices) ids.push_back(pool.ids[rows[i]]);
    return ids;
}

Matrix random_batch(const PriorSpec& spec, std::size_t k, std::uint64_t seed) {
    check_prior(spec);
    if (k == 0) throw std::invalid_argument("k must be positive");
    std::mt19937_64 rng(seed);
    return draw_uniform(spec, k, rng);
}

std::vector<std::uint64_t> random_batch(std::span<const std::uint64_t> pool_ids, std::size_t k,
                                        std::uint64_t seed) {
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (k > pool_ids.size())
        throw std::invalid_argument("k=" + std::to_string(k) + " exceeds pool size " +
                                    std::to_string(pool_ids.size()));
    std::mt19937_64 rng(seed);
    const std::vector<std::size_t> rows = draw_without_replacement(pool_ids.size(), k, rng);
    std::vector<std::uint64_t> ids;
    ids.reserve(k);
    for (std::size_t i : rows) ids.push_back(pool_ids[i]);
    return ids;
}

}  // namespace corebatch
