#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "corebatch/errors.hpp"
#include "corebatch/geometry.hpp"
#include "corebatch/matrix.hpp"

namespace corebatch {

// Gaussian random projection, entries i.i.d. N(0, 1/output_dim).
// matrix is output_dim x input_dim.
struct ProjectionMatrix {
    Matrix matrix;
    std::uint64_t seed = 0;

    std::size_t output_dim() const { return matrix.rows; }
    std::size_t input_dim() const { return matrix.cols; }
};

// Feature vectors keyed by dataset index; the stand-in for precomputed
// classifier activations. Values are stored as f32, matching the file format.
struct EmbeddingCache {
    std::size_t dim = 0;
    std::vector<std::uint64_t> ids;
    std::vector<float> values;  // n x dim, row-major

    std::size_t size() const { return ids.size(); }
    const float* row(std::size_t i) const { return values.data() + i * dim; }
};

// Points with their originating dataset ids carried alongside, row for row.
struct PointSet {
    Matrix points;
    std::vector<std::uint64_t> ids;
};

ProjectionMatrix make_projection(std::size_t input_dim, std::size_t output_dim,
                                 std::uint64_t seed);

// Row i of the result is proj.matrix * cache row i; ids pass through.
PointSet project(const EmbeddingCache& cache, const ProjectionMatrix& proj,
                 Exec exec = Exec::Parallel);

// Widening copy without projection (the ablation path).
PointSet to_point_set(const EmbeddingCache& cache);

// Binary cache format, little-endian:
//   magic "SGEC", u32 version = 1, u64 n, u32 d, n u64 ids, n*d f32 values.
void save_cache(const EmbeddingCache& cache, const std::filesystem::path& path);
EmbeddingCache load_cache(const std::filesystem::path& path);

// Text import, one row per line: id,v0,v1,...
EmbeddingCache import_cache_csv(const std::filesystem::path& path);

void validate_cache(const EmbeddingCache& cache);

}  // namespace corebatch
