#include "corebatch/projection.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <string>
#include <unordered_set>

#include "corebatch/wire.hpp"

namespace corebatch {

using wire::get_bytes;
using wire::get_u32;
using wire::get_u64;
using wire::put_f32;
using wire::put_u32;
using wire::put_u64;

namespace {

constexpr char kMagic[4] = {'S', 'G', 'E', 'C'};
constexpr std::uint32_t kVersion = 1;

// Inner product laid out as axpy over the output row so the compiler can
// vectorize without reordering any accumulation.
void project_row(const float* src, std::size_t d, const Matrix& mt /* d x m */, double* dst) {
    const std::size_t m = mt.cols;
    std::fill(dst, dst + m, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        const double x = static_cast<double>(src[j]);
        const double* col = mt.row(j);
        for (std::size_t r = 0; r < m; ++r) dst[r] += x * col[r];
    }
}

}  // namespace

ProjectionMatrix make_projection(std::size_t input_dim, std::size_t output_dim,
                                 std::uint64_t seed) {
    if (input_dim == 0 || output_dim == 0)
        throw std::invalid_argument("make_projection: dimensions must be positive");
    if (output_dim > input_dim)
        throw std::invalid_argument("make_projection: output_dim " + std::to_string(output_dim) +
                                    " exceeds input_dim " + std::to_string(input_dim));
    ProjectionMatrix p;
    p.seed = seed;
    p.matrix = Matrix(output_dim, input_dim);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(output_dim)));
    for (double& v : p.matrix.data) v = gauss(rng);
    return p;
}

PointSet project(const EmbeddingCache& cache, const ProjectionMatrix& proj, Exec exec) {
    if (cache.dim != proj.input_dim())
        throw std::invalid_argument("project: cache dim " + std::to_string(cache.dim) +
                                    " does not match projection input dim " +
                                    std::to_string(proj.input_dim()));
    const std::size_t n = cache.size();
    const std::size_t m = proj.output_dim();

    // Transposed copy once per call; the per-row kernel then walks contiguous
    // output slices.
    Matrix mt(proj.input_dim(), m);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t j = 0; j < proj.input_dim(); ++j) mt.at(j, r) = proj.matrix.at(r, j);

    PointSet out;
    out.ids = cache.ids;
    out.points = Matrix(n, m);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            project_row(cache.row(static_cast<std::size_t>(i)), cache.dim, mt,
                        out.points.row(static_cast<std::size_t>(i)));
    } else {
        for (std::size_t i = 0; i < n; ++i)
            project_row(cache.row(i), cache.dim, mt, out.points.row(i));
    }
    return out;
}

PointSet to_point_set(const EmbeddingCache& cache) {
    PointSet out;
    out.ids = cache.ids;
    out.points = Matrix(cache.size(), cache.dim);
    for (std::size_t i = 0; i < cache.size(); ++i)
        for (std::size_t j = 0; j < cache.dim; ++j)
            out.points.at(i, j) = static_cast<double>(cache.row(i)[j]);
    return out;
}

void validate_cache(const EmbeddingCache& cache) {
    if (cache.dim == 0) throw FormatError("cache dimension is zero");
    if (cache.values.size() != cache.ids.size() * cache.dim)
        throw FormatError("cache value count does not match n*d");
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t id : cache.ids)
        if (!seen.insert(id).second)
            throw FormatError("duplicate id " + std::to_string(id) + " in cache");
    for (std::size_t i = 0; i < cache.values.size(); ++i)
        if (!std::isfinite(cache.values[i]))
            throw FormatError("non-finite value at flat index " + std::to_string(i));
}

void save_cache(const EmbeddingCache& cache, const std::filesystem::path& path) {
    validate_cache(cache);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open for writing: " + path.string());
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u64(os, cache.size());
    put_u32(os, static_cast<std::uint32_t>(cache.dim));
    for (std::uint64_t id : cache.ids) put_u64(os, id);
    for (float v : cache.values) put_f32(os, v);
    os.flush();
    if (!os) throw FormatError("write failed: " + path.string());
}

EmbeddingCache load_cache(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open: " + path.string());

    char magic[4];
    if (!get_bytes(is, magic, 4)) throw FormatError("cache truncated in magic");
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad magic, not a cache file");

    const std::uint32_t version = get_u32(is, "version");
    if (version != kVersion)
        throw FormatError("unsupported cache version " + std::to_string(version));

    const std::uint64_t n = get_u64(is, "point count");
    const std::uint32_t d = get_u32(is, "dimension");
    if (d == 0) throw FormatError("cache dimension is zero");

    EmbeddingCache cache;
    cache.dim = d;
    cache.ids.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) cache.ids[i] = get_u64(is, "ids");
    cache.values.resize(static_cast<std::size_t>(n) * d);
    for (std::size_t i = 0; i < cache.values.size(); ++i)
        cache.values[i] = std::bit_cast<float>(get_u32(is, "values"));

    // Anything after the value block is not ours.
    char extra;
    if (is.read(&extra, 1); is.gcount() == 1)
        throw FormatError("trailing bytes after value block");

    validate_cache(cache);
    return cache;
}

EmbeddingCache import_cache_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open: " + path.string());

    EmbeddingCache cache;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const char* p = line.data();
        const char* end = line.data() + line.size();

        std::uint64_t id = 0;
        auto [pid, eid] = std::from_chars(p, end, id);
        if (eid != std::errc{})
            throw FormatError("line " + std::to_string(lineno) + ": bad id field");
        p = pid;

        std::vector<float> row;
        while (p != end) {
            if (*p != ',')
                throw FormatError("line " + std::to_string(lineno) + ": expected ','");
            ++p;
            float v = 0.0f;
            auto [pv, ev] = std::from_chars(p, end, v);
            if (ev != std::errc{})
                throw FormatError("line " + std::to_string(lineno) + ": bad value field");
            p = pv;
            row.push_back(v);
        }
        if (row.empty())
            throw FormatError("line " + std::to_string(lineno) + ": no values");
        if (cache.dim == 0)
            cache.dim = row.size();
        else if (row.size() != cache.dim)
            throw FormatError("line " + std::to_string(lineno) + ": expected " +
                              std::to_string(cache.dim) + " values, got " +
                              std::to_string(row.size()));
        cache.ids.push_back(id);
        cache.values.insert(cache.values.end(), row.begin(), row.end());
    }
    if (cache.ids.empty()) throw FormatError("empty cache file: " + path.string());
    validate_cache(cache);
    return cache;
}

}  // namespace corebatch
