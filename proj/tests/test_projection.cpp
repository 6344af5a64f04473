#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "corebatch/projection.hpp"

using namespace corebatch;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("corebatch_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

EmbeddingCache make_cache(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> gauss(0.0f, 1.0f);
    EmbeddingCache c;
    c.dim = d;
    c.ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.ids[i] = 1000 + i;
    c.values.resize(n * d);
    for (float& v : c.values) v = gauss(rng);
    return c;
}

std::vector<char> slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::vector<char>((std::istreambuf_iterator<char>(is)),
                             std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("make_projection shape, determinism and moments") {
    const auto p = make_projection(512, 64, 7);
    CHECK(p.output_dim() == 64);
    CHECK(p.input_dim() == 512);

    const auto q = make_projection(512, 64, 7);
    CHECK(p.matrix == q.matrix);

    const auto r = make_projection(512, 64, 8);
    CHECK(p.matrix != r.matrix);

    // Entries should look like N(0, 1/m): 32768 draws give tight bounds.
    double sum = 0.0, sumsq = 0.0;
    for (double v : p.matrix.data) {
        sum += v;
        sumsq += v * v;
    }
    const double n = static_cast<double>(p.matrix.data.size());
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    const double expected_var = 1.0 / 64.0;
    CHECK(std::abs(mean) < 4.0 * std::sqrt(expected_var / n));
    CHECK(var == doctest::Approx(expected_var).epsilon(0.05));

    CHECK_THROWS_AS((void)make_projection(8, 9, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)make_projection(0, 0, 1), std::invalid_argument);
}

TEST_CASE("project against an identity fixture") {
    EmbeddingCache cache = make_cache(6, 4, 3);

    ProjectionMatrix ident;
    ident.matrix = Matrix(4, 4);
    for (std::size_t i = 0; i < 4; ++i) ident.matrix.at(i, i) = 1.0;

    const PointSet out = project(cache, ident);
    REQUIRE(out.points.rows == 6);
    REQUIRE(out.points.cols == 4);
    CHECK(out.ids == cache.ids);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(out.points.at(i, j) == static_cast<double>(cache.row(i)[j]));

    // Identity projection preserves every pairwise distance exactly.
    const PointSet raw = to_point_set(cache);
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = a + 1; b < 6; ++b)
            CHECK(pairwise_distance(out.points.row_span(a), out.points.row_span(b)) ==
                  pairwise_distance(raw.points.row_span(a), raw.points.row_span(b)));
}

TEST_CASE("project basics: zero vector, basis vector, linearity") {
    const auto proj = make_projection(8, 3, 11);

    EmbeddingCache cache;
    cache.dim = 8;
    cache.ids = {0, 1, 2, 3};
    cache.values.assign(4 * 8, 0.0f);
    cache.values[1 * 8 + 5] = 1.0f;         // e_5
    for (std::size_t j = 0; j < 8; ++j) {   // two dense rows for linearity
        cache.values[2 * 8 + j] = 0.25f * static_cast<float>(j) - 1.0f;
        cache.values[3 * 8 + j] = 0.5f - 0.125f * static_cast<float>(j);
    }

    const PointSet out = project(cache, proj);

    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(out.points.at(0, r) == 0.0);                    // zero maps to zero
        CHECK(out.points.at(1, r) ==
              doctest::Approx(proj.matrix.at(r, 5)).epsilon(1e-12));  // column pick
    }

    // project(a*u + b*v) == a*project(u) + b*project(v)
    const double alpha = 0.75, beta = -1.5;
    EmbeddingCache combo;
    combo.dim = 8;
    combo.ids = {9};
    combo.values.resize(8);
    for (std::size_t j = 0; j < 8; ++j)
        combo.values[j] = static_cast<float>(alpha * cache.values[2 * 8 + j] +
                                             beta * cache.values[3 * 8 + j]);
    const PointSet cp = project(combo, proj);
    for (std::size_t r = 0; r < 3; ++r) {
        const double want = alpha * out.points.at(2, r) + beta * out.points.at(3, r);
        CHECK(cp.points.at(0, r) == doctest::Approx(want).epsilon(1e-6));
    }

    EmbeddingCache wrong = make_cache(2, 5, 1);
    CHECK_THROWS_AS((void)project(wrong, proj), std::invalid_argument);
}

TEST_CASE("projected distances concentrate around the originals") {
    // 100 standard-Gaussian points in 512-d through a 512->64 projection.
    const std::size_t n = 100;
    EmbeddingCache cache = make_cache(n, 512, 21);
    const auto proj = make_projection(512, 64, 22);
    const PointSet lo = project(cache, proj);
    const PointSet hi = to_point_set(cache);

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    double ratio_sum = 0.0;
    int pairs = 0, in_band = 0;
    while (pairs < 100) {
        const std::size_t a = pick(rng), b = pick(rng);
        if (a == b) continue;
        const double d_hi = pairwise_distance(hi.points.row_span(a), hi.points.row_span(b));
        const double d_lo = pairwise_distance(lo.points.row_span(a), lo.points.row_span(b));
        const double ratio = d_lo / d_hi;
        ratio_sum += ratio;
        if (ratio >= 0.6 && ratio <= 1.4) ++in_band;
        ++pairs;
    }
    const double mean_ratio = ratio_sum / pairs;
    CHECK(mean_ratio > 0.9);
    CHECK(mean_ratio < 1.1);
    CHECK(in_band >= 95);
}

TEST_CASE("parallel projection matches serial projection bit for bit") {
    EmbeddingCache cache = make_cache(37, 48, 77);
    const auto proj = make_projection(48, 16, 78);
    const PointSet a = project(cache, proj, Exec::Parallel);
    const PointSet b = project(cache, proj, Exec::Serial);
    CHECK(a.points == b.points);
    CHECK(a.ids == b.ids);
}

TEST_CASE("cache round-trip is byte-exact") {
    TempDir tmp;
    const EmbeddingCache cache = make_cache(3, 4, 13);
    const fs::path f1 = tmp.path / "a.cache";
    const fs::path f2 = tmp.path / "b.cache";

    save_cache(cache, f1);
    const EmbeddingCache back = load_cache(f1);
    CHECK(back.dim == cache.dim);
    CHECK(back.ids == cache.ids);
    CHECK(back.values == cache.values);

    save_cache(back, f2);
    CHECK(slurp(f1) == slurp(f2));
}

TEST_CASE("cache load rejects malformed files") {
    TempDir tmp;

    SUBCASE("wrong magic") {
        const fs::path f = tmp.path / "bad.cache";
        std::ofstream(f, std::ios::binary) << "NOPE garbage";
        CHECK_THROWS_WITH_AS((void)load_cache(f), doctest::Contains("bad magic"), FormatError);
    }
    SUBCASE("empty file") {
        const fs::path f = tmp.path / "empty.cache";
        std::ofstream(f, std::ios::binary);
        CHECK_THROWS_WITH_AS((void)load_cache(f), doctest::Contains("magic"), FormatError);
    }
    SUBCASE("truncated values") {
        const fs::path f = tmp.path / "trunc.cache";
        save_cache(make_cache(4, 4, 1), f);
        const auto bytes = slurp(f);
        std::ofstream os(f, std::ios::binary);
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 7));
        os.close();
        CHECK_THROWS_WITH_AS((void)load_cache(f), doctest::Contains("truncated"), FormatError);
    }
    SUBCASE("bad version") {
        const fs::path f = tmp.path / "vers.cache";
        save_cache(make_cache(2, 2, 1), f);
        auto bytes = slurp(f);
        bytes[4] = 9;  // version field
        std::ofstream os(f, std::ios::binary);
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        os.close();
        CHECK_THROWS_WITH_AS((void)load_cache(f), doctest::Contains("version"), FormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS((void)load_cache(tmp.path / "nope.cache"), FormatError);
    }
}

TEST_CASE("csv import matches direct construction") {
    TempDir tmp;

    EmbeddingCache direct;
    direct.dim = 3;
    direct.ids = {5, 17, 2};
    direct.values = {1.5f, -2.25f, 0.0f, 3.0f, 0.125f, -8.0f, 100.0f, 0.5f, -0.75f};

    const fs::path csv = tmp.path / "in.csv";
    {
        std::ofstream os(csv);
        os << "5,1.5,-2.25,0\n";
        os << "17,3,0.125,-8\n";
        os << "2,100,0.5,-0.75\n";
    }
    const EmbeddingCache imported = import_cache_csv(csv);
    CHECK(imported.dim == direct.dim);
    CHECK(imported.ids == direct.ids);
    CHECK(imported.values == direct.values);

    // import -> binary save must equal direct construction -> binary save
    const fs::path f1 = tmp.path / "direct.cache";
    const fs::path f2 = tmp.path / "imported.cache";
    save_cache(direct, f1);
    save_cache(imported, f2);
    CHECK(slurp(f1) == slurp(f2));
}

TEST_CASE("csv import rejects malformed rows") {
    TempDir tmp;
    const fs::path csv = tmp.path / "bad.csv";

    SUBCASE("ragged row") {
        std::ofstream(csv) << "1,1.0,2.0\n2,3.0\n";
        CHECK_THROWS_WITH_AS((void)import_cache_csv(csv), doctest::Contains("line 2"),
                             FormatError);
    }
    SUBCASE("bad number") {
        std::ofstream(csv) << "1,1.0,zap\n";
        CHECK_THROWS_AS((void)import_cache_csv(csv), FormatError);
    }
    SUBCASE("duplicate ids") {
        std::ofstream(csv) << "1,1.0\n1,2.0\n";
        CHECK_THROWS_WITH_AS((void)import_cache_csv(csv), doctest::Contains("duplicate id"),
                             FormatError);
    }
    SUBCASE("empty") {
        std::ofstream(csv) << "";
        CHECK_THROWS_AS((void)import_cache_csv(csv), FormatError);
    }
}
