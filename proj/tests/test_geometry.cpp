#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "corebatch/geometry.hpp"

using namespace corebatch;

namespace {

Matrix points_1d(std::initializer_list<double> xs) {
    Matrix m(xs.size(), 1);
    std::size_t i = 0;
    for (double x : xs) m.at(i++, 0) = x;
    return m;
}

Matrix random_points(std::size_t n, std::size_t d, std::mt19937_64& rng, double scale = 10.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(n, d);
    for (double& v : m.data) v = u(rng);
    return m;
}

}  // namespace

TEST_CASE("pairwise_distance basics") {
    const std::vector<double> a{0.0, 0.0}, b{3.0, 4.0};
    CHECK(pairwise_distance(a, b) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(pairwise_distance(a, a) == 0.0);
    CHECK(pairwise_distance(b, b) == 0.0);

    const std::vector<double> p{1.0}, q{4.0};
    CHECK(pairwise_distance(p, q) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(pairwise_distance(q, p) == pairwise_distance(p, q));

    const std::vector<double> bad{1.0, 2.0, 3.0};
    CHECK_THROWS_AS((void)pairwise_distance(a, bad), std::invalid_argument);
}

TEST_CASE("coverage_radius examples") {
    const Matrix pts = points_1d({0, 1, 2, 3, 10});

    const std::vector<std::size_t> all{0, 1, 2, 3, 4};
    CHECK(coverage_radius(pts, all) == 0.0);

    const Matrix two = points_1d({0, 10});
    const std::vector<std::size_t> only0{0};
    CHECK(coverage_radius(two, only0) == doctest::Approx(10.0).epsilon(1e-12));

    // centers {1, 10}: nearest distances are 1,0,1,2,0
    const std::vector<std::size_t> sel{1, 4};
    CHECK(coverage_radius(pts, sel) == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS((void)coverage_radius(pts, std::vector<std::size_t>{}), std::invalid_argument);
    CHECK_THROWS_AS((void)coverage_radius(pts, std::vector<std::size_t>{7}), std::invalid_argument);
}

TEST_CASE("greedy_coreset hand trace on {0,1,2,3,10}") {
    const Matrix pts = points_1d({0, 1, 2, 3, 10});
    const auto r = greedy_coreset_from(pts, 2, 0);
    REQUIRE(r.indices.size() == 2);
    CHECK(r.indices[0] == 0);
    CHECK(r.indices[1] == 4);  // 10 is farthest from 0
    CHECK(r.coverage_radius == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(coverage_radius(pts, r.indices) == r.coverage_radius);
}

TEST_CASE("greedy_coreset trivial cases") {
    std::mt19937_64 rng(7);
    const Matrix pts = random_points(6, 3, rng);

    SUBCASE("k = n selects every row") {
        const auto r = greedy_coreset(pts, pts.rows, 42);
        std::set<std::size_t> uniq(r.indices.begin(), r.indices.end());
        CHECK(uniq.size() == pts.rows);
        CHECK(r.coverage_radius == 0.0);
    }
    SUBCASE("identical rows give zero radius") {
        Matrix same(5, 2);
        for (std::size_t i = 0; i < 5; ++i) {
            same.at(i, 0) = 1.5;
            same.at(i, 1) = -2.5;
        }
        const auto r = greedy_coreset(same, 3, 9);
        CHECK(r.coverage_radius == 0.0);
        std::set<std::size_t> uniq(r.indices.begin(), r.indices.end());
        CHECK(uniq.size() == 3);
    }
    SUBCASE("contract violations") {
        CHECK_THROWS_AS((void)greedy_coreset(pts, 0, 1), std::invalid_argument);
        CHECK_THROWS_AS((void)greedy_coreset(pts, pts.rows + 1, 1), std::invalid_argument);
    }
}

TEST_CASE("exact_kcenter examples") {
    const Matrix pts = points_1d({0, 1, 2, 3, 10});

    const auto r = exact_kcenter(pts, 2);
    CHECK(r.coverage_radius == doctest::Approx(2.0).epsilon(1e-12));

    const auto full = exact_kcenter(pts, 5);
    CHECK(full.coverage_radius == 0.0);

    const Matrix two = points_1d({0, 10});
    const auto one = exact_kcenter(two, 1);
    CHECK(one.coverage_radius == doctest::Approx(10.0).epsilon(1e-12));
    REQUIRE(one.indices.size() == 1);
    CHECK(one.indices[0] == 0);  // lexicographic tie-break

    Matrix big(kExactOracleMaxN + 1, 1);
    CHECK_THROWS_WITH_AS((void)exact_kcenter(big, 2),
                         doctest::Contains("instance too large for oracle"),
                         std::invalid_argument);
}

TEST_CASE("greedy is a 2-approximation of the exact optimum") {
    std::mt19937_64 rng(1234);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<std::size_t> nd(2, 12), dd(1, 3);
        const std::size_t n = nd(rng), d = dd(rng);
        std::uniform_int_distribution<std::size_t> kd(1, std::min<std::size_t>(4, n));
        const std::size_t k = kd(rng);
        const Matrix pts = random_points(n, d, rng);

        const auto greedy = greedy_coreset(pts, k, rng());
        const auto exact = exact_kcenter(pts, k);
        CHECK(greedy.coverage_radius <= 2.0 * exact.coverage_radius + 1e-12);
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("determinism, nesting and recomputation") {
    std::mt19937_64 rng(99);
    const Matrix pts = random_points(40, 2, rng);

    SUBCASE("same seed, same result") {
        const auto a = greedy_coreset(pts, 10, 5);
        const auto b = greedy_coreset(pts, 10, 5);
        CHECK(a.indices == b.indices);
        CHECK(a.coverage_radius == b.coverage_radius);
    }
    SUBCASE("selections are nested prefixes and radius is non-increasing in k") {
        const auto full = greedy_coreset_from(pts, pts.rows, 3);
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k <= pts.rows; k += 7) {
            const auto r = greedy_coreset_from(pts, k, 3);
            CHECK(std::equal(r.indices.begin(), r.indices.end(), full.indices.begin()));
            CHECK(r.coverage_radius <= prev);
            prev = r.coverage_radius;
        }
    }
    SUBCASE("stored radius equals recomputed radius exactly") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto r = greedy_coreset(pts, 7, seed);
            CHECK(coverage_radius(pts, r.indices) == r.coverage_radius);
        }
    }
}

TEST_CASE("parallel kernel matches serial kernel and naive reference bit for bit") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<std::size_t> nd(2, 60), dd(1, 8);
        const std::size_t n = nd(rng), d = dd(rng);
        std::uniform_int_distribution<std::size_t> kd(1, n), fd(0, n - 1);
        const std::size_t k = kd(rng), first = fd(rng);
        const Matrix pts = random_points(n, d, rng);

        const auto par = greedy_coreset_from(pts, k, first, Exec::Parallel);
        const auto ser = greedy_coreset_from(pts, k, first, Exec::Serial);
        const auto ref = greedy_coreset_reference(pts, k, first);
        CHECK(par.indices == ser.indices);
        CHECK(par.coverage_radius == ser.coverage_radius);
        CHECK(par.indices == ref.indices);
        CHECK(par.coverage_radius == ref.coverage_radius);
    }
}

TEST_CASE("greedy dominates random subsets on scattered data") {
    std::mt19937_64 rng(31415);
    const std::size_t n = 200, k = 12;
    const Matrix pts = random_points(n, 2, rng);

    double greedy_sum = 0.0, random_sum = 0.0;
    const int seeds = 120;
    for (int s = 0; s < seeds; ++s) {
        greedy_sum += greedy_coreset(pts, k, static_cast<std::uint64_t>(s)).coverage_radius;

        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        std::mt19937_64 sub(static_cast<std::uint64_t>(s) + 7777);
        for (std::size_t i = 0; i < k; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(all[i], all[pick(sub)]);
        }
        random_sum += coverage_radius(pts, std::span<const std::size_t>(all.data(), k));
    }
    CHECK(greedy_sum / seeds < random_sum / seeds);
}
