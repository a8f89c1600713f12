#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qms/generators.hpp"
#include "qms/metrize.hpp"

using namespace qms;
using testing::equilateral;
using testing::line;

namespace {

// reference shortest-path closure: repeated relaxation until stable
Mat chain_closure(const QuasiMetricSpace& s, double alpha) {
    const int n = s.size();
    Mat d(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d.at(i, j) = (i == j) ? 0.0 : std::pow(s.rho_sym(i, j), alpha);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j)
                    if (d.at(i, k) + d.at(k, j) < d.at(i, j)) {
                        d.at(i, j) = d.at(i, k) + d.at(k, j);
                        changed = true;
                    }
    }
    return d;
}

void check_triangle(const Mat& m, double alpha) {
    for (int x = 0; x < m.n; ++x)
        for (int y = 0; y < m.n; ++y)
            for (int z = 0; z < m.n; ++z) {
                double lhs = std::pow(m.at(x, y), alpha);
                double rhs = std::pow(m.at(x, z), alpha) + std::pow(m.at(z, y), alpha);
                CHECK(lhs <= rhs * (1.0 + 1e-12));
            }
}

}  // namespace

TEST_CASE("equilateral spaces are untouched by regularization") {
    auto s = equilateral(3);
    for (double a : {0.5, 1.0, 2.0}) {
        auto r = regularize(s, a);
        CHECK(r.distortion == doctest::Approx(1.0).epsilon(1e-14));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(r.matrix.at(i, j) == doctest::Approx(s.dist.at(i, j)).epsilon(1e-14));
    }
}

TEST_CASE("a collinear euclidean triple is already regular at alpha 1") {
    auto s = line({0.0, 1.0, 2.0});
    auto r = regularize(s, 1.0);
    CHECK(r.matrix.at(0, 2) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.distortion == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("squared distances at alpha one-half reproduce the euclidean metric") {
    auto s = line({0.0, 1.0, 2.0}, 2.0);
    auto r = regularize(s, 0.5);
    // chains in the half-power scale: d(0,2) = min(2, 1+1) = 2, back to 4
    CHECK(r.matrix.at(0, 2) == doctest::Approx(4.0).epsilon(1e-14));
    check_triangle(r.matrix, 0.5);
}

TEST_CASE("regularized matrix matches the reference closure on seeded spaces") {
    for (uint64_t seed = 1; seed <= 6; ++seed) {
        auto s = random_quasimetric(10, seed);
        for (double a : {0.7, 1.0, 1.8}) {
            auto r = regularize(s, a);
            Mat ref = chain_closure(s, a);
            for (int i = 0; i < s.size(); ++i)
                for (int j = 0; j < s.size(); ++j) {
                    if (i == j) continue;
                    CHECK(r.matrix.at(i, j) ==
                          doctest::Approx(std::pow(ref.at(i, j), 1.0 / a)).epsilon(1e-12));
                    CHECK(r.matrix.at(i, j) <= s.rho_sym(i, j));
                    CHECK(r.matrix.at(i, j) == r.matrix.at(j, i));
                }
            check_triangle(r.matrix, a);
        }
    }
}

TEST_CASE("alpha-power triangle inequality holds at the admissible exponent") {
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        auto s = random_quasimetric(12, seed);
        double alpha = 1.0 / std::log2(std::max(compute_constants(s).c_rho, 1.0 + 1e-9));
        auto r = regularize(s, alpha);
        check_triangle(r.matrix, alpha);
    }
}

TEST_CASE("distortion grows with the exponent") {
    auto s = generate({SpaceKind::grid, 32}).space;
    double prev_plain = 0.0, prev_collapse = 0.0;
    for (double a : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        auto r = regularize(s, a);
        CHECK(r.distortion >= prev_plain - 1e-12);
        CHECK(r.collapse >= prev_collapse - 1e-12);
        prev_plain = r.distortion;
        prev_collapse = r.collapse;
    }
}

TEST_CASE("ultrametric trees report an unbounded index") {
    GeneratorSpec spec;
    spec.kind = SpaceKind::ultrametric_tree;
    spec.depth = 4;
    auto s = generate(spec).space;
    CHECK(compute_constants(s).c_rho == 1.0);
    auto e = estimate_index(s, default_alpha_grid(), 2.0);
    CHECK(e.infinite);
    for (double d : e.distortion_curve) CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("euclidean grids bracket the index near one and tighten with size") {
    GeneratorSpec spec;
    spec.kind = SpaceKind::grid;
    spec.n = 64;
    auto e64 = estimate_index(generate(spec).space, default_alpha_grid(), 2.0);
    CHECK(!e64.infinite);
    CHECK(e64.lower_bound >= 1.0);
    CHECK(e64.lower_bound <= 1.5);
    spec.n = 16;
    auto e16 = estimate_index(generate(spec).space, default_alpha_grid(), 2.0);
    spec.n = 256;
    auto e256 = estimate_index(generate(spec).space, default_alpha_grid(), 2.0);
    CHECK(e256.lower_bound <= e64.lower_bound);
    CHECK(e64.lower_bound <= e16.lower_bound);
}

TEST_CASE("root-snowflaked grids bracket the index near two") {
    GeneratorSpec spec;
    spec.kind = SpaceKind::snowflake_grid;
    spec.eps = 2.0;  // distance = |x-y|^{1/2}
    spec.n = 64;
    auto e64 = estimate_index(generate(spec).space, default_alpha_grid(), 2.0);
    CHECK(e64.lower_bound >= 2.0);
    CHECK(e64.lower_bound <= 2.5);
    spec.n = 256;
    auto e256 = estimate_index(generate(spec).space, default_alpha_grid(), 2.0);
    CHECK(e256.lower_bound <= e64.lower_bound);
    CHECK(e256.lower_bound >= 2.0);
}

TEST_CASE("distortion curves are nondecreasing along the grid") {
    auto s = random_quasimetric(14, 9);
    auto e = estimate_index(s, default_alpha_grid(), 2.0);
    for (size_t i = 1; i < e.distortion_curve.size(); ++i) {
        CHECK(e.distortion_curve[i] >= e.distortion_curve[i - 1] - 1e-10);
        CHECK(e.bilipschitz_curve[i] >= e.bilipschitz_curve[i - 1] - 1e-10);
    }
}

TEST_CASE("bad inputs are rejected") {
    auto s = equilateral(3);
    CHECK_THROWS(regularize(s, 0.0));
    CHECK_THROWS(estimate_index(s, {}, 2.0));
    CHECK_THROWS(estimate_index(s, {1.0, 0.5}, 2.0));
    CHECK_THROWS(estimate_index(s, {1.0}, 1.0));
}
