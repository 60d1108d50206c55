#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "fracond/gridio.hpp"
#include "test_support.hpp"

using namespace fracond;

TEST_CASE("build_grid basics") {
    GridSpec g = build_grid(1, 1.0, 8);
    CHECK(g.spacing() == 0.25);
    CHECK(g.node_count() == 8);
    CHECK(g.node(0)[0] == -0.875);
    CHECK(g.node(7)[0] == 0.875);

    GridSpec g2 = build_grid(2, 1.0, 16);
    CHECK(g2.node_count() == 256);
    CHECK(g2.spacing() == 0.125);

    GridSpec g3 = build_grid(1, 2.0, 64);
    CHECK(g3.node(0)[0] == -1.96875);
}

TEST_CASE("build_grid rejects bad parameters") {
    CHECK_THROWS_AS(build_grid(3, 1.0, 16), InvalidArgument);
    CHECK_THROWS_AS(build_grid(1, 0.0, 16), InvalidArgument);
    CHECK_THROWS_AS(build_grid(1, -2.0, 16), InvalidArgument);
    CHECK_THROWS_AS(build_grid(1, 1.0, 7), InvalidArgument);
}

TEST_CASE("all nodes lie strictly inside the box") {
    for (int dim : {1, 2}) {
        GridSpec g = build_grid(dim, 1.5, 12);
        for (long i = 0; i < g.node_count(); ++i) {
            auto p = g.node(i);
            for (int d = 0; d < dim; ++d) {
                CHECK(p[static_cast<std::size_t>(d)] > -g.half_width);
                CHECK(p[static_cast<std::size_t>(d)] < g.half_width);
            }
        }
    }
}

TEST_CASE("define_regions produces disjoint nonempty masks") {
    GridSpec g = build_grid(1, 1.0, 64);
    RegionLayout lay =
        define_regions(g, Box::interval(-0.5, 0.5), Box::interval(-0.9, -0.7),
                       Box::interval(0.7, 0.9), Box::interval(0.55, 0.65));
    CHECK(!lay.omega.empty());
    CHECK(!lay.w1.empty());
    CHECK(!lay.w2.empty());
    CHECK(!lay.omega_small.empty());

    // omega and exterior partition the grid
    CHECK(lay.omega.size() + lay.exterior.size() ==
          static_cast<std::size_t>(g.node_count()));
    for (long i : lay.omega) CHECK(lay.in_omega(i));
    for (long i : lay.exterior) CHECK(!lay.in_omega(i));

    // windows live in the exterior
    for (long i : lay.w1) CHECK(!lay.in_omega(i));
    for (long i : lay.w2) CHECK(!lay.in_omega(i));
    for (long i : lay.omega_small) CHECK(!lay.in_omega(i));
}

TEST_CASE("define_regions rejects overlap and empty regions") {
    GridSpec g = build_grid(1, 1.0, 64);
    CHECK_THROWS_AS(define_regions(g, Box::interval(-0.5, 0.5),
                                   Box::interval(0.4, 0.7), Box::interval(0.8, 0.9),
                                   std::nullopt),
                    GeometryError);
    CHECK_THROWS_AS(define_regions(g, Box::interval(-0.5, 0.5),
                                   Box::interval(0.7001, 0.7002),
                                   Box::interval(0.8, 0.9), std::nullopt),
                    GeometryError);
}

TEST_CASE("define_regions 2D strips") {
    GridSpec g = build_grid(2, 1.0, 16);
    RegionLayout lay = define_regions(g, Box::rect(-0.5, 0.5, -0.5, 0.5),
                                      Box::rect(-0.95, -0.6, -0.5, 0.5),
                                      Box::rect(0.6, 0.95, -0.5, 0.5), std::nullopt);
    CHECK(!lay.w1.empty());
    CHECK(!lay.w2.empty());
    for (long i : lay.w1)
        for (long j : lay.w2) CHECK(i != j);
}

TEST_CASE("omega_small must keep a lattice gap from the windows") {
    GridSpec g = build_grid(1, 1.0, 64);
    CHECK_THROWS_AS(define_regions(g, Box::interval(-0.5, 0.5),
                                   Box::interval(-0.9, -0.7), Box::interval(0.7, 0.9),
                                   Box::interval(0.64, 0.69)),
                    GeometryError);
}

TEST_CASE("norms examples") {
    GridSpec g = build_grid(1, 1.0, 64);
    GridFunction zero(g);
    CHECK(norms(zero).l2 == 0.0);
    CHECK(norms(zero).linf == 0.0);

    GridFunction one(g, 1.0);
    CHECK(norms(one).l2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    GridSpec g8 = build_grid(1, 1.0, 8);  // h = 0.25
    GridFunction spike(g8);
    spike[3] = 3.0;
    CHECK(norms(spike).l2 == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(norms(spike).linf == 3.0);
}

TEST_CASE("norms are absolutely homogeneous") {
    std::mt19937_64 rng(11);
    GridSpec g = build_grid(2, 1.0, 12);
    GridFunction u = fracond::testing::random_field(g, rng);
    for (double c : {-3.0, -0.5, 0.0, 0.25, 7.0}) {
        Norms a = norms(scale(u, c));
        Norms b = norms(u);
        CHECK(a.l2 == doctest::Approx(std::abs(c) * b.l2).epsilon(1e-13));
        CHECK(a.linf == doctest::Approx(std::abs(c) * b.linf).epsilon(1e-13));
    }
}

TEST_CASE("grid function arithmetic is exact and commutative") {
    std::mt19937_64 rng(5);
    GridSpec g = build_grid(1, 1.0, 32);
    GridFunction u = fracond::testing::random_field(g, rng);
    GridFunction v = fracond::testing::random_field(g, rng);
    GridFunction ab = add(u, v), ba = add(v, u);
    GridFunction mab = pointwise_mul(u, v), mba = pointwise_mul(v, u);
    for (long i = 0; i < g.node_count(); ++i) {
        CHECK(ab[i] == ba[i]);
        CHECK(mab[i] == mba[i]);
        CHECK(ab[i] == u[i] + v[i]);
    }
    CHECK_THROWS_AS(add(u, GridFunction(build_grid(1, 1.0, 16))), GridMismatch);
}

TEST_CASE("lattice_gap and dilate") {
    GridSpec g = build_grid(1, 1.0, 16);
    std::vector<long> a{2, 3}, b{6, 7};
    CHECK(lattice_gap(g, a, b) == 3);
    auto d = dilate(g, a, 1);
    CHECK(d == std::vector<long>{1, 2, 3, 4});
}

TEST_CASE("csv and binary round trips") {
    namespace fs = std::filesystem;
    std::mt19937_64 rng(99);
    const fs::path dir = fs::temp_directory_path() / "fracond_grid_test";
    fs::create_directories(dir);

    GridSpec g = build_grid(2, 1.25, 10);
    GridFunction u = fracond::testing::random_field(g, rng);

    write_binary(u, dir / "u.bin");
    GridFunction v = read_binary(dir / "u.bin");
    CHECK(v.spec.same_grid(g));
    for (long i = 0; i < u.size(); ++i) CHECK(u[i] == v[i]);  // bit exact

    write_csv(u, dir / "u.csv");
    GridFunction w = read_csv(dir / "u.csv", g);
    for (long i = 0; i < u.size(); ++i) CHECK(u[i] == w[i]);  // %.17g round trip

    CHECK_THROWS_AS(read_binary(dir / "missing.bin"), IoError);
    CHECK_THROWS_AS(read_csv(dir / "missing.csv", g), IoError);
}
