#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "vortexpair/domain.hpp"

using namespace vortexpair;
using vptest::pairwise_sum;
using vptest::random_field;

TEST_CASE("domain geometry") {
    Domain d(2.0, 1.0, 8, 4);
    CHECK(d.dx() == 0.5);
    CHECK(d.dy() == 0.25);
    CHECK(d.cell_area() == 0.125);
    CHECK(d.x_center(0) == -1.75);
    CHECK(d.x_center(7) == 1.75);
    CHECK(d.y_center(0) == 0.125);
    CHECK(d.index(3, 2) == 2 * 8 + 3);

    CHECK_THROWS_AS(Domain(0.0, 1.0, 4, 4), std::invalid_argument);
    CHECK_THROWS_AS(Domain(1.0, -1.0, 4, 4), std::invalid_argument);
    CHECK_THROWS_AS(Domain(1.0, 1.0, 1, 4), std::invalid_argument);
}

TEST_CASE("field validation") {
    Domain d(1.0, 1.0, 4, 4);
    Field f(d, 0.0, true);
    CHECK_NOTHROW(f.validate());
    f.values[3] = -0.5;
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
    f.nonneg = false;
    CHECK_NOTHROW(f.validate());
    f.values[3] = std::nan("");
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
}

TEST_CASE("integrate basics") {
    Domain d(1.0, 1.0, 4, 4);
    CHECK(integrate(Field(d)) == 0.0);
    Field f(d);
    f.at(1, 2) = 3.0;
    CHECK(integrate(f) == Catch::Approx(3.0 * d.cell_area()).epsilon(1e-15));
}

TEST_CASE("integrate matches independent pairwise oracle") {
    Domain d(3.0, 2.0, 48, 32);
    for (unsigned seed : {11u, 12u, 13u}) {
        Field f = random_field(d, seed, 1.0, -1.0, 1.0);
        const long double oracle =
            static_cast<long double>(d.cell_area()) * pairwise_sum(f.values.data(), f.values.size());
        const double got = integrate(f);
        CHECK(std::fabs(got - static_cast<double>(oracle)) <=
              1e-12 * std::max(1.0, std::fabs(static_cast<double>(oracle))));
    }
}

TEST_CASE("impulse of a unit patch spanning [0,1]x(1,2)") {
    // grid cells tile the patch exactly, and the midpoint rule integrates
    // the linear weight y without error
    Domain d(2.0, 4.0, 16, 16);
    Field f(d, 0.0, true);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i)
            if (d.x_center(i) > 0.0 && d.x_center(i) < 1.0 && d.y_center(j) > 1.0 &&
                d.y_center(j) < 2.0)
                f.at(i, j) = 1.0;
    CHECK(integrate(f) == Catch::Approx(1.0).margin(1e-13));
    CHECK(impulse(f) == Catch::Approx(1.5).margin(1e-12));
    CHECK(xp_norm(f, 3.0) == Catch::Approx(3.5).margin(1e-12));
}

TEST_CASE("impulse linearity") {
    Domain d(2.0, 2.0, 16, 8);
    // dyadic values keep every product and sum exact, so linearity of the
    // quadrature is visible as bit equality
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> val(0, 1 << 20);
    Field f(d), g(d);
    for (auto& v : f.values) v = static_cast<double>(val(rng));
    for (auto& v : g.values) v = static_cast<double>(val(rng));
    CHECK(impulse(f + g) == impulse(f) + impulse(g));
    CHECK(impulse(2.0 * f) == 2.0 * impulse(f));

    Field a = random_field(d, 5), b = random_field(d, 6);
    CHECK(std::fabs(impulse(a + b) - impulse(a) - impulse(b)) <=
          1e-12 * (std::fabs(impulse(a)) + std::fabs(impulse(b))));
}

TEST_CASE("impulse bounded by height times mass") {
    Domain d(2.0, 1.5, 24, 12);
    for (unsigned seed : {2u, 3u, 4u}) {
        Field f = random_field(d, seed, 0.6);
        CHECK(impulse(f) <= d.strip_height * integrate(f) * (1.0 + 1e-14));
        CHECK(impulse(f) >= 0.0);
    }
}

TEST_CASE("lp_norm basics") {
    Domain d(1.0, 1.0, 4, 4);
    CHECK(lp_norm(Field(d), 2.0) == 0.0);
    Field f(d);
    f.at(2, 1) = 0.7;
    for (double p : {1.0, 2.0, 3.0, 7.5}) {
        CHECK(lp_norm(f, p) ==
              Catch::Approx(0.7 * std::pow(d.cell_area(), 1.0 / p)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(lp_norm(f, -1.0), std::invalid_argument);
}

TEST_CASE("lp_norm triangle inequality") {
    Domain d(1.0, 1.0, 12, 12);
    for (unsigned seed = 0; seed < 100; ++seed) {
        Field f = random_field(d, 1000 + seed, 1.0, -1.0, 1.0);
        Field g = random_field(d, 2000 + seed, 1.0, -1.0, 1.0);
        for (double p : {1.0, 2.0, 3.0}) {
            const double lhs = lp_norm(f + g, p);
            const double rhs = lp_norm(f, p) + lp_norm(g, p);
            CHECK(lhs <= rhs + 1e-12 * rhs);
        }
    }
}

TEST_CASE("xp_norm rejects p at or below 2") {
    Domain d(1.0, 1.0, 4, 4);
    Field f(d, 0.5, true);
    CHECK_THROWS_AS(xp_norm(f, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(xp_norm(f, 1.5), std::invalid_argument);
    CHECK_NOTHROW(xp_norm(f, 2.5));
}

TEST_CASE("reductions are exactly invariant under grid isometries") {
    Domain d(2.0, 1.0, 32, 16);
    // keep the support away from the edges so translation loses nothing
    Field f(d, 0.0, true);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> val(0.0, 2.0);
    for (int j = 2; j < 14; ++j)
        for (int i = 8; i < 24; ++i) f.at(i, j) = val(rng);

    for (const Field& g : {shift_columns(f, 3), shift_columns(f, -5), reflect_x1(f)}) {
        CHECK(integrate(g) == integrate(f));
        CHECK(impulse(g) == impulse(f));
        CHECK(lp_norm(g, 1.0) == lp_norm(f, 1.0));
        CHECK(lp_norm(g, 3.0) == lp_norm(f, 3.0));
        CHECK(xp_norm(g, 3.0) == xp_norm(f, 3.0));
    }
}

TEST_CASE("xp_norm scaling") {
    Domain d(1.0, 1.0, 10, 10);
    Field f = random_field(d, 42);
    CHECK(xp_norm(2.0 * f, 3.0) == 2.0 * xp_norm(f, 3.0)); // power of two is exact
    const double c = 1.7;
    CHECK(xp_norm(c * f, 3.0) == Catch::Approx(c * xp_norm(f, 3.0)).epsilon(1e-12));
}
