#include <doctest.h>

#include <cmath>

#include "gwlife/extinction.hpp"
#include "oracles.hpp"

using namespace gwlife;
using doctest::Approx;

TEST_CASE("binary splitting with geometric lifetimes") {
    const OffspringModel off = make_offspring(offspring::Point{2});
    const LifetimeModel life = make_lifetime(lifetime::Geometric{1.0});
    const ExtinctionReport rep = extinction_probability(off, life);
    CHECK(std::abs(rep.q - oracle::golden_extinction()) <= 1e-10);
    CHECK_FALSE(rep.certain);
    CHECK(rep.residual <= 1e-12);
    CHECK_FALSE(is_certain_extinction(off, life));
}

TEST_CASE("ml <= 1 means certain extinction") {
    SUBCASE("one-season lifetimes, m = 1/2") {
        const OffspringModel off = make_offspring(offspring::Poisson{0.5});
        const LifetimeModel life = make_lifetime(lifetime::Pmf{{0.0, 1.0}});
        const ExtinctionReport rep = extinction_probability(off, life);
        CHECK(rep.q == 1.0);
        CHECK(rep.certain);
    }
    SUBCASE("critical geometric") {
        const OffspringModel off = make_offspring(offspring::Poisson{1.0});
        const LifetimeModel life = make_lifetime(lifetime::Geometric{1.0});
        CHECK(extinction_probability(off, life).certain);
        CHECK(is_certain_extinction(off, life));
    }
}

TEST_CASE("classical Galton-Watson limit") {
    // h_1 = 1: q solves f(s) = s. Poisson(2): q = exp(2 (q - 1)).
    const OffspringModel off = make_offspring(offspring::Poisson{2.0});
    const LifetimeModel life = make_lifetime(lifetime::Pmf{{0.0, 1.0}});
    const double ref = oracle::bisect_increasing([](double s) { return s - std::exp(2.0 * (s - 1.0)); }, 0.0, 0.9);
    CHECK(extinction_probability(off, life).q == Approx(ref).epsilon(1e-10));
}

TEST_CASE("no extinction when every individual survives and reproduces") {
    const OffspringModel off = make_offspring(offspring::Point{1});
    const LifetimeModel life = make_lifetime(lifetime::Pmf{{0.0, 0.0, 1.0}});
    CHECK(extinction_probability(off, life).q == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("typewise extinction") {
    const OffspringModel off = make_offspring(offspring::Point{2});
    const LifetimeModel life = make_lifetime(lifetime::Geometric{1.0});
    const double q = extinction_probability(off, life).q;
    const std::vector<double> s = typewise_extinction(off, life, q, 5);
    REQUIRE(s.size() == 5);
    // constant hazard: every age is equivalent to a newborn
    for (double x : s) CHECK(x == Approx(q).epsilon(1e-9));
}

TEST_CASE("tolerance is validated") {
    const OffspringModel off = make_offspring(offspring::Point{2});
    const LifetimeModel life = make_lifetime(lifetime::Geometric{1.0});
    CHECK_THROWS_AS(extinction_probability(off, life, 1e-3), std::invalid_argument);
}
