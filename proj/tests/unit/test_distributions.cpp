#include <doctest.h>

#include <cmath>

#include "gwlife/distributions.hpp"
#include "gwlife/errors.hpp"
#include "oracles.hpp"

using namespace gwlife;
using doctest::Approx;

TEST_CASE("pmf specs are validated") {
    CHECK_THROWS_AS(make_offspring(offspring::Pmf{{0.5, 0.6}}), ModelError);
    CHECK_THROWS_AS(make_offspring(offspring::Pmf{{1.2, -0.2}}), ModelError);
    CHECK_THROWS_AS(make_offspring(offspring::Pmf{{}}), ModelError);
    CHECK_THROWS_AS(make_offspring(offspring::Point{0}), ModelError);
    CHECK_THROWS_AS(make_offspring(offspring::Poisson{-1.0}), ModelError);
    CHECK_THROWS_AS(make_lifetime(lifetime::Pmf{{1.0}}), ModelError);  // l = 0
    CHECK_THROWS_AS(make_lifetime(lifetime::PowerTilt{1.0, 2.0}), ModelError);
    CHECK_THROWS_AS(make_lifetime(lifetime::PowerTilt{1.5, 3.0}), ModelError);
    CHECK_NOTHROW(make_offspring(offspring::Pmf{{0.25, 0.5, 0.25, 0.0}}));
}

TEST_CASE("explicit pmf moments and pgf") {
    const OffspringModel off = make_offspring(offspring::Pmf{{0.2, 0.3, 0.5}});
    CHECK(off.mean() == Approx(1.3).epsilon(1e-15));
    CHECK(off.pgf(1.0, 0).value() == Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(off.pgf(1.0, 1).value() - off.mean()) <= 1e-10);
    CHECK(std::abs(off.second_factorial_moment().value() - 2.0 * 0.5) <= 1e-9);
    CHECK(off.radius().is_infinite());
}

TEST_CASE("offspring families: mean and second factorial moment") {
    const OffspringModel geo = make_offspring(offspring::Geometric{2.0});
    CHECK(std::abs(geo.pgf(1.0, 1).value() - 2.0) <= 1e-10);
    CHECK(std::abs(geo.second_factorial_moment().value() - 2.0 * 4.0) <= 1e-9);
    CHECK(geo.radius().value() == Approx(1.5));
    CHECK(geo.pgf(1.6, 0).is_infinite());

    const OffspringModel poi = make_offspring(offspring::Poisson{0.7});
    CHECK(std::abs(poi.pgf(1.0, 1).value() - 0.7) <= 1e-10);
    CHECK(std::abs(poi.second_factorial_moment().value() - 0.49) <= 1e-9);

    const OffspringModel pt = make_offspring(offspring::Point{2});
    CHECK(pt.pgf(0.5, 0).value() == Approx(0.25));
    CHECK(pt.second_factorial_moment().value() == Approx(2.0));
}

TEST_CASE("pgf is nondecreasing below the radius") {
    const LifetimeModel geo = make_lifetime(lifetime::Geometric{1.0});
    const LifetimeModel tilt = make_lifetime(lifetime::PowerTilt{0.5, 3.0});
    const OffspringModel poi = make_offspring(offspring::Poisson{1.5});
    double prev_g = -1.0, prev_t = -1.0, prev_f = -1.0;
    for (int i = 0; i < 200; ++i) {
        const double s = 1.99 * i / 200.0;
        const double g = pgf_eval(geo, s, 0).value();
        const double t = pgf_eval(tilt, s, 0).value();
        const double f = pgf_eval(poi, s, 0).value();
        CHECK(g >= prev_g);
        CHECK(t >= prev_t);
        CHECK(f >= prev_f);
        prev_g = g;
        prev_t = t;
        prev_f = f;
    }
}

TEST_CASE("geometric lifetime closed forms") {
    const double l = 1.0;
    const LifetimeModel life = make_lifetime(lifetime::Geometric{l});
    const double r = l / (1.0 + l);
    CHECK(life.mean() == Approx(l));
    for (std::size_t k = 1; k <= 40; ++k) {
        CHECK(life.hazard(k) == Approx(r).epsilon(1e-14));
        CHECK(life.survival(k) == Approx(std::pow(r, k)).epsilon(1e-13));
    }
    CHECK(life.tail_radius().value() == Approx(1.0 / r));
    CHECK(std::abs(life.second_factorial_moment().value() - 2.0 * l * l) <= 1e-9);
    CHECK(std::abs(life.pgf(1.0, 1).value.value() - l) <= 1e-10);
    CHECK(life.pgf(1.0 / r, 0).value.is_infinite());
}

TEST_CASE("power tilt a = 1/2, b = 3 against polylogarithms") {
    const LifetimeModel life = make_lifetime(lifetime::PowerTilt{0.5, 3.0});
    CHECK(tilted_tail(0.5, 3.0, 1) == Approx(2.0 * oracle::li3_half()).epsilon(1e-13));
    CHECK(life.mean() == Approx(oracle::tilt_half_three_mean()).epsilon(1e-13));
    CHECK(life.pmf(0) == 0.0);
    CHECK(life.pmf(1) == Approx(0.5 / oracle::li3_half()).epsilon(1e-13));
    CHECK(life.tail_radius().value() == Approx(2.0));
    CHECK(life.hazard(1) == 1.0);
    for (std::size_t k = 2; k <= 100; ++k) CHECK(life.hazard(k) <= 0.5 + 1e-15);
    // sum_{k>=1} Q_k = l
    double total = 0.0;
    for (std::size_t k = 1; k <= 200; ++k) total += life.survival(k);
    CHECK(total == Approx(life.mean()).epsilon(1e-12));
}

TEST_CASE("power tilt a = 1 against zeta values") {
    CHECK(tilted_tail(1.0, 3.0, 1) == Approx(oracle::zeta3).epsilon(1e-14));
    CHECK(tilted_tail(1.0, 2.0, 1) == Approx(oracle::zeta2).epsilon(1e-14));
    CHECK(tilted_tail(1.0, 4.0, 1) == Approx(oracle::zeta4).epsilon(1e-14));
    CHECK(tilted_tail(1.0, 3.0, 3) == Approx(oracle::zeta3 - 1.0 - 0.125).epsilon(1e-14));

    const LifetimeModel b3 = make_lifetime(lifetime::PowerTilt{1.0, 3.0});
    CHECK(b3.mean() == Approx(oracle::zeta2 / oracle::zeta3).epsilon(1e-13));
    CHECK(b3.second_factorial_moment().is_infinite());
    CHECK(b3.tail_radius().value() == Approx(1.0));

    const LifetimeModel b4 = make_lifetime(lifetime::PowerTilt{1.0, 4.0});
    CHECK(b4.mean() == Approx(oracle::zeta3 / oracle::zeta4).epsilon(1e-13));
    const double g2 = (oracle::zeta2 - oracle::zeta3) / oracle::zeta4;
    CHECK(b4.second_factorial_moment().value() == Approx(g2).epsilon(1e-10));
}

TEST_CASE("survival series at the radius matches closed forms") {
    const LifetimeModel life = make_lifetime(lifetime::PowerTilt{0.5, 3.0});
    // sum_{j>=1} Q_j 2^j = 2 (zeta(3) - Li3(1/2)) / Li3(1/2)
    const SeriesValue v = life.survival_series(2.0, 1, 0);
    REQUIRE(v.value.is_finite());
    CHECK(v.value.value() == Approx(oracle::tilt_half_three_F_at_two(1.0)).epsilon(1e-11));
    CHECK(life.survival_series(2.0 + 1e-9, 1, 0).value.is_infinite());
}

TEST_CASE("bounded lifetime pmf") {
    const LifetimeModel life = make_lifetime(lifetime::Pmf{{0.0, 0.5, 0.5}});
    CHECK(life.mean() == Approx(1.5));
    CHECK(life.hazard(1) == Approx(1.0));
    CHECK(life.hazard(2) == Approx(0.5));
    CHECK(life.hazard(3) == 0.0);
    REQUIRE(life.support_max().has_value());
    CHECK(*life.support_max() == 2);
    CHECK(life.tail_radius().is_infinite());
}

TEST_CASE("offspring sampling matches the mean") {
    const OffspringModel off = make_offspring(offspring::Pmf{{0.2, 0.3, 0.5}});
    CounterRng rng(7, 0, 0, 0);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(off.sample(rng));
    CHECK(std::abs(sum / n - 1.3) < 5.0 * std::sqrt(0.61 / n));

    // batched draws agree in distribution with the mean n m
    for (const OffspringSpec& spec : {OffspringSpec{offspring::Geometric{1.5}}, OffspringSpec{offspring::Poisson{1.5}},
                                      OffspringSpec{offspring::Pmf{{0.25, 0.0, 0.75}}}}) {
        const OffspringModel model = make_offspring(spec);
        CounterRng r2(11, 1, 2, 3);
        double total = 0.0;
        const int reps = 2000;
        for (int i = 0; i < reps; ++i) total += static_cast<double>(model.sample_sum(5000, r2));
        CHECK(total / reps == Approx(7500.0).epsilon(0.01));
    }
}
