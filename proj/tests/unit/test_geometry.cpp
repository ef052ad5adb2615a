#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bnk/error.hpp"
#include "bnk/geometry.hpp"

using namespace bnk;

namespace {

UnitNormal random_normal(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return UnitNormal::normalized({g(rng), g(rng), g(rng)});
}

long double norm2_ld(Velocity3 v) {
    return static_cast<long double>(v.x) * v.x + static_cast<long double>(v.y) * v.y +
           static_cast<long double>(v.z) * v.z;
}

Velocity3 random_velocity(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("post_collision examples") {
    auto [a, b] = post_collision({1, 0, 0}, {-1, 0, 0}, {0, 1, 0});
    CHECK(a == Velocity3{1, 0, 0});
    CHECK(b == Velocity3{-1, 0, 0});

    auto [c, d] = post_collision({1, 0, 0}, {-1, 0, 0}, {1, 0, 0});
    CHECK(c == Velocity3{-1, 0, 0});
    CHECK(d == Velocity3{1, 0, 0});

    auto [e, f] = post_collision({1, 2, 3}, {4, 5, 6}, UnitNormal::normalized({1, 1, 1}));
    CHECK(e.x == doctest::Approx(4).epsilon(1e-14));
    CHECK(e.y == doctest::Approx(5).epsilon(1e-14));
    CHECK(e.z == doctest::Approx(6).epsilon(1e-14));
    CHECK(f.x == doctest::Approx(1).epsilon(1e-14));
    CHECK(f.y == doctest::Approx(2).epsilon(1e-14));
    CHECK(f.z == doctest::Approx(3).epsilon(1e-14));
    CHECK(norm2(e) + norm2(f) == doctest::Approx(14.0 + 77.0).epsilon(1e-15));
}

TEST_CASE("post_collision rejects a non-unit normal") {
    CHECK_THROWS_AS(post_collision({1, 0, 0}, {0, 0, 0}, UnitNormal{1.0, 1e-6, 0.0}), ContractViolation);
    CHECK_THROWS_AS(post_collision({1, 0, 0}, {0, 0, 0}, UnitNormal{2.0, 0.0, 0.0}), ContractViolation);
}

TEST_CASE("random collisions conserve momentum and energy and are involutive") {
    std::mt19937_64 rng(20240611);
    const double eps = std::numeric_limits<double>::epsilon();
    for (int i = 0; i < 20000; ++i) {
        const Velocity3 v = random_velocity(rng, 5.0);
        const Velocity3 w = random_velocity(rng, 5.0);
        const UnitNormal n = random_normal(rng);
        auto [vp, wp] = post_collision(v, w, n);
        const Velocity3 dp = (vp + wp) - (v + w);
        const double pscale = norm(v) + norm(w);
        CHECK(std::abs(dp.x) <= 4 * eps * pscale);
        CHECK(std::abs(dp.y) <= 4 * eps * pscale);
        CHECK(std::abs(dp.z) <= 4 * eps * pscale);
        const long double e0 = norm2_ld(v) + norm2_ld(w);
        CHECK(std::abs(static_cast<double>(norm2_ld(vp) + norm2_ld(wp) - e0)) <= 4 * eps * pscale * pscale);
        auto [vb, wb] = post_collision(vp, wp, n);
        CHECK(norm(vb - v) <= 4 * eps * pscale);
        CHECK(norm(wb - w) <= 4 * eps * pscale);
    }
}

TEST_CASE("kernel_eval constant form and cutoff bands") {
    KernelSpec k;
    k.b0 = 1.0;
    k.gamma = 0.1;
    CHECK(k.value(1.0, 0.5) == 1.0);
    CHECK(k.value(1.0, 0.05) == 0.0);
    CHECK(k.value(1.0, -0.05) == 0.0);
    CHECK(k.value(1.0, 0.95) == 0.0);
    CHECK(k.value(1.0, -0.95) == 1.0);

    // cos(theta) = 0.5 from v - v_* = (2, 0, 0) and n at 60 degrees.
    const UnitNormal n{0.5, std::sqrt(0.75), 0.0};
    CHECK(kernel_eval(k, {1, 0, 0}, {-1, 0, 0}, n) == doctest::Approx(1.0));
    CHECK(kernel_eval(k, {1, 2, 3}, {1, 2, 3}, n) == 0.0);
}

TEST_CASE("kernel values stay in [0, b0] and vanish in the bands") {
    std::mt19937_64 rng(7);
    KernelSpec k;
    k.b0 = 2.5;
    k.gamma = 0.2;
    k.form = KernelForm::table;
    KernelTable t;
    t.speeds = {0.0, 1.0, 4.0};
    t.cosines = {-1.0, 0.0, 1.0};
    t.values = {0.5, 1.0, 2.5, 0.0, 2.0, 1.0, 2.5, 2.5, 0.1};
    k.table = t;
    k.validate();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 5000; ++i) {
        const Velocity3 v = random_velocity(rng, 3.0);
        const Velocity3 w = random_velocity(rng, 3.0);
        const UnitNormal n = random_normal(rng);
        const double b = kernel_eval(k, v, w, n);
        CHECK(b >= 0.0);
        CHECK(b <= k.b0);
        const double c = dot(v - w, n.vec()) / norm(v - w);
        if (std::abs(c) < k.gamma || std::abs(1.0 - c) < k.gamma) CHECK(b == 0.0);
    }
}

TEST_CASE("kernel symmetry under (v, v_*, n) -> (v', v'_*, -n)") {
    std::mt19937_64 rng(11);
    KernelSpec k;
    for (int i = 0; i < 5000; ++i) {
        const Velocity3 v = random_velocity(rng, 3.0);
        const Velocity3 w = random_velocity(rng, 3.0);
        const UnitNormal n = random_normal(rng);
        auto [vp, wp] = post_collision(v, w, n);
        const double c = dot(v - w, n.vec()) / norm(v - w);
        // Skip draws within rounding of a band edge.
        if (std::abs(std::abs(c) - k.gamma) < 1e-9 || std::abs(std::abs(1.0 - c) - k.gamma) < 1e-9) continue;
        CHECK(kernel_eval(k, v, w, n) == kernel_eval(k, vp, wp, -n));
    }
}

TEST_CASE("table kernel symmetry when the relative speed is preserved") {
    KernelSpec k;
    k.b0 = 3.0;
    k.form = KernelForm::table;
    KernelTable t;
    t.speeds = {0.0, 2.0, 6.0};
    t.cosines = {-1.0, 1.0};
    t.values = {1.0, 1.0, 2.0, 2.0, 3.0, 3.0};  // cosine-independent rows
    k.table = t;
    k.validate();
    std::mt19937_64 rng(13);
    for (int i = 0; i < 2000; ++i) {
        const Velocity3 v = random_velocity(rng, 2.0);
        const Velocity3 w = random_velocity(rng, 2.0);
        const UnitNormal n = random_normal(rng);
        auto [vp, wp] = post_collision(v, w, n);
        const double c = dot(v - w, n.vec()) / norm(v - w);
        if (std::abs(std::abs(c) - k.gamma) < 1e-9 || std::abs(std::abs(1.0 - c) - k.gamma) < 1e-9) continue;
        CHECK(kernel_eval(k, v, w, n) == doctest::Approx(kernel_eval(k, vp, wp, -n)).epsilon(1e-12));
    }
}

TEST_CASE("KernelSpec validation") {
    KernelSpec k;
    k.gamma = 0.5;
    CHECK_THROWS_AS(k.validate(), ValidationError);
    k.gamma = 0.0;
    CHECK_THROWS_AS(k.validate(), ValidationError);
    k.gamma = 0.1;
    k.b0 = -1.0;
    CHECK_THROWS_AS(k.validate(), ValidationError);
    k.b0 = 1.0;
    k.form = KernelForm::table;
    CHECK_THROWS_AS(k.validate(), ValidationError);
    KernelTable t{{0.0, 1.0}, {-1.0, 1.0}, {0.0, 2.0, 0.5, 0.5}};
    k.table = t;
    CHECK_THROWS_AS(k.validate(), ValidationError);  // 2.0 > b0
}

TEST_CASE("energy_cutoff_chi") {
    CHECK(energy_cutoff_chi(0.5, {1, 1, 1}, {0, 0, 0}) == 1);
    CHECK(energy_cutoff_chi(0.5, {2, 1, 0}, {0, 0, 0}) == 0);
    CHECK(energy_cutoff_chi(1.0, {1, 0, 0}, {0, 0, 0}) == 1);
    CHECK(energy_cutoff_chi(0.0, {100, 0, 0}, {0, 0, 0}) == 1);
    CHECK_THROWS_AS(energy_cutoff_chi(1.5, {0, 0, 0}, {0, 0, 0}), ContractViolation);
}

TEST_CASE("energy_cutoff_chi is invariant under collisions") {
    std::mt19937_64 rng(17);
    int tested = 0;
    for (int i = 0; i < 20000; ++i) {
        const Velocity3 v = random_velocity(rng, 1.5);
        const Velocity3 w = random_velocity(rng, 1.5);
        const UnitNormal n = random_normal(rng);
        auto [vp, wp] = post_collision(v, w, n);
        const double e = norm2(v) + norm2(w);
        if (std::abs(e - 4.0) < 1e-9) continue;
        CHECK(energy_cutoff_chi(0.5, v, w) == energy_cutoff_chi(0.5, vp, wp));
        ++tested;
    }
    CHECK(tested > 19000);
}
