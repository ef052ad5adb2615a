#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bnk/equilibria.hpp"
#include "bnk/error.hpp"
#include "bnk/polylog.hpp"

using namespace bnk;

namespace {

constexpr double pi = std::numbers::pi;
const double two_pi_32 = std::pow(2.0 * pi, 1.5);

// sum_{k >= 1} z^k k^{-s}, direct
double series_li(double s, double z) {
    double sum = 0.0, zk = z;
    for (int k = 1; k < 200000; ++k) {
        const double term = zk * std::pow(k, -s);
        sum += term;
        if (term < 1e-18 * sum) break;
        zk *= z;
    }
    return sum;
}

// plain Euler-Maclaurin-free zeta oracle: partial sum plus integral tail
double zeta_oracle(double s) {
    const int N = 100000;
    double sum = 0.0;
    for (int k = N; k >= 1; --k) sum += std::pow(k, -s);
    const double n = N + 0.5;
    return sum + std::pow(n, 1.0 - s) / (s - 1.0);
}

Moments be_moments(double T, double mu) {
    const double z = std::exp(mu / (2.0 * T));
    Moments m;
    m.mass = std::pow(2.0 * pi * T, 1.5) * series_li(1.5, z);
    m.energy = 3.0 * T * std::pow(2.0 * pi * T, 1.5) * series_li(2.5, z);
    return m;
}

}  // namespace

TEST_CASE("zeta and polylog match their series") {
    CHECK(zeta(1.5) == doctest::Approx(2.612375348685488).epsilon(1e-13));
    CHECK(zeta(2.5) == doctest::Approx(zeta_oracle(2.5)).epsilon(1e-9));
    CHECK(zeta(1.5) == doctest::Approx(zeta_oracle(1.5)).epsilon(1e-9));
    for (double z : {0.01, 0.3, 0.5, 0.6, 0.9, 0.99}) {
        CAPTURE(z);
        CHECK(polylog_exp(1.5, std::log(z)) == doctest::Approx(series_li(1.5, z)).epsilon(1e-12));
        CHECK(polylog_exp(2.5, std::log(z)) == doctest::Approx(series_li(2.5, z)).epsilon(1e-12));
    }
    CHECK(polylog_exp(2.5, 0.0) == doctest::Approx(zeta(2.5)).epsilon(1e-15));
    CHECK(std::isinf(polylog_exp(0.5, 0.0)));
    CHECK_THROWS_AS(polylog_exp(1.5, 0.1), DomainError);
}

TEST_CASE("moments of simple fields") {
    const VelocityGrid v(7.0, 40);
    DistributionField zero(TorusGrid(2), v);
    const Moments z = compute_moments(zero);
    CHECK(z.mass == 0.0);
    CHECK(z.energy == 0.0);
    CHECK(z.entropy == 0.0);
    CHECK(z.linf == 0.0);

    DistributionField g(TorusGrid(1), v);
    for (std::size_t c = 0; c < v.size(); ++c) g.at(0, c) = std::exp(-norm2(v.velocity(c)) / 2.0);
    const Moments m = compute_moments(g);
    CHECK(m.mass == doctest::Approx(two_pi_32).epsilon(1e-3));
    CHECK(std::abs(m.momentum.x) < 1e-12);
    CHECK(std::abs(m.momentum.y) < 1e-12);
    CHECK(std::abs(m.momentum.z) < 1e-12);
    CHECK(m.energy == doctest::Approx(3.0 * two_pi_32).epsilon(1e-3));

    const VelocityGrid w(1.0, 4);
    DistributionField c(TorusGrid(3), w);
    for (double& x : c.values()) x = 0.7;
    const double volume = 8.0;  // unit torus times the velocity cube
    CHECK(compute_moments(c).entropy ==
          doctest::Approx(volume * (1.7 * std::log(1.7) - 0.7 * std::log(0.7))).epsilon(1e-13));
    CHECK(compute_moments(c).linf == 0.7);
}

TEST_CASE("entropy density is nonnegative and vanishes only at zero") {
    CHECK(entropy_density(0.0) == 0.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-12.0, 6.0);
    for (int i = 0; i < 10000; ++i) CHECK(entropy_density(std::pow(10.0, u(rng))) > 0.0);
}

TEST_CASE("Bose-Einstein field samples") {
    const VelocityGrid v(4.0, 8);
    const TorusGrid x(1);
    EquilibriumParams p;
    p.T = 1.0;
    p.mu = -1.0;
    p.u = v.velocity(0);  // node at u
    const DistributionField f = bose_einstein_field(p, x, v);
    CHECK(f.at(0, 0) == doctest::Approx(1.0 / (std::exp(0.5) - 1.0)).epsilon(1e-14));
    CHECK(f.at(0, 0) == doctest::Approx(1.54149).epsilon(1e-5));
    for (double y : f.values()) CHECK(y > 0.0);

    p.u = {};
    p.mu = -45.0;
    const DistributionField c = bose_einstein_field(p, x, v);
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double maxwell = std::exp(p.mu / 2.0) * std::exp(-norm2(v.velocity(k)) / 2.0);
        CHECK(c.at(0, k) == doctest::Approx(maxwell).epsilon(1e-10));
    }

    EquilibriumParams bad = p;
    bad.T = 0.0;
    CHECK_THROWS_AS(bose_einstein_field(bad, x, v), ContractViolation);
    bad = p;
    bad.mu = 0.1;
    CHECK_THROWS_AS(bose_einstein_field(bad, x, v), ContractViolation);
    bad = p;
    bad.mu = 0.0;
    bad.u = v.velocity(3);
    CHECK_THROWS_AS(bose_einstein_field(bad, x, v), DomainError);
}

TEST_CASE("fit recovers the series moments") {
    for (double mu : {-0.01, -1.0, -5.0}) {
        for (double T : {0.5, 1.0, 2.0}) {
            const EquilibriumParams p = fit_equilibrium(be_moments(T, mu));
            CAPTURE(mu);
            CAPTURE(T);
            CHECK(p.T == doctest::Approx(T).epsilon(1e-9));
            CHECK(p.mu == doctest::Approx(mu).epsilon(1e-8));
            CHECK(p.m0 == 0.0);
        }
    }
}

TEST_CASE("fit at and above the critical point") {
    Moments m;
    m.mass = two_pi_32 * zeta_oracle(1.5);
    m.energy = 3.0 * two_pi_32 * zeta_oracle(2.5);
    EquilibriumParams p = fit_equilibrium(m);
    CHECK(p.mu == 0.0);
    CHECK(p.T == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(p.m0 <= 1e-7 * m.mass);
    CHECK(p.mu * p.m0 == 0.0);

    const double rho_c = m.mass;
    m.mass = 1.1 * rho_c;
    p = fit_equilibrium(m);
    CHECK(p.mu == 0.0);
    CHECK(p.T == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(p.m0 == doctest::Approx(0.1 * rho_c).epsilon(1e-6));
    CHECK(p.mu * p.m0 == 0.0);
}

TEST_CASE("fit carries the drift and rejects nonphysical moments") {
    Moments m = be_moments(1.0, -1.0);
    const Velocity3 u{0.3, -0.2, 0.1};
    m.momentum = u * m.mass;
    m.energy += m.mass * norm2(u);
    const EquilibriumParams p = fit_equilibrium(m);
    CHECK(p.u.x == doctest::Approx(0.3));
    CHECK(p.u.y == doctest::Approx(-0.2));
    CHECK(p.T == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.mu == doctest::Approx(-1.0).epsilon(1e-8));

    Moments bad;
    CHECK_THROWS_AS(fit_equilibrium(bad), ValidationError);
    bad.mass = 1.0;
    bad.energy = 0.0;
    CHECK_THROWS_AS(fit_equilibrium(bad), ValidationError);
}

TEST_CASE("grid roundtrip through the fit") {
    EquilibriumParams p;
    p.T = 1.0;
    p.mu = -1.0;
    const VelocityGrid v(6.0, 24);
    const EquilibriumParams q = fit_equilibrium(compute_moments(bose_einstein_field(p, TorusGrid(1), v)));
    CHECK(q.T == doctest::Approx(1.0).epsilon(0.01));
    CHECK(q.mu == doctest::Approx(-1.0).epsilon(0.02));
    CHECK(q.m0 == 0.0);
    CHECK(q.mu * q.m0 == 0.0);
}

TEST_CASE("critical temperature") {
    const double rho = two_pi_32 * zeta(1.5);
    CHECK(rho == doctest::Approx(41.14).epsilon(1e-3));
    CHECK(critical_temperature(rho) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(critical_temperature(8.0 * rho) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(critical_temperature(1e-30) < 1e-19);
    double prev = 0.0;
    for (double r = 0.1; r < 100.0; r *= 1.7) {
        const double t = critical_temperature(r);
        CHECK(t > prev);
        CHECK(std::pow(2.0 * pi * t, 1.5) * zeta(1.5) == doctest::Approx(r).epsilon(1e-10));
        prev = t;
    }
}

TEST_CASE("same-moments Maxwellian") {
    const VelocityGrid v(6.0, 24);
    EquilibriumParams p;
    p.T = 1.0;
    p.mu = -1.0;
    const Moments m = compute_moments(bose_einstein_field(p, TorusGrid(1), v));
    const Moments g = compute_moments(same_moments_maxwellian(m, TorusGrid(1), v));
    CHECK(g.mass == doctest::Approx(m.mass).epsilon(1e-3));
    CHECK(g.energy == doctest::Approx(m.energy).epsilon(1e-3));
}

TEST_CASE("residual diagnostics") {
    const VelocityGrid v(5.0, 8);
    const SphereQuadrature q = build_sphere_quadrature(2);
    EquilibriumParams p;
    KernelSpec k;
    k.b0 = 0.0;
    CHECK(detailed_balance_residual(p, k, q, TorusGrid(1), v) == 0.0);
    k.b0 = 1.0;
    const double be = detailed_balance_residual(p, k, q, TorusGrid(1), v);
    CHECK(be > 0.0);
    CHECK(collision_residual(bose_einstein_field(p, TorusGrid(1), v), k, q) == doctest::Approx(be));
    p.mu = 0.0;
    CHECK_THROWS_AS(detailed_balance_residual(p, k, q, TorusGrid(1), v), ContractViolation);
}

TEST_CASE("condensate fraction") {
    const VelocityGrid v(1.0, 12);
    DistributionField f(TorusGrid(1), v);
    CHECK_FALSE(condensate_fraction(f, 2).has_value());
    CHECK_THROWS_AS(condensate_fraction(f, 0), ContractViolation);

    for (double& x : f.values()) x = 1.0;
    const int r = 4;
    const double cube = 12.0 * 12.0 * 12.0;
    const double frac = *condensate_fraction(f, r);
    CHECK(frac >= 4.0 / 3.0 * pi * std::pow(r - 1, 3) / cube);
    CHECK(frac <= 4.0 / 3.0 * pi * std::pow(r + 1, 3) / cube);

    const VelocityGrid odd(1.0, 9);
    DistributionField one(TorusGrid(1), odd);
    one.at(0, odd.size() / 2) = 3.0;
    CHECK(*condensate_fraction(one, 1) == 1.0);

    const VelocityGrid w(4.0, 16);
    EquilibriumParams a, b;
    a.T = b.T = 0.5;
    a.mu = -0.01;
    b.mu = -1.0;
    CHECK(*condensate_fraction(bose_einstein_field(a, TorusGrid(1), w), 1) >
          *condensate_fraction(bose_einstein_field(b, TorusGrid(1), w), 1));
}
