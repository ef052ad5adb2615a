#include "bnk/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bnk/error.hpp"
#include "bnk/polylog.hpp"

namespace bnk {

namespace {

constexpr double two_pi_32 = 15.749609945722419;  // (2 pi)^(3/2)

// ln Phi(w) with Phi = Li_{3/2}^{5/2} / Li_{5/2}^{3/2}, and its w-derivative.
void log_phi(double w, double& value, double& slope) {
    const double l12 = polylog_exp(0.5, w);
    const double l32 = polylog_exp(1.5, w);
    const double l52 = polylog_exp(2.5, w);
    value = 2.5 * std::log(l32) - 1.5 * std::log(l52);
    slope = 2.5 * l12 / l32 - 1.5 * l32 / l52;
}

}  // namespace

double entropy_density(double f) {
    if (f <= 0.0) return 0.0;
    return (1.0 + f) * std::log1p(f) - f * std::log(f);
}

Moments compute_moments(const DistributionField& f, double time) {
    const auto& vg = f.velocity();
    const std::size_t nv = vg.size();
    const auto nodes = vg.velocities();
    Moments m;
    m.time = time;
    for (std::size_t x = 0; x < f.torus().size(); ++x) {
        const auto s = f.slice(x);
        for (std::size_t c = 0; c < nv; ++c) {
            const double v = s[c];
            const Velocity3& w = nodes[c];
            m.mass += v;
            m.momentum.x += v * w.x;
            m.momentum.y += v * w.y;
            m.momentum.z += v * w.z;
            m.energy += v * norm2(w);
            m.entropy += entropy_density(v);
            m.linf = std::max(m.linf, v);
        }
    }
    const double vol = vg.cell_volume() * f.torus().cell_volume();
    m.mass *= vol;
    m.momentum = m.momentum * vol;
    m.energy *= vol;
    m.entropy *= vol;
    return m;
}

DistributionField bose_einstein_field(const EquilibriumParams& p, const TorusGrid& x, const VelocityGrid& v) {
    if (!(p.T > 0.0)) throw ContractViolation("bose_einstein_field: T must be > 0");
    if (!(p.mu <= 0.0)) throw ContractViolation("bose_einstein_field: mu must be <= 0");
    const std::size_t nv = v.size();
    std::vector<double> slice(nv);
    for (std::size_t c = 0; c < nv; ++c) {
        const double e = (norm2(v.velocity(c) - p.u) - p.mu) / (2.0 * p.T);
        if (e == 0.0) throw DomainError("bose_einstein_field: singular at a cell centre (mu = 0, node at u)");
        slice[c] = 1.0 / std::expm1(e);
    }
    std::vector<double> values;
    values.reserve(nv * x.size());
    for (std::size_t i = 0; i < x.size(); ++i) values.insert(values.end(), slice.begin(), slice.end());
    return DistributionField(x, v, std::move(values));
}

double critical_temperature(double rho) {
    if (!(rho > 0.0)) throw ContractViolation("critical_temperature: density must be > 0");
    return std::pow(rho / (two_pi_32 * zeta(1.5)), 2.0 / 3.0);
}

EquilibriumParams fit_equilibrium(const Moments& m) {
    if (!(m.mass > 0.0)) throw ValidationError("fit_equilibrium: mass must be > 0");
    EquilibriumParams p;
    p.u = m.momentum / m.mass;
    const double ec = m.energy - m.mass * norm2(p.u);
    if (!(ec > 0.0)) throw ValidationError("fit_equilibrium: centred energy must be > 0");
    const double rho = m.mass;
    // rho = (2 pi T)^{3/2} Li_{3/2}(z), ec = 3 T (2 pi T)^{3/2} Li_{5/2}(z)
    // eliminate T: Phi(z) = rho^{5/2} (3 / (2 pi ec))^{3/2}.
    const double log_target = 2.5 * std::log(rho) + 1.5 * std::log(3.0 / (2.0 * std::numbers::pi * ec));
    const double log_phi_one = 2.5 * std::log(zeta(1.5)) - 1.5 * std::log(zeta(2.5));
    if (log_target >= log_phi_one) {
        p.mu = 0.0;
        p.T = std::pow(ec / (3.0 * two_pi_32 * zeta(2.5)), 0.4);
        p.m0 = std::max(0.0, rho - std::pow(2.0 * std::numbers::pi * p.T, 1.5) * zeta(1.5));
        return p;
    }
    // ln Phi(w) lies in [w, w + 2.5 ln zeta(3/2)], which brackets the root.
    double lo = log_target - 2.5 * std::log(zeta(1.5)) - 1e-3;
    double hi = std::min(log_target, 0.0);
    double w = std::min(log_target, -1e-3);
    if (w <= lo) w = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double val, slope;
        log_phi(w, val, slope);
        const double r = val - log_target;
        if (std::abs(r) < 1e-12) break;
        if (r > 0.0) hi = w; else lo = w;
        double next = w - r / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        w = next;
    }
    const double l32 = polylog_exp(1.5, w);
    p.T = std::pow(rho / l32, 2.0 / 3.0) / (2.0 * std::numbers::pi);
    p.mu = 2.0 * p.T * w;
    p.m0 = 0.0;
    return p;
}

DistributionField same_moments_maxwellian(const Moments& m, const TorusGrid& x, const VelocityGrid& v) {
    if (!(m.mass > 0.0)) throw ValidationError("same_moments_maxwellian: mass must be > 0");
    const Velocity3 u = m.momentum / m.mass;
    const double T = (m.energy - m.mass * norm2(u)) / (3.0 * m.mass);
    if (!(T > 0.0)) throw ValidationError("same_moments_maxwellian: centred energy must be > 0");
    const double amp = m.mass / std::pow(2.0 * std::numbers::pi * T, 1.5);
    DistributionField f(x, v);
    const std::size_t nv = v.size();
    for (std::size_t c = 0; c < nv; ++c) {
        const double val = amp * std::exp(-norm2(v.velocity(c) - u) / (2.0 * T));
        for (std::size_t i = 0; i < x.size(); ++i) f.at(i, c) = val;
    }
    return f;
}

double collision_residual(const DistributionField& f, const KernelSpec& k, const SphereQuadrature& q) {
    const CollisionOperator op(f.velocity(), k, q, Regularization::bosonic());
    const CollisionIncrement r = op.apply(f);
    double worst = 0.0;
    for (double x : r.values) worst = std::max(worst, std::abs(x));
    return worst;
}

double detailed_balance_residual(const EquilibriumParams& p, const KernelSpec& k, const SphereQuadrature& q,
                                 const TorusGrid& x, const VelocityGrid& v) {
    if (!(p.mu < 0.0)) throw ContractViolation("detailed_balance_residual: mu must be < 0");
    if (k.b0 == 0.0) return 0.0;
    return collision_residual(bose_einstein_field(p, x, v), k, q);
}

std::optional<double> condensate_fraction(const DistributionField& f, int radius_cells) {
    if (radius_cells < 1) throw ContractViolation("condensate_fraction: radius_cells must be >= 1");
    const Moments m = compute_moments(f);
    if (!(m.mass > 0.0)) return std::nullopt;
    const auto& vg = f.velocity();
    const Velocity3 u = m.momentum / m.mass;
    const double r = radius_cells * vg.spacing();
    const double r2 = r * r * (1.0 + 1e-12);
    double inside = 0.0, total = 0.0;
    for (std::size_t x = 0; x < f.torus().size(); ++x) {
        const auto s = f.slice(x);
        for (std::size_t c = 0; c < s.size(); ++c) {
            total += s[c];
            if (norm2(vg.velocity(c) - u) <= r2) inside += s[c];
        }
    }
    return std::clamp(inside / total, 0.0, 1.0);
}

}  // namespace bnk
