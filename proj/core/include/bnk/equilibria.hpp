#pragma once

#include <optional>

#include "bnk/collision_operator.hpp"
#include "bnk/geometry.hpp"
#include "bnk/phase_grid.hpp"

namespace bnk {

struct Moments {
    double mass = 0.0;
    Velocity3 momentum;
    double energy = 0.0;
    double entropy = 0.0;
    double linf = 0.0;
    double time = 0.0;
};

/// Bosonic entropy density (1 + f) ln(1 + f) - f ln f, with 0 ln 0 = 0.
double entropy_density(double f);

/// Midpoint integrals over x and v of {1, v, |v|^2, entropy density}, and
/// the max cell value. Summation runs in storage order.
Moments compute_moments(const DistributionField& f, double time = 0.0);

/// Drift u, temperature T, chemical potential mu <= 0 and condensate mass
/// m0 >= 0 of the equilibrium 1/(exp((|v-u|^2 - mu)/(2T)) - 1) + m0 delta(v - u).
struct EquilibriumParams {
    Velocity3 u;
    double T = 1.0;
    double mu = -1.0;
    double m0 = 0.0;
};

/// Samples the regular part at cell centres, homogeneous in x. Throws
/// ContractViolation for T <= 0 or mu > 0, DomainError when the formula is
/// singular at a cell centre (mu = 0 and a node at u).
DistributionField bose_einstein_field(const EquilibriumParams& p, const TorusGrid& x, const VelocityGrid& v);

/// Continuum Bose-Einstein equilibrium carrying the given mass, momentum
/// and energy (per unit torus volume). Returns mu = 0 and m0 > 0 when the
/// regular part cannot carry the mass. Throws ValidationError unless
/// mass > 0 and the centred energy is positive.
EquilibriumParams fit_equilibrium(const Moments& m);

/// Temperature at which the mu = 0 regular part carries exactly rho.
double critical_temperature(double rho);

/// Maxwellian with the mass, momentum and energy of m (per unit torus volume).
DistributionField same_moments_maxwellian(const Moments& m, const TorusGrid& x, const VelocityGrid& v);

/// max over cells of |R_0(f_BE)| for the bosonic operator without cutoff.
double detailed_balance_residual(const EquilibriumParams& p, const KernelSpec& k, const SphereQuadrature& q,
                                 const TorusGrid& x, const VelocityGrid& v);

/// max over cells of |R_0(f)|; the contrast measure for non-equilibrium data.
double collision_residual(const DistributionField& f, const KernelSpec& k, const SphereQuadrature& q);

/// Fraction of the total mass within radius_cells * dv of the mean velocity.
/// Empty when the total mass is zero. Throws ContractViolation for radius_cells < 1.
std::optional<double> condensate_fraction(const DistributionField& f, int radius_cells);

}  // namespace bnk
