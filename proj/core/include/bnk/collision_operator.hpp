#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "bnk/geometry.hpp"
#include "bnk/phase_grid.hpp"

namespace bnk {

/// F_alpha(x) = (1 + x) / (1 + alpha x). Throws ContractViolation for x < 0.
double filling_factor_regularized(double x, double alpha);

/// Anyon filling factor (1 - alpha f)^alpha (1 + (1 - alpha) f)^(1 - alpha).
/// Throws DomainError when alpha f > 1.
double filling_factor_anyon(double f, double alpha);

/// Selects a member of the operator family.
///
/// `alpha` enters the saturated factors f/(1+alpha f) and (1+f)/(1+alpha f);
/// alpha = 0 gives the bosonic operator with factors f and 1+f. `cutoff` is
/// the parameter of the energy indicator |v|^2 + |v_*|^2 <= 1/cutoff^2, and
/// cutoff = 0 switches the indicator off.
struct Regularization {
    double alpha = 1.0;
    double cutoff = 1.0;

    static Regularization regularized(double a) { return {a, a}; }
    static Regularization bosonic() { return {0.0, 0.0}; }

    void validate() const;
    double phi(double f) const { return alpha == 0.0 ? f : f / (1.0 + alpha * f); }
    double psi(double f) const { return alpha == 0.0 ? 1.0 + f : (1.0 + f) / (1.0 + alpha * f); }
    double energy_bound() const;  ///< 1/cutoff^2, or +inf without cutoff
};

/// Collision operator output, shaped like a DistributionField but signed.
struct CollisionIncrement {
    TorusGrid torus;
    VelocityGrid velocity;
    std::vector<double> values;

    std::span<const double> slice(std::size_t x_cell) const {
        return {values.data() + x_cell * velocity.size(), velocity.size()};
    }
    std::span<double> slice(std::size_t x_cell) {
        return {values.data() + x_cell * velocity.size(), velocity.size()};
    }
};

/// Gain R^+ and loss rate lambda = nu / (1 + alpha f), so that R = gain - lambda f.
struct CollisionTerms {
    std::vector<double> gain;
    std::vector<double> rate;
};

/// Deterministic quadrature of the regularized Boltzmann-Nordheim operator
/// on a velocity grid.
///
/// v_* runs over every grid cell (restricted by the energy indicator), n over
/// the sphere rule. Post-collisional values f', f'_* come from trilinear
/// interpolation of f. Antipodal nodes share their post-collisional
/// velocities, so each pair is evaluated once with the kernel weighted at
/// cos(theta) and -cos(theta).
class CollisionOperator {
  public:
    CollisionOperator(const VelocityGrid& grid, KernelSpec kernel, const SphereQuadrature& sphere,
                      Regularization reg);

    const VelocityGrid& grid() const { return grid_; }
    const KernelSpec& kernel() const { return kernel_; }
    const Regularization& regularization() const { return reg_; }

    /// Gain and loss rate at every node of one velocity slice.
    void evaluate_slice(std::span<const double> f, std::span<double> gain, std::span<double> rate) const;

    CollisionTerms terms(const DistributionField& f) const;
    CollisionIncrement apply(const DistributionField& f) const;

    /// Gain and nu at an arbitrary velocity; f(v) itself is interpolated.
    double gain_at(const DistributionField& f, std::size_t x_cell, Velocity3 v) const;
    double nu_at(const DistributionField& f, std::size_t x_cell, Velocity3 v) const;

    /// integral of R(f) w over x and v in the symmetrized form
    /// (1/2) int B phi phi_* psi' psi'_* [w' + w'_* - w - w_*].
    double symmetrized_moment(const DistributionField& f, const std::function<double(Velocity3)>& w) const;

  private:
    struct Direction {
        Velocity3 n;
        double w_plus;   // weight of n
        double w_minus;  // weight of -n, 0 when the rule has no antipode
    };

    template <class Visit>
    void for_each_collision(std::span<const double> f, Velocity3 v, double energy_v, Visit&& visit) const;
    double pair_weight(const Direction& d, double speed, double c) const;
    void evaluate_slice_pairs(std::span<const double> f, std::span<double> gain, std::span<double> nu) const;

    VelocityGrid grid_;
    KernelSpec kernel_;
    Regularization reg_;
    std::vector<Direction> directions_;
    std::vector<Velocity3> nodes_;
    std::vector<double> energies_;
    bool antipodal_ = true;  // every direction carries equal weight on n and -n
};

// Free-function forms. alpha in (0, 1] selects R_alpha with the matching
// energy cutoff; alpha = 0 selects the bosonic operator without cutoff.
double collision_gain(const DistributionField& f, std::size_t x_cell, Velocity3 v, double alpha,
                      const KernelSpec& k, const SphereQuadrature& q);
double collision_loss_nu(const DistributionField& f, std::size_t x_cell, Velocity3 v, double alpha,
                         const KernelSpec& k, const SphereQuadrature& q);
CollisionIncrement apply_R_alpha(const DistributionField& f, double alpha, const KernelSpec& k,
                                 const SphereQuadrature& q);
double collision_moment(const DistributionField& f, const std::function<double(Velocity3)>& weight,
                        double alpha, const KernelSpec& k, const SphereQuadrature& q);

/// Discrete mass, momentum (3) and energy of one velocity slice of an
/// increment: sum_v inc * {1, v, |v|^2} dv^3.
using ConservationSums = std::array<double, 5>;
ConservationSums conservation_sums(std::span<const double> slice, const VelocityGrid& grid);

/// Scale used to judge conservation sums: sum_v |inc| * {1, |v_i|, |v|^2} dv^3.
ConservationSums conservation_scales(std::span<const double> slice, const VelocityGrid& grid);

/// Least-squares correction of one slice so that its five conservation sums
/// vanish. With metric weights m the correction minimizes sum delta^2 / m and
/// is proportional to m (cells with m = 0 stay untouched); an empty metric
/// means the plain discrete L2 norm. Throws NumericalFailure when the 5x5 Gram
/// matrix is degenerate.
void project_slice(std::span<double> inc, const VelocityGrid& grid, std::span<const double> metric = {});

CollisionIncrement conservative_projection(const CollisionIncrement& inc, const VelocityGrid& grid);
CollisionIncrement conservative_projection(const CollisionIncrement& inc, const VelocityGrid& grid,
                                           std::span<const double> metric);

}  // namespace bnk
