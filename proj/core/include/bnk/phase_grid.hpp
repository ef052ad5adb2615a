#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bnk/geometry.hpp"

namespace bnk {

/// Cell-centred tensor grid on the velocity cube [-v_max, v_max]^3.
///
/// Node i sits at (i + 1/2) dv - v_max with dv = 2 v_max / n. Even n keeps
/// v = 0 off the node set; odd n places a node exactly at the origin.
class VelocityGrid {
  public:
    VelocityGrid() = default;
    /// Throws ValidationError unless v_max > 0 and n >= 2.
    VelocityGrid(double v_max, int n);

    double v_max() const { return v_max_; }
    int n() const { return n_; }
    double spacing() const { return dv_; }
    double cell_volume() const { return dv_ * dv_ * dv_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

    double node(int i) const { return (i + 0.5) * dv_ - v_max_; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }
    Velocity3 velocity(std::size_t cell) const {
        const int k = static_cast<int>(cell % n_);
        const int j = static_cast<int>((cell / n_) % n_);
        const int i = static_cast<int>(cell / (static_cast<std::size_t>(n_) * n_));
        return {node(i), node(j), node(k)};
    }
    /// Cell centres in storage order.
    std::vector<Velocity3> velocities() const;

    friend bool operator==(const VelocityGrid&, const VelocityGrid&) = default;

  private:
    double v_max_ = 1.0;
    int n_ = 2;
    double dv_ = 1.0;
};

/// Uniform periodic grid on the unit torus T^3; n = 1 is the space-homogeneous mode.
class TorusGrid {
  public:
    TorusGrid() = default;
    explicit TorusGrid(int n);

    int n() const { return n_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
    double spacing() const { return 1.0 / n_; }
    double cell_volume() const { return spacing() * spacing() * spacing(); }

    friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

  private:
    int n_ = 1;
};

/// Nonnegative phase-space density on TorusGrid x VelocityGrid. Storage is
/// x-major: the velocity slice of x-cell c occupies [c * nv^3, (c+1) * nv^3).
class DistributionField {
  public:
    DistributionField() = default;
    DistributionField(TorusGrid x, VelocityGrid v);
    /// Throws ContractViolation on size mismatch or any negative/non-finite entry.
    DistributionField(TorusGrid x, VelocityGrid v, std::vector<double> values);

    const TorusGrid& torus() const { return torus_; }
    const VelocityGrid& velocity() const { return velocity_; }

    std::span<const double> values() const { return values_; }
    /// Mutable storage for construction; call check() after writing.
    std::span<double> values() { return values_; }
    std::span<const double> slice(std::size_t x_cell) const {
        return {values_.data() + x_cell * velocity_.size(), velocity_.size()};
    }
    std::span<double> slice(std::size_t x_cell) {
        return {values_.data() + x_cell * velocity_.size(), velocity_.size()};
    }
    double& at(std::size_t x_cell, std::size_t v_cell) { return values_[x_cell * velocity_.size() + v_cell]; }
    double at(std::size_t x_cell, std::size_t v_cell) const {
        return values_[x_cell * velocity_.size() + v_cell];
    }

    std::size_t size() const { return values_.size(); }
    double linf() const;
    void check() const;

  private:
    TorusGrid torus_;
    VelocityGrid velocity_;
    std::vector<double> values_;
};

/// Trilinear interpolation on a single velocity slice. Zero outside the cube;
/// inside the boundary half-cells the outermost node value is held constant.
double interpolate_slice(std::span<const double> slice, const VelocityGrid& grid, Velocity3 v);

double interpolate_velocity(const DistributionField& f, std::size_t x_cell, Velocity3 v);

/// Midpoint rule sum_v f(x, v) w(v) dv^3 for every x-cell.
std::vector<double> integrate_velocity(const DistributionField& f,
                                       const std::function<double(Velocity3)>& weight);

/// Raw spectral shift g(x, v) = f(x - dt v, v) of any array laid out like a
/// DistributionField. Trigonometric interpolation per axis; the Nyquist mode
/// of an even grid is kept as its real cosine part, so exact reversibility
/// holds for odd n or Nyquist-free data.
std::vector<double> shift_periodic(std::span<const double> values, const TorusGrid& x,
                                   const VelocityGrid& v, double dt);

/// Floor at zero whatever rounding or Gibbs undershoot a shift produced,
/// then rescale each velocity column over x back to its pre-floor sum. The
/// column sums, hence all velocity moments, are untouched. Returns the total
/// mass removed by flooring (times cell volumes).
double repair_positivity(std::span<double> values, const TorusGrid& x, const VelocityGrid& v);

/// Free transport over dt on the torus: shift_periodic followed by repair_positivity.
DistributionField transport_shift(const DistributionField& f, double dt);

/// Angular nodes with weights on S^2. Rules built here are antipodally
/// symmetric: for every node -n is also a node with the same weight.
struct SphereQuadrature {
    std::vector<UnitNormal> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    double weight_sum() const;
};

/// Gauss-Legendre in cos(polar) with `order` points times 2*order uniform
/// azimuths; 2 order^2 nodes. Throws ContractViolation for order < 1.
SphereQuadrature build_sphere_quadrature(int order);

/// 26-point Lebedev rule (exact through degree 7).
SphereQuadrature lebedev26();

}  // namespace bnk
