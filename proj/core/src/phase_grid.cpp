#include "bnk/phase_grid.hpp"

#include <algorithm>
#include <numbers>
#include <string>

#include "bnk/error.hpp"
#include "trilinear.hpp"

namespace bnk {

VelocityGrid::VelocityGrid(double v_max, int n) : v_max_(v_max), n_(n) {
    if (!(v_max > 0.0) || !std::isfinite(v_max)) throw ValidationError("velocity grid: v_max must be > 0");
    if (n < 2) throw ValidationError("velocity grid: n_v must be >= 2");
    dv_ = 2.0 * v_max / n;
}

std::vector<Velocity3> VelocityGrid::velocities() const {
    std::vector<Velocity3> out(size());
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = velocity(c);
    return out;
}

TorusGrid::TorusGrid(int n) : n_(n) {
    if (n < 1) throw ValidationError("torus grid: n_x must be >= 1");
}

DistributionField::DistributionField(TorusGrid x, VelocityGrid v)
    : torus_(x), velocity_(v), values_(x.size() * v.size(), 0.0) {}

DistributionField::DistributionField(TorusGrid x, VelocityGrid v, std::vector<double> values)
    : torus_(x), velocity_(v), values_(std::move(values)) {
    if (values_.size() != torus_.size() * velocity_.size()) {
        throw ContractViolation("DistributionField: expected " + std::to_string(torus_.size() * velocity_.size()) +
                                " values, got " + std::to_string(values_.size()));
    }
    check();
}

double DistributionField::linf() const {
    double m = 0.0;
    for (double f : values_) m = std::max(m, f);
    return m;
}

void DistributionField::check() const {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
            throw ContractViolation("DistributionField: entry " + std::to_string(i) + " = " +
                                    std::to_string(values_[i]) + " is negative or non-finite");
        }
    }
}

double interpolate_slice(std::span<const double> slice, const VelocityGrid& grid, Velocity3 v) {
    const detail::TrilinearSampler sample{slice.data(), grid.n(), grid.v_max(), 1.0 / grid.spacing()};
    return sample(v);
}

double interpolate_velocity(const DistributionField& f, std::size_t x_cell, Velocity3 v) {
    return interpolate_slice(f.slice(x_cell), f.velocity(), v);
}

std::vector<double> integrate_velocity(const DistributionField& f,
                                       const std::function<double(Velocity3)>& weight) {
    const auto& vg = f.velocity();
    std::vector<double> w(vg.size());
    for (std::size_t c = 0; c < w.size(); ++c) w[c] = weight(vg.velocity(c));
    std::vector<double> out(f.torus().size(), 0.0);
    for (std::size_t x = 0; x < out.size(); ++x) {
        const auto s = f.slice(x);
        double acc = 0.0;
        for (std::size_t c = 0; c < s.size(); ++c) acc += s[c] * w[c];
        out[x] = acc * vg.cell_volume();
    }
    return out;
}

double SphereQuadrature::weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

namespace {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
}

}  // namespace

SphereQuadrature build_sphere_quadrature(int order) {
    if (order < 1) throw ContractViolation("build_sphere_quadrature: order must be >= 1");
    std::vector<double> mu, wmu;
    gauss_legendre(order, mu, wmu);
    const int n_phi = 2 * order;
    SphereQuadrature q;
    q.nodes.reserve(static_cast<std::size_t>(order) * n_phi);
    for (int i = 0; i < order; ++i) {
        const double st = std::sqrt(std::max(0.0, 1.0 - mu[i] * mu[i]));
        for (int j = 0; j < n_phi; ++j) {
            const double phi = 2.0 * std::numbers::pi * (j + 0.5) / n_phi;
            q.nodes.push_back(UnitNormal::normalized({st * std::cos(phi), st * std::sin(phi), mu[i]}));
            q.weights.push_back(wmu[i] * 2.0 * std::numbers::pi / n_phi);
        }
    }
    return q;
}

SphereQuadrature lebedev26() {
    SphereQuadrature q;
    const double four_pi = 4.0 * std::numbers::pi;
    auto add = [&](double x, double y, double z, double w) {
        q.nodes.push_back(UnitNormal::normalized({x, y, z}));
        q.weights.push_back(four_pi * w);
    };
    for (int s : {-1, 1}) {
        add(s, 0, 0, 1.0 / 21.0);
        add(0, s, 0, 1.0 / 21.0);
        add(0, 0, s, 1.0 / 21.0);
    }
    for (int a : {-1, 1}) {
        for (int b : {-1, 1}) {
            add(a, b, 0, 4.0 / 105.0);
            add(a, 0, b, 4.0 / 105.0);
            add(0, a, b, 4.0 / 105.0);
        }
    }
    for (int a : {-1, 1})
        for (int b : {-1, 1})
            for (int c : {-1, 1}) add(a, b, c, 9.0 / 280.0);
    return q;
}

}  // namespace bnk
