#include "bnk/collision_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bnk/error.hpp"
#include "trilinear.hpp"

namespace bnk {

double filling_factor_regularized(double x, double alpha) {
    if (!(x >= 0.0)) throw ContractViolation("filling_factor_regularized: x must be >= 0");
    return (1.0 + x) / (1.0 + alpha * x);
}

double filling_factor_anyon(double f, double alpha) {
    if (alpha * f > 1.0) throw DomainError("filling_factor_anyon: alpha * f > 1");
    return std::pow(1.0 - alpha * f, alpha) * std::pow(1.0 + (1.0 - alpha) * f, 1.0 - alpha);
}

void Regularization::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("regularization: alpha must lie in [0, 1]");
    if (!(cutoff >= 0.0 && cutoff <= 1.0)) throw ValidationError("regularization: cutoff must lie in [0, 1]");
}

double Regularization::energy_bound() const {
    return cutoff == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / (cutoff * cutoff);
}

CollisionOperator::CollisionOperator(const VelocityGrid& grid, KernelSpec kernel, const SphereQuadrature& sphere,
                                     Regularization reg)
    : grid_(grid), kernel_(std::move(kernel)), reg_(reg), nodes_(grid.velocities()) {
    kernel_.validate();
    reg_.validate();
    energies_.resize(nodes_.size());
    for (std::size_t c = 0; c < nodes_.size(); ++c) energies_[c] = norm2(nodes_[c]);

    std::vector<bool> used(sphere.size(), false);
    for (std::size_t i = 0; i < sphere.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const Velocity3 n = sphere.nodes[i].vec();
        Direction d{n, sphere.weights[i], 0.0};
        for (std::size_t j = i + 1; j < sphere.size(); ++j) {
            if (!used[j] && norm2(sphere.nodes[j].vec() + n) < 1e-24) {
                used[j] = true;
                d.w_minus = sphere.weights[j];
                break;
            }
        }
        if (d.w_minus != d.w_plus) antipodal_ = false;
        directions_.push_back(d);
    }
}

double CollisionOperator::pair_weight(const Direction& d, double speed, double c) const {
    if (kernel_.form == KernelForm::constant) {
        if (std::abs(c) < kernel_.gamma) return 0.0;
        double w = 0.0;
        if (std::abs(1.0 - c) >= kernel_.gamma) w += d.w_plus;
        if (std::abs(1.0 + c) >= kernel_.gamma) w += d.w_minus;
        return w * kernel_.b0;
    }
    double w = d.w_plus * kernel_.value(speed, c);
    if (d.w_minus != 0.0) w += d.w_minus * kernel_.value(speed, -c);
    return w;
}

template <class Visit>
void CollisionOperator::for_each_collision(std::span<const double> f, Velocity3 v, double energy_v,
                                           Visit&& visit) const {
    const double bound = reg_.energy_bound();
    if (energy_v > bound) return;
    const detail::TrilinearSampler sample{f.data(), grid_.n(), grid_.v_max(), 1.0 / grid_.spacing()};
    const std::size_t ncell = nodes_.size();
    for (std::size_t b = 0; b < ncell; ++b) {
        if (energy_v + energies_[b] > bound) continue;
        const Velocity3& vb = nodes_[b];
        const Velocity3 g = v - vb;
        const double g2 = norm2(g);
        if (g2 == 0.0) continue;
        const double speed = std::sqrt(g2);
        const double inv_speed = 1.0 / speed;
        for (const Direction& d : directions_) {
            const double s = dot(g, d.n);
            const double w = pair_weight(d, speed, s * inv_speed);
            if (w == 0.0) continue;
            const Velocity3 vp{std::fma(-s, d.n.x, v.x), std::fma(-s, d.n.y, v.y), std::fma(-s, d.n.z, v.z)};
            const Velocity3 vps{std::fma(s, d.n.x, vb.x), std::fma(s, d.n.y, vb.y), std::fma(s, d.n.z, vb.z)};
            visit(b, w, sample(vp), sample(vps), vp, vps);
        }
    }
}

// With an antipodal rule the direction weight is symmetric under a <-> b,
// which maps (v', v'_*) onto (v'_*, v'). One interpolation pair then serves
// both cells of an unordered pair.
void CollisionOperator::evaluate_slice_pairs(std::span<const double> f, std::span<double> gain,
                                             std::span<double> nu) const {
    const std::size_t ncell = nodes_.size();
    const double alpha = reg_.alpha;
    const double bound = reg_.energy_bound();
    std::vector<double> phi_n(ncell), psi_n(ncell);
    for (std::size_t c = 0; c < ncell; ++c) {
        phi_n[c] = reg_.phi(f[c]);
        psi_n[c] = reg_.psi(f[c]);
    }
    const detail::TrilinearSampler sample{f.data(), grid_.n(), grid_.v_max(), 1.0 / grid_.spacing()};
    for (std::size_t a = 0; a < ncell; ++a) {
        const double ea = energies_[a];
        if (ea > bound) continue;
        const Velocity3 va = nodes_[a];
        double gain_a = 0.0, nu_a = 0.0;
        for (std::size_t b = a + 1; b < ncell; ++b) {
            if (ea + energies_[b] > bound) continue;
            const Velocity3& vb = nodes_[b];
            const Velocity3 g = va - vb;
            const double speed = std::sqrt(norm2(g));
            const double inv_speed = 1.0 / speed;
            double p_sum = 0.0, q_sum = 0.0;
            for (const Direction& d : directions_) {
                const double s = dot(g, d.n);
                const double w = pair_weight(d, speed, s * inv_speed);
                if (w == 0.0) continue;
                const Velocity3 vp{std::fma(-s, d.n.x, va.x), std::fma(-s, d.n.y, va.y), std::fma(-s, d.n.z, va.z)};
                const Velocity3 vps{std::fma(s, d.n.x, vb.x), std::fma(s, d.n.y, vb.y), std::fma(s, d.n.z, vb.z)};
                const double fp = sample(vp);
                const double fps = sample(vps);
                const double inv = 1.0 / ((1.0 + alpha * fp) * (1.0 + alpha * fps));
                p_sum += w * (fp * fps) * inv;
                q_sum += w * ((1.0 + fp) * (1.0 + fps)) * inv;
            }
            gain_a += psi_n[b] * p_sum;
            nu_a += phi_n[b] * q_sum;
            gain[b] += psi_n[a] * p_sum;
            nu[b] += phi_n[a] * q_sum;
        }
        gain[a] += gain_a;
        nu[a] += nu_a;
    }
    const double dv3 = grid_.cell_volume();
    for (std::size_t a = 0; a < ncell; ++a) {
        gain[a] *= dv3 * psi_n[a];
        nu[a] *= dv3;
    }
}

void CollisionOperator::evaluate_slice(std::span<const double> f, std::span<double> gain,
                                       std::span<double> rate) const {
    const std::size_t ncell = nodes_.size();
    std::fill(gain.begin(), gain.end(), 0.0);
    std::fill(rate.begin(), rate.end(), 0.0);
    if (antipodal_) {
        evaluate_slice_pairs(f, gain, rate);
    } else {
        std::vector<double> phi_n(ncell), psi_n(ncell);
        for (std::size_t c = 0; c < ncell; ++c) {
            phi_n[c] = reg_.phi(f[c]);
            psi_n[c] = reg_.psi(f[c]);
        }
        const double dv3 = grid_.cell_volume();
        for (std::size_t a = 0; a < ncell; ++a) {
            double acc_gain = 0.0, acc_nu = 0.0;
            for_each_collision(
                f, nodes_[a], energies_[a],
                [&](std::size_t b, double w, double fp, double fps, const Velocity3&, const Velocity3&) {
                    acc_gain += w * psi_n[b] * reg_.phi(fp) * reg_.phi(fps);
                    acc_nu += w * phi_n[b] * reg_.psi(fp) * reg_.psi(fps);
                });
            gain[a] = dv3 * psi_n[a] * acc_gain;
            rate[a] = dv3 * acc_nu;
        }
    }
    if (reg_.alpha != 0.0) {
        for (std::size_t a = 0; a < ncell; ++a) rate[a] /= 1.0 + reg_.alpha * f[a];
    }
}

CollisionTerms CollisionOperator::terms(const DistributionField& f) const {
    if (!(f.velocity() == grid_)) throw ContractViolation("CollisionOperator: field on a different velocity grid");
    CollisionTerms t{std::vector<double>(f.size()), std::vector<double>(f.size())};
    const std::size_t nv = grid_.size();
    for (std::size_t x = 0; x < f.torus().size(); ++x) {
        evaluate_slice(f.slice(x), std::span<double>(t.gain.data() + x * nv, nv),
                       std::span<double>(t.rate.data() + x * nv, nv));
    }
    return t;
}

CollisionIncrement CollisionOperator::apply(const DistributionField& f) const {
    const CollisionTerms t = terms(f);
    CollisionIncrement inc{f.torus(), f.velocity(), std::vector<double>(f.size())};
    const auto fv = f.values();
    for (std::size_t i = 0; i < fv.size(); ++i) inc.values[i] = t.gain[i] - t.rate[i] * fv[i];
    return inc;
}

double CollisionOperator::gain_at(const DistributionField& f, std::size_t x_cell, Velocity3 v) const {
    const auto s = f.slice(x_cell);
    const double fv = interpolate_slice(s, grid_, v);
    double acc = 0.0;
    for_each_collision(s, v, norm2(v),
                       [&](std::size_t b, double w, double fp, double fps, const Velocity3&, const Velocity3&) {
                           acc += w * reg_.psi(s[b]) * reg_.phi(fp) * reg_.phi(fps);
                       });
    return grid_.cell_volume() * reg_.psi(fv) * acc;
}

double CollisionOperator::nu_at(const DistributionField& f, std::size_t x_cell, Velocity3 v) const {
    const auto s = f.slice(x_cell);
    double acc = 0.0;
    for_each_collision(s, v, norm2(v),
                       [&](std::size_t b, double w, double fp, double fps, const Velocity3&, const Velocity3&) {
                           acc += w * reg_.phi(s[b]) * reg_.psi(fp) * reg_.psi(fps);
                       });
    return grid_.cell_volume() * acc;
}

double CollisionOperator::symmetrized_moment(const DistributionField& f,
                                             const std::function<double(Velocity3)>& weight) const {
    const std::size_t ncell = nodes_.size();
    std::vector<double> wn(ncell);
    for (std::size_t c = 0; c < ncell; ++c) wn[c] = weight(nodes_[c]);
    const double dv3 = grid_.cell_volume();
    double total = 0.0;
    for (std::size_t x = 0; x < f.torus().size(); ++x) {
        const auto s = f.slice(x);
        double slice_sum = 0.0;
        for (std::size_t a = 0; a < ncell; ++a) {
            const double phi_a = reg_.phi(s[a]);
            if (phi_a == 0.0) continue;
            double acc = 0.0;
            for_each_collision(s, nodes_[a], energies_[a],
                               [&](std::size_t b, double w, double fp, double fps, const Velocity3& vp,
                                   const Velocity3& vps) {
                                   const double bracket = (weight(vp) + weight(vps)) - (wn[a] + wn[b]);
                                   acc += w * reg_.phi(s[b]) * reg_.psi(fp) * reg_.psi(fps) * bracket;
                               });
            slice_sum += phi_a * acc;
        }
        total += slice_sum;
    }
    return 0.5 * total * dv3 * dv3 * f.torus().cell_volume();
}

namespace {

CollisionOperator make_operator(const DistributionField& f, double alpha, const KernelSpec& k,
                                const SphereQuadrature& q) {
    return CollisionOperator(f.velocity(), k, q, Regularization::regularized(alpha));
}

}  // namespace

double collision_gain(const DistributionField& f, std::size_t x_cell, Velocity3 v, double alpha,
                      const KernelSpec& k, const SphereQuadrature& q) {
    return make_operator(f, alpha, k, q).gain_at(f, x_cell, v);
}

double collision_loss_nu(const DistributionField& f, std::size_t x_cell, Velocity3 v, double alpha,
                         const KernelSpec& k, const SphereQuadrature& q) {
    return make_operator(f, alpha, k, q).nu_at(f, x_cell, v);
}

CollisionIncrement apply_R_alpha(const DistributionField& f, double alpha, const KernelSpec& k,
                                 const SphereQuadrature& q) {
    return make_operator(f, alpha, k, q).apply(f);
}

double collision_moment(const DistributionField& f, const std::function<double(Velocity3)>& weight, double alpha,
                        const KernelSpec& k, const SphereQuadrature& q) {
    return make_operator(f, alpha, k, q).symmetrized_moment(f, weight);
}

}  // namespace bnk
