#include <cmath>
#include <numbers>

#include "bnk/phase_grid.hpp"

namespace bnk {

namespace {

// Circulant weights K[d] of the 1D trigonometric shift by delta periods:
// g_j = sum_m f_m K[(j - m) mod n].
std::vector<double> shift_kernel(int n, double delta) {
    std::vector<double> k(n, 0.0);
    const double frac = delta - std::nearbyint(delta);
    if (n == 1 || frac == 0.0) {
        k[0] = 1.0;
        return k;
    }
    const bool even = n % 2 == 0;
    const int kmax = even ? n / 2 - 1 : (n - 1) / 2;
    const double nyquist = even ? std::cos(std::numbers::pi * n * frac) : 0.0;
    for (int d = 0; d < n; ++d) {
        const double phase = 2.0 * std::numbers::pi * (static_cast<double>(d) / n - frac);
        double s = 1.0;
        for (int m = 1; m <= kmax; ++m) s += 2.0 * std::cos(m * phase);
        if (even) s += (d % 2 == 0 ? 1.0 : -1.0) * nyquist;
        k[d] = s / n;
    }
    return k;
}

void apply_axis(std::vector<double>& slab, std::vector<double>& tmp, int n, int stride,
                const std::vector<double>& kern) {
    // Lines along one axis: index = base + m * stride.
    const int nn = n * n * n;
    for (int base = 0; base < nn; ++base) {
        if ((base / stride) % n != 0) continue;
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int m = 0; m < n; ++m) acc += kern[((j - m) % n + n) % n] * slab[base + m * stride];
            tmp[j] = acc;
        }
        for (int j = 0; j < n; ++j) slab[base + j * stride] = tmp[j];
    }
}

}  // namespace

std::vector<double> shift_periodic(std::span<const double> values, const TorusGrid& x,
                                   const VelocityGrid& v, double dt) {
    std::vector<double> out(values.begin(), values.end());
    const int nx = x.n();
    if (nx == 1 || dt == 0.0) return out;
    const int nv = v.n();
    std::vector<std::vector<double>> kernels(nv);
    for (int i = 0; i < nv; ++i) kernels[i] = shift_kernel(nx, dt * v.node(i));

    const std::size_t nvc = v.size();
    const std::size_t nxc = x.size();
    std::vector<double> slab(nxc), tmp(nx);
    for (int i = 0; i < nv; ++i) {
        for (int j = 0; j < nv; ++j) {
            for (int k = 0; k < nv; ++k) {
                const std::size_t vc = v.index(i, j, k);
                for (std::size_t c = 0; c < nxc; ++c) slab[c] = values[c * nvc + vc];
                apply_axis(slab, tmp, nx, nx * nx, kernels[i]);
                apply_axis(slab, tmp, nx, nx, kernels[j]);
                apply_axis(slab, tmp, nx, 1, kernels[k]);
                for (std::size_t c = 0; c < nxc; ++c) out[c * nvc + vc] = slab[c];
            }
        }
    }
    return out;
}

double repair_positivity(std::span<double> values, const TorusGrid& x, const VelocityGrid& v) {
    const std::size_t nvc = v.size();
    const std::size_t nxc = x.size();
    double removed = 0.0;
    for (std::size_t vc = 0; vc < nvc; ++vc) {
        double total = 0.0, positive = 0.0;
        bool any_negative = false;
        for (std::size_t c = 0; c < nxc; ++c) {
            const double f = values[c * nvc + vc];
            total += f;
            if (f < 0.0) {
                any_negative = true;
                removed -= f;
            } else {
                positive += f;
            }
        }
        if (!any_negative) continue;
        const double scale = (total > 0.0 && positive > 0.0) ? total / positive : 0.0;
        for (std::size_t c = 0; c < nxc; ++c) {
            double& f = values[c * nvc + vc];
            f = f < 0.0 ? 0.0 : f * scale;
        }
    }
    return removed * v.cell_volume() * x.cell_volume();
}

DistributionField transport_shift(const DistributionField& f, double dt) {
    auto shifted = shift_periodic(f.values(), f.torus(), f.velocity(), dt);
    repair_positivity(shifted, f.torus(), f.velocity());
    return DistributionField(f.torus(), f.velocity(), std::move(shifted));
}

}  // namespace bnk
