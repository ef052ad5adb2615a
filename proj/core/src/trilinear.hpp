#pragma once

#include <cmath>

#include "bnk/geometry.hpp"

namespace bnk::detail {

// Locates x on the cell-centred axis of n nodes. Returns false outside
// [-v_max, v_max]; inside it yields the lower node and the fraction, with
// boundary half-cells clamped onto the outermost node.
inline bool locate_axis(double x, int n, double v_max, double inv_dv, int& i0, double& t) {
    const double u = (x + v_max) * inv_dv - 0.5;
    if (!(u >= -0.5 && u <= n - 0.5)) return false;
    if (u <= 0.0) {
        i0 = 0;
        t = 0.0;
        return true;
    }
    if (u >= n - 1) {
        i0 = n - 2;
        t = 1.0;
        return true;
    }
    i0 = static_cast<int>(u);
    t = u - i0;
    // Snap queries that sit on a node up to rounding.
    if (t < 1e-12) {
        t = 0.0;
    } else if (t > 1.0 - 1e-12) {
        t = 1.0;
    }
    if (i0 > n - 2) {
        i0 = n - 2;
        t = 1.0;
    }
    return true;
}

struct TrilinearSampler {
    const double* data;
    int n;
    double v_max;
    double inv_dv;

    double operator()(const Velocity3& v) const {
        int i, j, k;
        double tx, ty, tz;
        if (!locate_axis(v.x, n, v_max, inv_dv, i, tx)) return 0.0;
        if (!locate_axis(v.y, n, v_max, inv_dv, j, ty)) return 0.0;
        if (!locate_axis(v.z, n, v_max, inv_dv, k, tz)) return 0.0;
        const std::size_t nn = static_cast<std::size_t>(n) * n;
        const double* p = data + (static_cast<std::size_t>(i) * n + j) * n + k;
        const double c00 = p[0] + tz * (p[1] - p[0]);
        const double c01 = p[n] + tz * (p[n + 1] - p[n]);
        const double c10 = p[nn] + tz * (p[nn + 1] - p[nn]);
        const double c11 = p[nn + n] + tz * (p[nn + n + 1] - p[nn + n]);
        const double c0 = c00 + ty * (c01 - c00);
        const double c1 = c10 + ty * (c11 - c10);
        return c0 + tx * (c1 - c0);
    }
};

}  // namespace bnk::detail
