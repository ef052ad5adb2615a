#include <algorithm>
#include <array>
#include <cmath>

#include "bnk/collision_operator.hpp"
#include "bnk/error.hpp"

namespace bnk {

namespace {

using Vec5 = std::array<double, 5>;
using Mat5 = std::array<Vec5, 5>;

Vec5 basis(Velocity3 v, double scale) {
    return {1.0, v.x / scale, v.y / scale, v.z / scale, norm2(v) / (scale * scale)};
}

// Cholesky solve of the SPD Gram system; degenerate pivots are reported.
Vec5 solve_gram(Mat5 a, Vec5 b) {
    double max_diag = 0.0;
    for (int i = 0; i < 5; ++i) max_diag = std::max(max_diag, a[i][i]);
    if (!(max_diag > 0.0)) throw NumericalFailure("conservative_projection: degenerate Gram matrix (no support)");
    for (int j = 0; j < 5; ++j) {
        double d = a[j][j];
        for (int k = 0; k < j; ++k) d -= a[j][k] * a[j][k];
        if (!(d > 1e-12 * max_diag)) {
            throw NumericalFailure("conservative_projection: degenerate Gram matrix (rank < 5)");
        }
        a[j][j] = std::sqrt(d);
        for (int i = j + 1; i < 5; ++i) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
            a[i][j] = s / a[j][j];
        }
    }
    for (int i = 0; i < 5; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= a[i][k] * b[k];
        b[i] = s / a[i][i];
    }
    for (int i = 4; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < 5; ++k) s -= a[k][i] * b[k];
        b[i] = s / a[i][i];
    }
    return b;
}

}  // namespace

ConservationSums conservation_sums(std::span<const double> slice, const VelocityGrid& grid) {
    ConservationSums s{};
    for (std::size_t c = 0; c < slice.size(); ++c) {
        const Velocity3 v = grid.velocity(c);
        s[0] += slice[c];
        s[1] += slice[c] * v.x;
        s[2] += slice[c] * v.y;
        s[3] += slice[c] * v.z;
        s[4] += slice[c] * norm2(v);
    }
    for (double& x : s) x *= grid.cell_volume();
    return s;
}

ConservationSums conservation_scales(std::span<const double> slice, const VelocityGrid& grid) {
    ConservationSums s{};
    for (std::size_t c = 0; c < slice.size(); ++c) {
        const Velocity3 v = grid.velocity(c);
        const double a = std::abs(slice[c]);
        s[0] += a;
        s[1] += a * std::abs(v.x);
        s[2] += a * std::abs(v.y);
        s[3] += a * std::abs(v.z);
        s[4] += a * norm2(v);
    }
    for (double& x : s) x *= grid.cell_volume();
    return s;
}

void project_slice(std::span<double> inc, const VelocityGrid& grid, std::span<const double> metric) {
    const std::size_t n = inc.size();
    const bool weighted = !metric.empty();
    const double scale = grid.v_max();
    Mat5 gram{};
    for (std::size_t c = 0; c < n; ++c) {
        const double m = weighted ? metric[c] : 1.0;
        if (m == 0.0) continue;
        const Vec5 p = basis(grid.velocity(c), scale);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j <= i; ++j) gram[i][j] += m * p[i] * p[j];
    }
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) gram[i][j] = gram[j][i];

    // Second pass removes the rounding left by the first.
    for (int pass = 0; pass < 2; ++pass) {
        Vec5 rhs{};
        for (std::size_t c = 0; c < n; ++c) {
            const Vec5 p = basis(grid.velocity(c), scale);
            for (int i = 0; i < 5; ++i) rhs[i] += inc[c] * p[i];
        }
        const Vec5 lambda = solve_gram(gram, rhs);
        for (std::size_t c = 0; c < n; ++c) {
            const double m = weighted ? metric[c] : 1.0;
            if (m == 0.0) continue;
            const Vec5 p = basis(grid.velocity(c), scale);
            double corr = 0.0;
            for (int i = 0; i < 5; ++i) corr += p[i] * lambda[i];
            inc[c] -= m * corr;
        }
    }
}

CollisionIncrement conservative_projection(const CollisionIncrement& inc, const VelocityGrid& grid) {
    return conservative_projection(inc, grid, {});
}

CollisionIncrement conservative_projection(const CollisionIncrement& inc, const VelocityGrid& grid,
                                           std::span<const double> metric) {
    if (!(inc.velocity == grid)) throw ContractViolation("conservative_projection: grid mismatch");
    if (!metric.empty() && metric.size() != inc.values.size()) {
        throw ContractViolation("conservative_projection: metric size mismatch");
    }
    for (double x : inc.values) {
        if (!std::isfinite(x)) throw ContractViolation("conservative_projection: non-finite increment");
    }
    CollisionIncrement out = inc;
    const std::size_t nv = grid.size();
    for (std::size_t x = 0; x < inc.torus.size(); ++x) {
        project_slice(out.slice(x), grid,
                      metric.empty() ? std::span<const double>{} : metric.subspan(x * nv, nv));
    }
    return out;
}

}  // namespace bnk
