#include "bnk/geometry.hpp"

#include <algorithm>
#include <string>

#include "bnk/error.hpp"

namespace bnk {

UnitNormal UnitNormal::normalized(Velocity3 d) {
    const double len = norm(d);
    if (!(len > 0.0) || !std::isfinite(len)) {
        throw ContractViolation("UnitNormal::normalized: zero or non-finite direction");
    }
    return {d.x / len, d.y / len, d.z / len};
}

CollisionPair post_collision(Velocity3 v, Velocity3 vstar, UnitNormal n) {
    if (!n.is_unit()) {
        throw ContractViolation("post_collision: |n|^2 = " + std::to_string(norm2(n.vec())) +
                                " is not 1 within 1e-12");
    }
    CollisionPair out;
    detail::reflect_pair(v, vstar, n.vec(), out.v, out.vstar);
    return out;
}

namespace {

// Index i with grid[i] <= x <= grid[i+1] and the fractional position, clamped.
std::pair<std::size_t, double> bracket(const std::vector<double>& grid, double x) {
    if (grid.size() == 1) return {0, 0.0};
    if (x <= grid.front()) return {0, 0.0};
    if (x >= grid.back()) return {grid.size() - 2, 1.0};
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    return {i, (x - grid[i]) / (grid[i + 1] - grid[i])};
}

}  // namespace

double KernelTable::at(double speed, double cosine) const {
    const auto [i, s] = bracket(speeds, speed);
    const auto [j, c] = bracket(cosines, cosine);
    const std::size_t nc = cosines.size();
    const std::size_t i1 = speeds.size() > 1 ? i + 1 : i;
    const std::size_t j1 = nc > 1 ? j + 1 : j;
    const double v00 = values[i * nc + j];
    const double v01 = values[i * nc + j1];
    const double v10 = values[i1 * nc + j];
    const double v11 = values[i1 * nc + j1];
    return (1.0 - s) * ((1.0 - c) * v00 + c * v01) + s * ((1.0 - c) * v10 + c * v11);
}

void KernelSpec::validate() const {
    if (!(b0 >= 0.0) || !std::isfinite(b0)) throw ValidationError("kernel: b0 must be finite and >= 0");
    if (!(gamma > 0.0 && gamma < 0.5)) throw ValidationError("kernel: gamma must lie in (0, 1/2)");
    if (form == KernelForm::constant) return;
    if (!table) throw ValidationError("kernel: table form requires a table");
    const auto& t = *table;
    if (t.speeds.empty() || t.cosines.empty() || t.values.size() != t.speeds.size() * t.cosines.size()) {
        throw ValidationError("kernel: table shape does not match speeds x cosines");
    }
    if (!std::is_sorted(t.speeds.begin(), t.speeds.end()) ||
        !std::is_sorted(t.cosines.begin(), t.cosines.end())) {
        throw ValidationError("kernel: table axes must be increasing");
    }
    for (double b : t.values) {
        if (!(b >= 0.0 && b <= b0)) throw ValidationError("kernel: table value outside [0, b0]");
    }
}

double kernel_eval(const KernelSpec& k, Velocity3 v, Velocity3 vstar, UnitNormal n) {
    const Velocity3 g = v - vstar;
    const double speed = norm(g);
    if (speed == 0.0) return 0.0;
    const double cosine = std::clamp(dot(g, n.vec()) / speed, -1.0, 1.0);
    return k.value(speed, cosine);
}

int energy_cutoff_chi(double alpha, Velocity3 v, Velocity3 vstar) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ContractViolation("energy_cutoff_chi: alpha must lie in [0, 1]");
    if (alpha == 0.0) return 1;
    return norm2(v) + norm2(vstar) <= 1.0 / (alpha * alpha) ? 1 : 0;
}

}  // namespace bnk
