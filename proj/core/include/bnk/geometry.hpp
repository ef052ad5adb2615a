#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace bnk {

struct Velocity3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Velocity3& operator+=(Velocity3 o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Velocity3& operator-=(Velocity3 o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    friend constexpr Velocity3 operator+(Velocity3 a, Velocity3 b) { return a += b; }
    friend constexpr Velocity3 operator-(Velocity3 a, Velocity3 b) { return a -= b; }
    friend constexpr Velocity3 operator-(Velocity3 a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Velocity3 operator*(double s, Velocity3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend constexpr Velocity3 operator*(Velocity3 a, double s) { return s * a; }
    friend constexpr Velocity3 operator/(Velocity3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
    friend constexpr bool operator==(Velocity3, Velocity3) = default;
};

constexpr double dot(Velocity3 a, Velocity3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr double norm2(Velocity3 a) { return dot(a, a); }
inline double norm(Velocity3 a) { return std::sqrt(norm2(a)); }
inline bool is_finite(Velocity3 a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Direction on S^2. Unit length is checked where it matters (post_collision),
// so that callers can still hand over a raw triple and get a contract error.
struct UnitNormal {
    double nx = 0.0;
    double ny = 0.0;
    double nz = 1.0;

    static constexpr double tolerance = 1e-12;

    constexpr Velocity3 vec() const { return {nx, ny, nz}; }
    bool is_unit() const { return std::abs(norm2(vec()) - 1.0) <= tolerance; }
    constexpr UnitNormal operator-() const { return {-nx, -ny, -nz}; }

    // Throws ContractViolation for a zero vector.
    static UnitNormal normalized(Velocity3 d);
};

struct CollisionPair {
    Velocity3 v;
    Velocity3 vstar;
};

// (v', v'_*) = (v - ((v-v_*).n) n, v_* + ((v-v_*).n) n). Throws ContractViolation
// when n is not unit within UnitNormal::tolerance.
CollisionPair post_collision(Velocity3 v, Velocity3 vstar, UnitNormal n);

namespace detail {
// Unchecked reflection used in the operator's inner loops.
inline void reflect_pair(const Velocity3& v, const Velocity3& vstar, const Velocity3& n,
                         Velocity3& vp, Velocity3& vps) {
    // dividing by |n|^2 keeps the reflection energy-exact when n is unit only to an ulp
    const double n2 = std::fma(n.x, n.x, std::fma(n.y, n.y, n.z * n.z));
    const double s = std::fma(v.x - vstar.x, n.x, std::fma(v.y - vstar.y, n.y, (v.z - vstar.z) * n.z)) / n2;
    vp = {std::fma(-s, n.x, v.x), std::fma(-s, n.y, v.y), std::fma(-s, n.z, v.z)};
    vps = {std::fma(s, n.x, vstar.x), std::fma(s, n.y, vstar.y), std::fma(s, n.z, vstar.z)};
}
}  // namespace detail

enum class KernelForm { constant, table };

/// Tabulated kernel B(|v - v_*|, cos(theta)), bilinear in both arguments and
/// clamped to the table range. Values are rows of `speeds`, columns of `cosines`.
struct KernelTable {
    std::vector<double> speeds;
    std::vector<double> cosines;
    std::vector<double> values;

    double at(double speed, double cosine) const;
};

/// Collision kernel satisfying 0 <= B <= b0 and B = 0 on the two angular
/// cutoff bands |cos| < gamma and |1 - cos| < gamma.
struct KernelSpec {
    double b0 = 1.0;
    double gamma = 0.1;
    KernelForm form = KernelForm::constant;
    std::optional<KernelTable> table;

    /// Throws ValidationError when b0 < 0, gamma is outside (0, 1/2), or the
    /// table is malformed or has entries outside [0, b0].
    void validate() const;

    bool in_cutoff(double cosine) const {
        return std::abs(cosine) < gamma || std::abs(1.0 - cosine) < gamma;
    }

    /// Kernel value as a function of relative speed and cos(theta).
    double value(double speed, double cosine) const {
        if (in_cutoff(cosine)) return 0.0;
        if (form == KernelForm::constant) return b0;
        return table->at(speed, cosine);
    }
};

// Zero for coincident velocities.
double kernel_eval(const KernelSpec& k, Velocity3 v, Velocity3 vstar, UnitNormal n);

// Indicator of |v|^2 + |v_*|^2 <= 1/alpha^2. alpha == 0 is the unregularized
// operator and returns 1; alpha outside [0, 1] is a contract violation.
int energy_cutoff_chi(double alpha, Velocity3 v, Velocity3 vstar);

}  // namespace bnk
