#include "bnk/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bnk/error.hpp"

namespace bnk {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();
}  // namespace

double TheoryConstants::c() const { return 4.0 * pi * b0; }
double TheoryConstants::c3() const { return 256.0 * pi * b0; }
double TheoryConstants::c_tilde(double alpha) const { return 4.0 * pi * b0 * beta() / (alpha * alpha); }
double TheoryConstants::c_bar() const { return 256.0 * pi * b0 * beta(); }
double TheoryConstants::stability_rate() const { return c3() * l1_bound() * std::ldexp(1.0, 2 * L); }

void TheoryConstants::validate() const {
    if (!(c0 >= 0.0) || !std::isfinite(c0)) throw ValidationError("theory: c0 must be finite and >= 0");
    if (!(b0 >= 0.0)) throw ValidationError("theory: b0 must be >= 0");
    if (!(gamma > 0.0 && gamma < 0.5)) throw ValidationError("theory: gamma must lie in (0, 1/2)");
    if (L < 0) throw ValidationError("theory: L must be >= 0");
    if (!(beta() > 0.0)) throw ValidationError("theory: beta_max must be > 0");
    if (!(m2_bound() >= 0.0) || !(l1_bound() >= 0.0)) throw ValidationError("theory: c1, c2 must be >= 0");
}

double initial_moment_bound(const DistributionField& f0) {
    const auto& vg = f0.velocity();
    double sum = 0.0;
    for (std::size_t c = 0; c < vg.size(); ++c) {
        double sup = 0.0;
        for (std::size_t x = 0; x < f0.torus().size(); ++x) sup = std::max(sup, f0.at(x, c));
        sum += (1.0 + norm2(vg.velocity(c))) * sup;
    }
    return sum * vg.cell_volume();
}

int density_exponent(const DistributionField& f0) {
    const double m = f0.linf();
    int L = 0;
    while (std::ldexp(1.0, L) < m) ++L;
    return L;
}

GuaranteedWindows guaranteed_window(const TheoryConstants& tc, std::optional<double> alpha) {
    tc.validate();
    GuaranteedWindows w;
    const bool has_alpha = alpha.has_value() && *alpha > 0.0;
    if (tc.b0 == 0.0 || tc.c0 == 0.0) {
        w.t_uniform = inf;
        w.t_m2 = inf;
        if (has_alpha) {
            w.t_alpha = inf;
            w.t_m1 = inf;
        }
        return w;
    }
    const double c0 = tc.c0;
    w.t_uniform = std::min(1.0 / (pi * c0 * std::ldexp(1.0, 2 * tc.L + 6)), 1.0 / (tc.c_bar() * tc.m2_bound()));
    w.t_m2 = 1.0 / (c0 * tc.c3() * std::ldexp(1.0, 2 * tc.L + 2));
    if (has_alpha) {
        const double a = *alpha;
        w.t_m1 = a * a / (4.0 * c0 * tc.c());
        w.t_alpha = std::min(*w.t_m1, std::log(3.0) / (2.0 * c0 * tc.c_tilde(a)));
    }
    return w;
}

}  // namespace bnk
