#pragma once

#include <optional>

#include "bnk/phase_grid.hpp"

namespace bnk {

/// Constants of the local existence theory, computed from the initial data
/// bound c0 = int (1 + |v|^2) sup_x f0 dv, the kernel scale B0 and the
/// density exponent L (f0 <= 2^L).
struct TheoryConstants {
    double c0 = 0.0;
    double b0 = 1.0;
    double gamma = 0.1;
    int L = 0;
    std::optional<double> beta_max;  ///< Jacobian bound; default gamma^-2
    std::optional<double> c1;        ///< default 2 c0
    std::optional<double> c2;        ///< default 2 c0

    double beta() const { return beta_max.value_or(1.0 / (gamma * gamma)); }
    double m2_bound() const { return c1.value_or(2.0 * c0); }
    double l1_bound() const { return c2.value_or(2.0 * c0); }

    double c() const;                   ///< 4 pi B0
    double c3() const;                  ///< 2^8 pi B0
    double c_tilde(double alpha) const;  ///< 4 pi B0 beta / alpha^2
    double c_bar() const;               ///< 2^8 pi B0 beta

    /// Exponential rate c3 c2 2^{2L} bounding L1 growth of differences.
    double stability_rate() const;

    void validate() const;
};

/// c0 for a field: sum_v (1 + |v|^2) max_x f(x, v) dv^3.
double initial_moment_bound(const DistributionField& f0);

/// Smallest L >= 0 with ||f||_inf <= 2^L.
int density_exponent(const DistributionField& f0);

struct GuaranteedWindows {
    double t_uniform = 0.0;            ///< min(1/(pi c0 2^{2L+6}), 1/(c_bar c1))
    std::optional<double> t_alpha;     ///< min(alpha^2/(4 c0 c), ln 3/(2 c0 c_tilde))
    std::optional<double> t_m1;        ///< alpha^2/(4 c0 c)
    double t_m2 = 0.0;                 ///< 1/(c0 c3 2^{2L+2})
};

/// The four windows; B0 = 0 or c0 = 0 makes every window +inf. The
/// alpha-dependent entries stay empty without alpha, or for alpha = 0.
GuaranteedWindows guaranteed_window(const TheoryConstants& tc, std::optional<double> alpha = std::nullopt);

}  // namespace bnk
