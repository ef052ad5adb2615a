#include "bnk/polylog.hpp"

#include <cmath>
#include <limits>

#include "bnk/error.hpp"

namespace bnk {

double zeta(double s) { return std::riemann_zeta(s); }

double polylog_exp(double s, double w) {
    if (!(w <= 0.0)) throw DomainError("polylog_exp: argument e^w must not exceed 1");
    if (w == 0.0) return s > 1.0 ? zeta(s) : std::numeric_limits<double>::infinity();
    const double z = std::exp(w);
    if (z <= 0.5) {
        double sum = 0.0, zk = z;
        for (int k = 1; k < 400; ++k) {
            const double term = zk / std::pow(static_cast<double>(k), s);
            sum += term;
            if (term < 1e-18 * sum) break;
            zk *= z;
        }
        return sum;
    }
    double sum = std::tgamma(1.0 - s) * std::pow(-w, s - 1.0);
    double wk = 1.0;  // w^k / k!
    for (int k = 0; k < 60; ++k) {
        const double term = zeta(s - k) * wk;
        sum += term;
        if (k > 2 && std::abs(term) < 1e-18 * std::abs(sum)) break;
        wk *= w / (k + 1);
    }
    return sum;
}

}  // namespace bnk
