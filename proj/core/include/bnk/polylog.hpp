#pragma once

namespace bnk {

/// Riemann zeta at the half-integers used by the Bose functions.
double zeta(double s);

/// Li_s(e^w) for w <= 0 and half-integer s in {1/2, 3/2, 5/2, ...}.
/// Power series for e^w <= 1/2, otherwise the expansion around w = 0,
///   Li_s(e^w) = Gamma(1 - s) (-w)^(s - 1) + sum_k zeta(s - k) w^k / k!.
/// Returns zeta(s) at w = 0 for s > 1 and +inf for s <= 1.
/// Throws DomainError for w > 0.
double polylog_exp(double s, double w);

}  // namespace bnk
