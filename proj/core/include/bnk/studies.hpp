#pragma once

#include <string>
#include <vector>

#include "bnk/phase_grid.hpp"
#include "bnk/solver.hpp"
#include "bnk/theory.hpp"

namespace bnk {

/// sum |f - g| dv dx over the common grid.
double l1_distance(const DistributionField& f, const DistributionField& g);
double l1_norm(const DistributionField& f);

struct AlphaPair {
    double alpha_i = 0.0;  ///< larger of the two
    double alpha_j = 0.0;
    double distance = 0.0;  ///< max over recorded times of ||f_i - f_j||_L1
    double forcing = 0.0;   ///< |alpha_i - alpha_j| + alpha_i^2
};

struct AlphaCauchyResult {
    std::vector<AlphaPair> pairs;  ///< consecutive members of the alpha list
    std::vector<double> times;
    bool complete = true;  ///< false when a member run aborted
    std::string message;
    bool monotone = false;  ///< distances strictly decrease along the list
    double fitted_constant = 0.0;  ///< max distance / forcing
};

/// Runs every alpha of a descending list in lockstep from the same data
/// and compares consecutive members. cfg.alpha is ignored.
AlphaCauchyResult alpha_cauchy_study(const DistributionField& f0, const std::vector<double>& alphas,
                                     const SolverConfig& cfg);

struct StabilityResult {
    std::vector<double> times;
    std::vector<double> distance;  ///< ||f1 - f2||_L1 (t)
    std::vector<double> ratio;     ///< distance / initial distance; empty when identical
    std::vector<double> envelope;  ///< exp(rate * t)
    double theory_rate = 0.0;
    double fitted_rate = 0.0;  ///< least-squares slope of ln r(t) through the origin
    bool identical = false;    ///< initial distance was zero; ratio undefined
    bool complete = true;
    std::string message;
    bool pass = false;
};

StabilityResult stability_study(const DistributionField& f0a, const DistributionField& f0b, const SolverConfig& cfg,
                                const TheoryConstants& tc);

}  // namespace bnk
