#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bnk/collision_operator.hpp"
#include "bnk/equilibria.hpp"
#include "bnk/geometry.hpp"
#include "bnk/phase_grid.hpp"
#include "bnk/theory.hpp"

namespace bnk {

struct SphereRule {
    enum Kind { product, lebedev };
    Kind kind = product;
    int order = 3;  ///< product rule order; ignored for lebedev

    SphereQuadrature build() const;
};

/// How the collision coefficients are frozen over one step.
enum class TimeScheme {
    endpoint,   ///< gain and rate of the current Picard iterate (first order)
    trapezoid,  ///< average of the iterate's and the transported start values
};

struct SolverConfig {
    double alpha = 1.0;  ///< 0 selects the bosonic operator without cutoff
    KernelSpec kernel;
    SphereRule sphere;
    double dt = 1e-3;
    double t_end = 0.0;
    double fp_tol = 1e-10;
    int fp_max_iter = 50;
    int max_halvings = 8;
    int L = 0;                      ///< f0 <= 2^L
    std::optional<double> ceiling_exponent;  ///< hard ceiling 2^e, default L + 20
    bool projection = true;
    TimeScheme scheme = TimeScheme::endpoint;
    int output_every = 1;  ///< record every k-th accepted step
    /// Start each Picard iteration from the transported field plus the last
    /// step's collision increment instead of the transported field alone.
    bool predictor = true;

    Regularization regularization() const;
    double ceiling() const { return ceiling_exponent.value_or(L + 20.0); }
    /// Throws ValidationError naming the offending key.
    void validate() const;
};

/// State between steps. The active window n has threshold 2^{L+2n}.
struct RunState {
    double time = 0.0;
    DistributionField field;
    int window = 0;
    double threshold = 1.0;
    /// Collision part g - transport(f) of the last accepted step before
    /// projection, per unit time; empty when unknown.
    std::vector<double> last_rate;
};

struct StepRecord {
    Moments moments;
    int window = 0;
    int fp_iters = 0;
    double fp_residual = 0.0;
    double projection_norm = 0.0;  ///< L1 size of the conservation correction
};

/// sup over (s <= t, x) of f(s, x, v), reduced to M1 = int env dv and
/// M2 = int (1 + |v|^2) env dv.
struct EnvelopeSample {
    double time = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
};

enum class RunStatus { completed, blow_up, dt_underflow, numerical_failure };

const char* to_string(RunStatus s);

struct RunResult {
    RunStatus status = RunStatus::completed;
    std::string message;
    RunState state;                  ///< last accepted state
    std::vector<double> thresholds;  ///< 2^{L+2n} for n = 0 .. final window
    std::vector<StepRecord> history;
    std::vector<EnvelopeSample> envelope;
    int steps = 0;
};

/// Outcome of one accepted step.
struct StepInfo {
    int fp_iters = 0;
    double fp_residual = 0.0;
    double first_change = 0.0;  ///< sup-norm change of the first Picard sweep
    double projection_norm = 0.0;
    int halvings = 0;
};

class Solver {
  public:
    Solver(SolverConfig cfg, const VelocityGrid& grid);

    const SolverConfig& config() const { return cfg_; }
    const CollisionOperator& op() const { return op_; }

    /// One application of the fixed-point map: the Duhamel step from
    /// `start` over dt with coefficients frozen at `iterate`.
    DistributionField fixed_point_map(const DistributionField& iterate, const DistributionField& start,
                                      double dt) const;

    /// Picard iteration over one step of size dt, halving on non-convergence.
    /// Throws NumericalFailure on dt underflow.
    StepInfo picard_advance(RunState& state, double dt) const;

    RunResult run(const DistributionField& f0) const;

  private:
    struct Attempt;
    bool try_step(const DistributionField& f, double dt, const std::vector<double>* guess, Attempt& out) const;
    void advance(DistributionField& f, double dt, int depth, const std::vector<double>* guess, StepInfo& info,
                 std::vector<double>* rate_out) const;

    SolverConfig cfg_;
    CollisionOperator op_;
};

// Free-function forms.
DistributionField fixed_point_map_C(const DistributionField& iterate, const DistributionField& start, double dt,
                                    const SolverConfig& cfg);
StepInfo picard_advance(RunState& state, const SolverConfig& cfg);
RunResult run(const SolverConfig& cfg, const DistributionField& f0);

/// Checks M1 <= 2 c0 for t <= t_m1 and M2 <= 2 c0 for t <= t_m2.
struct BoundCheck {
    double window = 0.0;
    double bound = 0.0;
    double worst = 0.0;   ///< max of the moment over samples inside the window
    double margin = 0.0;  ///< bound - worst
    int samples = 0;
    bool pass = false;
};

struct DensityBoundReport {
    std::optional<BoundCheck> m1;  ///< empty when alpha = 0
    BoundCheck m2;
    bool pass = false;
};

DensityBoundReport verify_density_bounds(const RunResult& r, const TheoryConstants& tc, double alpha);

}  // namespace bnk
