#include "bnk/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "bnk/error.hpp"

namespace bnk {

SphereQuadrature SphereRule::build() const {
    return kind == lebedev ? lebedev26() : build_sphere_quadrature(order);
}

Regularization SolverConfig::regularization() const {
    return alpha == 0.0 ? Regularization::bosonic() : Regularization::regularized(alpha);
}

void SolverConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("solver.alpha must lie in [0, 1]");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("solver.dt must be > 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("solver.t_end must be >= 0");
    if (!(fp_tol > 0.0)) throw ValidationError("solver.fp_tol must be > 0");
    if (fp_max_iter < 1) throw ValidationError("solver.fp_max_iter must be >= 1");
    if (max_halvings < 0) throw ValidationError("solver.max_halvings must be >= 0");
    if (L < 0) throw ValidationError("solver.L must be >= 0");
    if (!(ceiling() > L) || !std::isfinite(ceiling())) throw ValidationError("solver.ceiling_exponent must exceed L");
    if (output_every < 1) throw ValidationError("output.every must be >= 1");
    if (sphere.kind == SphereRule::product && sphere.order < 1) {
        throw ValidationError("kernel.sphere_order must be >= 1");
    }
    kernel.validate();
}

const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::blow_up: return "blow_up";
        case RunStatus::dt_underflow: return "dt_underflow";
        case RunStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

struct Solver::Attempt {
    std::vector<double> g;
    std::vector<double> raw;  // converged iterate before projection
    std::vector<double> start;
    int iters = 0;
    double residual = 0.0;
    double first_change = 0.0;
    double projection_norm = 0.0;
    const char* failure = "";
};

Solver::Solver(SolverConfig cfg, const VelocityGrid& grid)
    : cfg_(std::move(cfg)), op_(grid, cfg_.kernel, cfg_.sphere.build(), cfg_.regularization()) {
    cfg_.validate();
}

namespace {

std::string fmt_g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

void duhamel(std::span<const double> start, const CollisionTerms& t, const std::vector<double>* gain0,
             const std::vector<double>* rate0, double dt, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        double lam = t.rate[i];
        double gain = t.gain[i];
        if (gain0 != nullptr) {
            lam = 0.5 * (lam + (*rate0)[i]);
            gain = 0.5 * (gain + (*gain0)[i]);
        }
        const double e = lam * dt;
        const double weight = e > 0.0 ? -std::expm1(-e) / lam : dt;
        out[i] = start[i] * std::exp(-e) + gain * weight;
    }
}

DistributionField wrap(const DistributionField& like, const std::vector<double>& v) {
    DistributionField f(like.torus(), like.velocity());
    std::copy(v.begin(), v.end(), f.values().begin());
    return f;
}

}  // namespace

DistributionField Solver::fixed_point_map(const DistributionField& iterate, const DistributionField& start,
                                          double dt) const {
    const DistributionField shifted = transport_shift(start, dt);
    const CollisionTerms t = op_.terms(iterate);
    std::vector<double> out(shifted.size());
    if (cfg_.scheme == TimeScheme::trapezoid) {
        CollisionTerms t0 = op_.terms(start);
        auto g0 = shift_periodic(t0.gain, start.torus(), start.velocity(), dt);
        auto r0 = shift_periodic(t0.rate, start.torus(), start.velocity(), dt);
        for (double& x : g0) x = std::max(x, 0.0);
        for (double& x : r0) x = std::max(x, 0.0);
        duhamel(shifted.values(), t, &g0, &r0, dt, out);
    } else {
        duhamel(shifted.values(), t, nullptr, nullptr, dt, out);
    }
    return wrap(start, out);
}

bool Solver::try_step(const DistributionField& f, double dt, const std::vector<double>* guess,
                      Attempt& out) const {
    const DistributionField start = transport_shift(f, dt);
    const auto s = start.values();
    const TorusGrid& torus = f.torus();
    const VelocityGrid& vgrid = f.velocity();

    std::vector<double> gain0, rate0;
    const bool trap = cfg_.scheme == TimeScheme::trapezoid;
    if (trap) {
        CollisionTerms t0 = op_.terms(f);
        gain0 = shift_periodic(t0.gain, torus, vgrid, dt);
        rate0 = shift_periodic(t0.rate, torus, vgrid, dt);
        for (double& x : gain0) x = std::max(x, 0.0);
        for (double& x : rate0) x = std::max(x, 0.0);
    }

    DistributionField iterate = start;
    if (guess != nullptr && guess->size() == s.size()) {
        auto it0 = iterate.values();
        for (std::size_t i = 0; i < s.size(); ++i) it0[i] = std::max(0.0, s[i] + dt * (*guess)[i]);
    }
    std::vector<double> next(s.size());
    bool converged = false;
    out.iters = 0;
    for (int it = 0; it < cfg_.fp_max_iter; ++it) {
        const CollisionTerms t = op_.terms(iterate);
        duhamel(s, t, trap ? &gain0 : nullptr, trap ? &rate0 : nullptr, dt, next);
        auto cur = iterate.values();
        double change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            if (!std::isfinite(next[i])) throw NumericalFailure("non-finite density in fixed-point iteration");
            change = std::max(change, std::abs(next[i] - cur[i]));
        }
        std::copy(next.begin(), next.end(), cur.begin());
        out.iters = it + 1;
        out.residual = change;
        if (it == 0) out.first_change = change;
        if (change < cfg_.fp_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        out.failure = "fixed-point iteration did not converge";
        return false;
    }

    auto g = iterate.values();
    out.raw.assign(g.begin(), g.end());
    out.projection_norm = 0.0;
    if (cfg_.projection) {
        const std::size_t nv = vgrid.size();
        std::vector<double> delta(nv);
        double corr_sum = 0.0;
        for (std::size_t x = 0; x < torus.size(); ++x) {
            const auto gs = g.subspan(x * nv, nv);
            const auto ss = s.subspan(x * nv, nv);
            bool any = false;
            for (std::size_t c = 0; c < nv; ++c) {
                delta[c] = gs[c] - ss[c];
                any = any || delta[c] != 0.0;
            }
            if (!any) continue;
            std::vector<double> projected = delta;
            try {
                project_slice(projected, vgrid, gs);
            } catch (const NumericalFailure&) {
                projected = delta;
                project_slice(projected, vgrid);
            }
            for (std::size_t c = 0; c < nv; ++c) {
                const double corr = delta[c] - projected[c];
                corr_sum += std::abs(corr);
                gs[c] -= corr;
                if (gs[c] < 0.0) {
                    out.failure = "conservative projection produced a negative density";
                    return false;
                }
            }
        }
        out.projection_norm = corr_sum * vgrid.cell_volume() * torus.cell_volume();
    }
    out.g.assign(g.begin(), g.end());
    out.start.assign(s.begin(), s.end());
    return true;
}

void Solver::advance(DistributionField& f, double dt, int depth, const std::vector<double>* guess, StepInfo& info,
                     std::vector<double>* rate_out) const {
    Attempt a;
    if (try_step(f, dt, guess, a)) {
        std::copy(a.g.begin(), a.g.end(), f.values().begin());
        if (info.fp_iters == 0) info.first_change = a.first_change;
        info.fp_iters += a.iters;
        info.fp_residual = std::max(info.fp_residual, a.residual);
        info.projection_norm += a.projection_norm;
        if (rate_out != nullptr) {
            rate_out->resize(a.g.size());
            for (std::size_t i = 0; i < a.g.size(); ++i) (*rate_out)[i] = (a.raw[i] - a.start[i]) / dt;
        }
        return;
    }
    if (depth >= cfg_.max_halvings) {
        throw StepUnderflow(std::string(a.failure) + " after " + std::to_string(depth) + " halvings (dt = " +
                            std::to_string(dt) + ", residual " + std::to_string(a.residual) + ")");
    }
    ++info.halvings;
    advance(f, 0.5 * dt, depth + 1, nullptr, info, nullptr);
    advance(f, 0.5 * dt, depth + 1, nullptr, info, nullptr);
    if (rate_out != nullptr) rate_out->clear();
}

StepInfo Solver::picard_advance(RunState& state, double dt) const {
    if (!(state.field.velocity() == op_.grid())) throw ContractViolation("picard_advance: grid mismatch");
    StepInfo info;
    DistributionField f = state.field;
    const bool use_guess = cfg_.predictor && !state.last_rate.empty();
    std::vector<double> rate;
    advance(f, dt, 0, use_guess ? &state.last_rate : nullptr, info, &rate);
    state.field = std::move(f);
    state.last_rate = std::move(rate);
    state.time += dt;
    return info;
}

RunResult Solver::run(const DistributionField& f0) const {
    if (!(f0.velocity() == op_.grid())) throw ContractViolation("run: initial field on a different velocity grid");
    f0.check();
    const double bound = std::ldexp(1.0, cfg_.L);
    if (f0.linf() > bound) {
        throw ValidationError("initial data exceeds 2^L: ||f0||_inf = " + std::to_string(f0.linf()) +
                              " > 2^" + std::to_string(cfg_.L) + " (key solver.L)");
    }
    const double ceiling = std::exp2(cfg_.ceiling());
    const VelocityGrid& vg = f0.velocity();
    const std::size_t nv = vg.size();

    RunResult r;
    r.state.field = f0;
    r.state.threshold = bound;
    r.thresholds.push_back(bound);

    std::vector<double> env(nv, 0.0), weight2(nv);
    for (std::size_t c = 0; c < nv; ++c) weight2[c] = 1.0 + norm2(vg.velocity(c));
    auto sample_envelope = [&](const DistributionField& f, double t) {
        for (std::size_t x = 0; x < f.torus().size(); ++x) {
            const auto s = f.slice(x);
            for (std::size_t c = 0; c < nv; ++c) env[c] = std::max(env[c], s[c]);
        }
        EnvelopeSample e{t, 0.0, 0.0};
        for (std::size_t c = 0; c < nv; ++c) {
            e.m1 += env[c];
            e.m2 += weight2[c] * env[c];
        }
        e.m1 *= vg.cell_volume();
        e.m2 *= vg.cell_volume();
        r.envelope.push_back(e);
    };
    auto record = [&](const StepInfo* info) {
        StepRecord rec;
        rec.moments = compute_moments(r.state.field, r.state.time);
        rec.window = r.state.window;
        if (info != nullptr) {
            rec.fp_iters = info->fp_iters;
            rec.fp_residual = info->fp_residual;
            rec.projection_norm = info->projection_norm;
        }
        r.history.push_back(rec);
    };

    sample_envelope(f0, 0.0);
    record(nullptr);

    long long nsteps = 0;
    if (cfg_.t_end > 0.0) nsteps = static_cast<long long>(std::ceil(cfg_.t_end / cfg_.dt - 1e-9));
    for (long long k = 1; k <= nsteps; ++k) {
        const double t_next = k == nsteps ? cfg_.t_end : static_cast<double>(k) * cfg_.dt;
        const double h = t_next - r.state.time;
        StepInfo info;
        try {
            RunState next = r.state;
            info = picard_advance(next, h);
            next.time = t_next;
            r.state = std::move(next);
        } catch (const StepUnderflow& e) {
            r.status = RunStatus::dt_underflow;
            r.message = e.what();
            break;
        } catch (const NumericalFailure& e) {
            r.status = RunStatus::numerical_failure;
            r.message = e.what();
            break;
        }
        ++r.steps;
        sample_envelope(r.state.field, r.state.time);
        const double linf = r.state.field.linf();
        while (linf > r.state.threshold) {
            ++r.state.window;
            r.state.threshold = std::ldexp(1.0, cfg_.L + 2 * r.state.window);
            r.thresholds.push_back(r.state.threshold);
        }
        const bool blown = linf > ceiling;
        if (blown || k % cfg_.output_every == 0 || k == nsteps) record(&info);
        if (blown) {
            r.status = RunStatus::blow_up;
            r.message = "||f||_inf = " + std::to_string(linf) + " exceeds the ceiling 2^" +
                        fmt_g(cfg_.ceiling()) + " at t = " + std::to_string(r.state.time);
            break;
        }
    }
    return r;
}

DistributionField fixed_point_map_C(const DistributionField& iterate, const DistributionField& start, double dt,
                                    const SolverConfig& cfg) {
    return Solver(cfg, start.velocity()).fixed_point_map(iterate, start, dt);
}

StepInfo picard_advance(RunState& state, const SolverConfig& cfg) {
    return Solver(cfg, state.field.velocity()).picard_advance(state, cfg.dt);
}

RunResult run(const SolverConfig& cfg, const DistributionField& f0) { return Solver(cfg, f0.velocity()).run(f0); }

namespace {

BoundCheck check_bound(const std::vector<EnvelopeSample>& env, double window, double bound, bool use_m1) {
    BoundCheck b;
    b.window = window;
    b.bound = bound;
    for (const EnvelopeSample& e : env) {
        if (e.time > window * (1.0 + 1e-12)) continue;
        b.worst = std::max(b.worst, use_m1 ? e.m1 : e.m2);
        ++b.samples;
    }
    b.margin = bound - b.worst;
    b.pass = b.samples > 0 && b.worst <= bound;
    return b;
}

}  // namespace

DensityBoundReport verify_density_bounds(const RunResult& r, const TheoryConstants& tc, double alpha) {
    const GuaranteedWindows w = guaranteed_window(tc, alpha);
    DensityBoundReport rep;
    const double bound = 2.0 * tc.c0;
    if (w.t_m1) rep.m1 = check_bound(r.envelope, *w.t_m1, bound, true);
    rep.m2 = check_bound(r.envelope, w.t_m2, bound, false);
    rep.pass = rep.m2.pass && (!rep.m1 || rep.m1->pass);
    return rep;
}

}  // namespace bnk
