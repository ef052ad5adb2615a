#include "bnk/studies.hpp"

#include <algorithm>
#include <cmath>

#include "bnk/error.hpp"

namespace bnk {

double l1_distance(const DistributionField& f, const DistributionField& g) {
    if (!(f.velocity() == g.velocity()) || !(f.torus() == g.torus())) {
        throw ContractViolation("l1_distance: fields on different grids");
    }
    const auto a = f.values();
    const auto b = g.values();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s * f.velocity().cell_volume() * f.torus().cell_volume();
}

double l1_norm(const DistributionField& f) {
    double s = 0.0;
    for (double x : f.values()) s += std::abs(x);
    return s * f.velocity().cell_volume() * f.torus().cell_volume();
}

namespace {

long long step_count(const SolverConfig& cfg) {
    if (!(cfg.t_end > 0.0)) return 0;
    return static_cast<long long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
}

double step_time(const SolverConfig& cfg, long long k, long long n) {
    return k == n ? cfg.t_end : static_cast<double>(k) * cfg.dt;
}

}  // namespace

AlphaCauchyResult alpha_cauchy_study(const DistributionField& f0, const std::vector<double>& alphas,
                                     const SolverConfig& cfg) {
    if (alphas.size() < 2) throw ContractViolation("alpha_cauchy_study: needs at least two alphas");
    for (std::size_t i = 1; i < alphas.size(); ++i) {
        if (alphas[i] > alphas[i - 1]) throw ContractViolation("alpha_cauchy_study: alpha list must descend");
    }
    std::vector<Solver> solvers;
    std::vector<RunState> states;
    for (double a : alphas) {
        SolverConfig c = cfg;
        c.alpha = a;
        solvers.emplace_back(c, f0.velocity());
        RunState s;
        s.field = f0;
        states.push_back(std::move(s));
    }
    AlphaCauchyResult r;
    for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
        AlphaPair p;
        p.alpha_i = alphas[i];
        p.alpha_j = alphas[i + 1];
        p.forcing = std::abs(p.alpha_i - p.alpha_j) + p.alpha_i * p.alpha_i;
        r.pairs.push_back(p);
    }
    r.times.push_back(0.0);
    const long long n = step_count(cfg);
    for (long long k = 1; k <= n && r.complete; ++k) {
        const double t = step_time(cfg, k, n);
        for (std::size_t m = 0; m < solvers.size(); ++m) {
            try {
                solvers[m].picard_advance(states[m], t - states[m].time);
                states[m].time = t;
            } catch (const NumericalFailure& e) {
                r.complete = false;
                r.message = "alpha = " + std::to_string(alphas[m]) + ": " + e.what();
                break;
            }
        }
        if (!r.complete) break;
        r.times.push_back(t);
        for (std::size_t i = 0; i < r.pairs.size(); ++i) {
            r.pairs[i].distance = std::max(r.pairs[i].distance, l1_distance(states[i].field, states[i + 1].field));
        }
    }
    r.monotone = true;
    for (std::size_t i = 1; i < r.pairs.size(); ++i) {
        if (!(r.pairs[i].distance < r.pairs[i - 1].distance)) r.monotone = false;
    }
    for (const AlphaPair& p : r.pairs) {
        if (p.forcing > 0.0) r.fitted_constant = std::max(r.fitted_constant, p.distance / p.forcing);
    }
    return r;
}

StabilityResult stability_study(const DistributionField& f0a, const DistributionField& f0b, const SolverConfig& cfg,
                                const TheoryConstants& tc) {
    const Solver solver(cfg, f0a.velocity());
    RunState a, b;
    a.field = f0a;
    b.field = f0b;
    StabilityResult r;
    r.theory_rate = tc.stability_rate();
    const double d0 = l1_distance(f0a, f0b);
    r.identical = d0 == 0.0;
    auto log_point = [&](double t) {
        const double d = l1_distance(a.field, b.field);
        r.times.push_back(t);
        r.distance.push_back(d);
        r.envelope.push_back(std::exp(r.theory_rate * t));
        if (!r.identical) r.ratio.push_back(d / d0);
    };
    log_point(0.0);
    const long long n = step_count(cfg);
    for (long long k = 1; k <= n; ++k) {
        const double t = step_time(cfg, k, n);
        try {
            solver.picard_advance(a, t - a.time);
            solver.picard_advance(b, t - b.time);
            a.time = b.time = t;
        } catch (const NumericalFailure& e) {
            r.complete = false;
            r.message = e.what();
            break;
        }
        log_point(t);
    }
    if (r.identical) {
        r.pass = std::all_of(r.distance.begin(), r.distance.end(), [](double d) { return d == 0.0; });
        return r;
    }
    double num = 0.0, den = 0.0;
    r.pass = r.complete;
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        if (!(r.ratio[i] <= r.envelope[i])) r.pass = false;
        if (r.times[i] > 0.0 && r.ratio[i] > 0.0) {
            num += r.times[i] * std::log(r.ratio[i]);
            den += r.times[i] * r.times[i];
        }
    }
    r.fitted_rate = den > 0.0 ? num / den : 0.0;
    return r;
}

}  // namespace bnk
