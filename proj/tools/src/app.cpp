#include "app.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "bnk/cli_io.hpp"
#include "bnk/collision_operator.hpp"
#include "bnk/equilibria.hpp"
#include "bnk/error.hpp"
#include "bnk/solver.hpp"
#include "bnk/studies.hpp"
#include "bnk/theory.hpp"

namespace bnk::app {

namespace {

namespace fs = std::filesystem;

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Common {
    std::string config;
    std::map<std::string, std::string> flags;
};

void add_manifest_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config, "manifest file")->check(CLI::ExistingFile);
    for (const auto& [key, help] : manifest_keys()) cmd->add_option("--" + key, c.flags[key], help);
}

RunManifest resolve(const Common& c, const KeyValues& forced = {}) {
    KeyValues overrides;
    for (const auto& [k, v] : c.flags)
        if (!v.empty()) overrides[k] = v;
    for (const auto& [k, v] : forced)
        if (!overrides.count(k)) overrides[k] = v;
    std::optional<fs::path> path;
    if (!c.config.empty()) path = c.config;
    return load_manifest(path, overrides);
}

int exit_for(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return ok;
        case RunStatus::blow_up:
        case RunStatus::dt_underflow: return blow_up;
        case RunStatus::numerical_failure: return numerical;
    }
    return numerical;
}

void print_windows(const RunManifest& m, std::ostream& out) {
    const TheoryConstants& tc = m.theory;
    const double alpha = m.solver.alpha;
    const GuaranteedWindows w = guaranteed_window(tc, alpha);
    out << "constant      value\n";
    out << "c0            " << g6(tc.c0) << "\n";
    out << "B0            " << g6(tc.b0) << "\n";
    out << "gamma         " << g6(tc.gamma) << "\n";
    out << "L             " << tc.L << "\n";
    out << "beta_max      " << g6(tc.beta()) << (tc.beta_max ? "" : "  (default gamma^-2, heuristic)") << "\n";
    out << "c = 4 pi B0   " << g6(tc.c()) << "\n";
    out << "c3 = 2^8 pi B0 " << g6(tc.c3()) << "\n";
    out << "c_bar         " << g6(tc.c_bar()) << "  (depends on beta_max)\n";
    out << "c1            " << g6(tc.m2_bound()) << "\n";
    out << "c2            " << g6(tc.l1_bound()) << "\n";
    if (alpha > 0.0) out << "c_tilde       " << g6(tc.c_tilde(alpha)) << "  (alpha = " << g6(alpha) << ")\n";
    out << "window        value\n";
    out << "T_uniform     " << g6(w.t_uniform) << "  (heuristic: uses c_bar)\n";
    if (w.t_alpha) out << "T_alpha       " << g6(*w.t_alpha) << "  (heuristic: uses c_tilde)\n";
    if (w.t_m1) out << "t_M1          " << g6(*w.t_m1) << "\n";
    out << "t_M2          " << g6(w.t_m2) << "\n";
}

int cmd_single(const RunManifest& m, std::ostream& out) {
    const RunResult r = run(m.solver, m.f0);
    fs::create_directories(m.output.dir);
    emit_timeseries(r.history, m.output.dir / "timeseries.csv");
    {
        std::ofstream th(m.output.dir / "thresholds.csv");
        th << "window_n,threshold\n";
        for (std::size_t n = 0; n < r.thresholds.size(); ++n) th << n << ',' << g17(r.thresholds[n]) << '\n';
    }
    if (m.output.snapshot || r.status != RunStatus::completed) {
        emit_snapshot(r.state.field, r.state.time, m.output.dir / "final.bnkf");
    }
    out << "status " << to_string(r.status) << "\n";
    out << "steps " << r.steps << "  t = " << g6(r.state.time) << "  window_n = " << r.state.window << "\n";
    out << "thresholds";
    for (double t : r.thresholds) out << ' ' << g6(t);
    out << "\n";
    if (!r.message.empty()) out << "report: " << r.message << "\n";
    return exit_for(r.status);
}

int cmd_sweep(const RunManifest& m, std::ostream& out) {
    const AlphaCauchyResult r = alpha_cauchy_study(m.f0, m.study.alphas, m.solver);
    fs::create_directories(m.output.dir);
    std::ofstream csv(m.output.dir / "alpha_sweep.csv");
    csv << "alpha_i,alpha_j,distance,forcing,ratio\n";
    out << "alpha_i   alpha_j   distance      forcing   ratio\n";
    for (const AlphaPair& p : r.pairs) {
        const double ratio = p.forcing > 0.0 ? p.distance / p.forcing : 0.0;
        csv << g17(p.alpha_i) << ',' << g17(p.alpha_j) << ',' << g17(p.distance) << ',' << g17(p.forcing) << ','
            << g17(ratio) << '\n';
        out << g6(p.alpha_i) << "  " << g6(p.alpha_j) << "  " << g6(p.distance) << "  " << g6(p.forcing) << "  "
            << g6(ratio) << "\n";
    }
    out << "monotone " << (r.monotone ? "yes" : "no") << "  fitted C = " << g6(r.fitted_constant) << "\n";
    if (!r.complete) {
        out << "aborted: " << r.message << "\n";
        return numerical;
    }
    return ok;
}

int cmd_stability(const RunManifest& m, std::ostream& out) {
    const StabilityResult r = stability_study(m.f0, *m.f0_perturbed, m.solver, m.theory);
    fs::create_directories(m.output.dir);
    std::ofstream csv(m.output.dir / "stability.csv");
    csv << "time,distance,ratio,envelope\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        csv << g17(r.times[i]) << ',' << g17(r.distance[i]) << ',' << (r.identical ? "nan" : g17(r.ratio[i])) << ','
            << g17(r.envelope[i]) << '\n';
    }
    if (r.identical) {
        out << "identical data: ratio undefined, distance stays " << (r.pass ? "0" : "nonzero") << "\n";
    } else {
        out << "fitted rate " << g6(r.fitted_rate) << "  theory rate " << g6(r.theory_rate) << "\n";
        out << "envelope " << (r.pass ? "holds" : "violated") << "\n";
    }
    if (!r.complete) {
        out << "aborted: " << r.message << "\n";
        return numerical;
    }
    return ok;
}

int cmd_verify(const std::string& snapshot, const Common& c, std::ostream& out) {
    const Snapshot s = load_snapshot(snapshot);
    const DistributionField& f = s.field;
    bool all = true;
    auto line = [&](bool pass, const std::string& what) {
        all = all && pass;
        out << (pass ? "PASS " : "FAIL ") << what << "\n";
    };
    line(true, "nonnegative and finite (" + std::to_string(f.size()) + " values, t = " + g6(s.time) + ")");
    bool entropy_ok = true;
    for (double v : f.values()) entropy_ok = entropy_ok && entropy_density(v) >= 0.0;
    line(entropy_ok, "entropy density >= 0 cellwise");
    const Moments mo = compute_moments(f, s.time);
    out << "mass " << g17(mo.mass) << "  energy " << g17(mo.energy) << "  entropy " << g17(mo.entropy)
        << "  linf " << g17(mo.linf) << "\n";

    KeyValues forced{{"grid.v_max", g17(f.velocity().v_max())},
                     {"grid.n_v", std::to_string(f.velocity().n())},
                     {"grid.n_x", std::to_string(f.torus().n())},
                     {"grid.allow_truncated_cutoff", "true"},
                     {"initial.kind", "file"},
                     {"initial.path", snapshot},
                     {"output.snapshot", "false"}};
    const RunManifest m = resolve(c, forced);
    const CollisionOperator op(f.velocity(), m.solver.kernel, m.solver.sphere.build(),
                               m.solver.regularization());
    const CollisionTerms t = op.terms(f);
    bool coeff_ok = true;
    for (std::size_t i = 0; i < t.gain.size(); ++i) coeff_ok = coeff_ok && t.gain[i] >= 0.0 && t.rate[i] >= 0.0;
    line(coeff_ok, "gain >= 0 and loss rate >= 0");
    CollisionIncrement inc{f.torus(), f.velocity(), std::vector<double>(f.size())};
    for (std::size_t i = 0; i < f.size(); ++i) inc.values[i] = t.gain[i] - t.rate[i] * f.values()[i];
    const CollisionIncrement proj = conservative_projection(inc, f.velocity());
    double before = 0.0, after = 0.0;
    for (std::size_t x = 0; x < f.torus().size(); ++x) {
        const auto b = conservation_sums(inc.slice(x), f.velocity());
        const auto a = conservation_sums(proj.slice(x), f.velocity());
        const auto sc = conservation_scales(inc.slice(x), f.velocity());
        for (int k = 0; k < 5; ++k) {
            if (sc[k] == 0.0) continue;
            before = std::max(before, std::abs(b[k]) / sc[k]);
            after = std::max(after, std::abs(a[k]) / sc[k]);
        }
    }
    out << "relative conservation defect of R: " << g6(before) << " before projection\n";
    line(after <= 1e-12, "projected increment conserves mass, momentum, energy (" + g6(after) + ")");
    return all ? ok : numerical;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"bnk: regularized Boltzmann-Nordheim solver"};
    app.require_subcommand(1);
    Common run_c, sweep_c, stab_c, theory_c, verify_c;
    auto* run_cmd = app.add_subcommand("run", "run the study selected by study.mode (default: single run)");
    add_manifest_flags(run_cmd, run_c);
    auto* sweep_cmd = app.add_subcommand("sweep-alpha", "alpha -> 0 Cauchy study");
    add_manifest_flags(sweep_cmd, sweep_c);
    auto* stab_cmd = app.add_subcommand("stability", "L1 stability of a perturbed pair");
    add_manifest_flags(stab_cmd, stab_c);
    auto* theory_cmd = app.add_subcommand("theory", "print constants and guaranteed windows");
    add_manifest_flags(theory_cmd, theory_c);
    auto* verify_cmd = app.add_subcommand("verify", "re-check invariants on a snapshot");
    add_manifest_flags(verify_cmd, verify_c);
    std::string snapshot;
    verify_cmd->add_option("snapshot", snapshot, "snapshot file")->required()->check(CLI::ExistingFile);

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        if (run_cmd->parsed()) {
            const RunManifest m = resolve(run_c);
            switch (m.study.mode) {
                case StudyMode::single: return cmd_single(m, out);
                case StudyMode::alpha_sweep: return cmd_sweep(m, out);
                case StudyMode::stability_pair: return cmd_stability(m, out);
                case StudyMode::theory_only: print_windows(m, out); return ok;
            }
        }
        if (sweep_cmd->parsed()) return cmd_sweep(resolve(sweep_c, {{"study.mode", "alpha_sweep"}}), out);
        if (stab_cmd->parsed()) return cmd_stability(resolve(stab_c, {{"study.mode", "stability_pair"}}), out);
        if (theory_cmd->parsed()) {
            print_windows(resolve(theory_c), out);
            return ok;
        }
        if (verify_cmd->parsed()) return cmd_verify(snapshot, verify_c, out);
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return validation;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return validation;
    } catch (const ContractViolation& e) {
        err << "invalid input: " << e.what() << "\n";
        return validation;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return numerical;
    }
    return usage;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return main(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace bnk::app
