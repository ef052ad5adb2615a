#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bnk/cli_io.hpp"
#include "bnk/error.hpp"

namespace bnk {

const std::vector<std::pair<std::string, std::string>>& manifest_keys() {
    static const std::vector<std::pair<std::string, std::string>> keys{
        {"grid.v_max", "half-width of the velocity cube"},
        {"grid.n_v", "velocity nodes per axis"},
        {"grid.n_x", "torus cells per axis (1 = space homogeneous)"},
        {"grid.allow_truncated_cutoff", "accept v_max < 1/alpha"},
        {"kernel.b0", "collision rate scale B0"},
        {"kernel.gamma", "angular cutoff width"},
        {"kernel.form", "constant | table"},
        {"kernel.table", "kernel table file (form = table)"},
        {"kernel.sphere", "product | lebedev26"},
        {"kernel.sphere_order", "order of the product sphere rule"},
        {"solver.alpha", "regularization parameter (0 = bosonic)"},
        {"solver.dt", "time step"},
        {"solver.t_end", "final time"},
        {"solver.fp_tol", "sup-norm fixed-point tolerance"},
        {"solver.fp_max_iter", "fixed-point iterations before halving"},
        {"solver.max_halvings", "time step halvings before abort"},
        {"solver.L", "density exponent, f0 <= 2^L (auto = smallest)"},
        {"solver.ceiling_exponent", "blow-up ceiling 2^e (default L + 20)"},
        {"solver.projection", "conservative projection on/off"},
        {"solver.scheme", "endpoint | trapezoid"},
        {"solver.predictor", "seed Picard from the last increment"},
        {"theory.beta_max", "Jacobian bound (default gamma^-2)"},
        {"theory.c1", "M2 bound constant (default 2 c0)"},
        {"theory.c2", "L1 bound constant (default 2 c0)"},
        {"initial.kind", "maxwellian | bose_einstein | two_bumps | file"},
        {"initial.T", "temperature"},
        {"initial.mu", "chemical potential (bose_einstein)"},
        {"initial.amplitude", "peak value (maxwellian)"},
        {"initial.u", "drift velocity vx,vy,vz"},
        {"initial.centers", "bump centres, 'x,y,z; x,y,z'"},
        {"initial.widths", "bump widths"},
        {"initial.amplitudes", "bump amplitudes"},
        {"initial.path", "snapshot file (kind = file)"},
        {"initial.modulation", "x-modulation amplitude"},
        {"study.mode", "single | alpha_sweep | stability_pair | theory_only"},
        {"study.alphas", "descending alpha list"},
        {"study.perturbation", "bump amplitude of the stability partner"},
        {"study.perturbation_center", "bump centre of the stability partner"},
        {"study.perturbation_width", "bump width of the stability partner"},
        {"study.window_horizon", "run to the guaranteed window instead of t_end"},
        {"output.dir", "output directory"},
        {"output.every", "record every k-th step"},
        {"output.snapshot", "write the final snapshot"},
    };
    return keys;
}

namespace {

bool known_key(const std::string& k) {
    const auto& keys = manifest_keys();
    return std::any_of(keys.begin(), keys.end(), [&](const auto& p) { return p.first == k; });
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw ValidationError(key + ": " + what);
}

double to_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) bad(key, "expected a number, got '" + s + "'");
    return v;
}

int to_int(const std::string& key, const std::string& s) {
    int v = 0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) bad(key, "expected an integer, got '" + s + "'");
    return v;
}

bool to_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    bad(key, "expected true or false, got '" + s + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split(s, ',')) out.push_back(to_double(key, item));
    return out;
}

Velocity3 to_vec3(const std::string& key, const std::string& s) {
    const auto l = to_list(key, s);
    if (l.size() != 3) bad(key, "expected three components, got '" + s + "'");
    return {l[0], l[1], l[2]};
}

KernelTable read_kernel_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read kernel table " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        rows.push_back(to_list("kernel.table", line));
    }
    if (rows.size() < 3) bad("kernel.table", "needs a speed row, a cosine row and one value row per speed");
    KernelTable t;
    t.speeds = rows[0];
    t.cosines = rows[1];
    for (std::size_t i = 2; i < rows.size(); ++i) t.values.insert(t.values.end(), rows[i].begin(), rows[i].end());
    return t;
}

class Reader {
  public:
    explicit Reader(const KeyValues& kv) : kv_(kv) {}
    const std::string* get(const std::string& k) const {
        auto it = kv_.find(k);
        return it == kv_.end() ? nullptr : &it->second;
    }
    double num(const std::string& k, double def) const { return get(k) ? to_double(k, *get(k)) : def; }
    int integer(const std::string& k, int def) const { return get(k) ? to_int(k, *get(k)) : def; }
    bool flag(const std::string& k, bool def) const { return get(k) ? to_bool(k, *get(k)) : def; }
    std::string str(const std::string& k, const std::string& def) const { return get(k) ? *get(k) : def; }

  private:
    const KeyValues& kv_;
};

}  // namespace

KeyValues parse_manifest_text(const std::string& text, const std::string& origin) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ValidationError(where + ": key '" + key + "' outside any section");
        const std::string full = section + "." + key;
        if (!known_key(full)) throw ValidationError(where + ": unknown key '" + full + "'");
        if (kv.count(full)) throw ValidationError(where + ": duplicate key '" + full + "'");
        kv[full] = value;
    }
    return kv;
}

KeyValues read_manifest_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read manifest " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest_text(ss.str(), path.string());
}

DistributionField build_initial_data(const InitialSpec& spec, const TorusGrid& x, const VelocityGrid& v) {
    DistributionField f(x, v);
    const std::size_t nv = v.size();
    if (spec.kind == InitialSpec::file) {
        Snapshot s = load_snapshot(spec.path);
        if (!(s.field.velocity() == v) || !(s.field.torus() == x)) {
            bad("initial.path", "snapshot grid does not match grid.v_max / grid.n_v / grid.n_x");
        }
        f = std::move(s.field);
    } else if (spec.kind == InitialSpec::bose_einstein) {
        EquilibriumParams p;
        p.u = spec.u;
        p.T = spec.T;
        p.mu = spec.mu;
        f = bose_einstein_field(p, x, v);
    } else {
        std::vector<double> slice(nv, 0.0);
        for (std::size_t c = 0; c < nv; ++c) {
            const Velocity3 w = v.velocity(c);
            if (spec.kind == InitialSpec::maxwellian) {
                slice[c] = spec.amplitude * std::exp(-norm2(w - spec.u) / (2.0 * spec.T));
            } else {
                for (std::size_t b = 0; b < spec.centers.size(); ++b) {
                    const double s = spec.widths[b];
                    slice[c] += spec.amplitudes[b] * std::exp(-norm2(w - spec.centers[b]) / (2.0 * s * s));
                }
            }
        }
        for (std::size_t i = 0; i < x.size(); ++i) std::copy(slice.begin(), slice.end(), f.slice(i).begin());
    }
    if (spec.modulation != 0.0) {
        const int n = x.n();
        for (std::size_t i = 0; i < x.size(); ++i) {
            const int ix = static_cast<int>(i / (static_cast<std::size_t>(n) * n));
            const double m = 1.0 + spec.modulation * std::cos(2.0 * std::numbers::pi * ix / n);
            for (double& val : f.slice(i)) val *= m;
        }
    }
    f.check();
    return f;
}

RunManifest resolve_manifest(const KeyValues& values, const std::filesystem::path& source) {
    for (const auto& [k, v] : values) {
        if (!known_key(k)) throw ValidationError("unknown key '" + k + "'");
    }
    const Reader r(values);
    RunManifest m;
    m.source = source;
    m.values = values;

    const double v_max = r.num("grid.v_max", 2.0);
    const int n_v = r.integer("grid.n_v", 16);
    const int n_x = r.integer("grid.n_x", 1);
    if (!(v_max > 0.0)) bad("grid.v_max", "must be > 0");
    if (n_v < 2) bad("grid.n_v", "must be >= 2");
    if (n_x < 1) bad("grid.n_x", "must be >= 1");
    m.velocity = VelocityGrid(v_max, n_v);
    m.torus = TorusGrid(n_x);

    SolverConfig& s = m.solver;
    s.kernel.b0 = r.num("kernel.b0", 1.0);
    s.kernel.gamma = r.num("kernel.gamma", 0.1);
    const std::string form = r.str("kernel.form", "constant");
    if (form == "table") {
        const auto* p = r.get("kernel.table");
        if (!p) bad("kernel.table", "required when kernel.form = table");
        s.kernel.form = KernelForm::table;
        s.kernel.table = read_kernel_table(*p);
    } else if (form != "constant") {
        bad("kernel.form", "expected constant or table, got '" + form + "'");
    }
    const std::string sphere = r.str("kernel.sphere", "product");
    if (sphere == "lebedev26") {
        s.sphere.kind = SphereRule::lebedev;
    } else if (sphere == "product") {
        s.sphere.kind = SphereRule::product;
    } else {
        bad("kernel.sphere", "expected product or lebedev26, got '" + sphere + "'");
    }
    s.sphere.order = r.integer("kernel.sphere_order", 3);
    try {
        s.kernel.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("kernel: ") + e.what());
    }

    s.alpha = r.num("solver.alpha", 0.5);
    s.dt = r.num("solver.dt", 1e-3);
    s.t_end = r.num("solver.t_end", 0.0);
    s.fp_tol = r.num("solver.fp_tol", 1e-10);
    s.fp_max_iter = r.integer("solver.fp_max_iter", 50);
    s.max_halvings = r.integer("solver.max_halvings", 8);
    s.projection = r.flag("solver.projection", true);
    s.predictor = r.flag("solver.predictor", true);
    const std::string scheme = r.str("solver.scheme", "endpoint");
    if (scheme == "trapezoid") {
        s.scheme = TimeScheme::trapezoid;
    } else if (scheme != "endpoint") {
        bad("solver.scheme", "expected endpoint or trapezoid, got '" + scheme + "'");
    }

    InitialSpec& in = m.initial;
    const std::string kind = r.str("initial.kind", "maxwellian");
    if (kind == "maxwellian") {
        in.kind = InitialSpec::maxwellian;
    } else if (kind == "bose_einstein") {
        in.kind = InitialSpec::bose_einstein;
    } else if (kind == "two_bumps") {
        in.kind = InitialSpec::two_bumps;
    } else if (kind == "file") {
        in.kind = InitialSpec::file;
    } else {
        bad("initial.kind", "expected maxwellian, bose_einstein, two_bumps or file, got '" + kind + "'");
    }
    in.T = r.num("initial.T", 1.0);
    in.mu = r.num("initial.mu", -1.0);
    in.amplitude = r.num("initial.amplitude", 1.0);
    if (const auto* p = r.get("initial.u")) in.u = to_vec3("initial.u", *p);
    in.modulation = r.num("initial.modulation", 0.0);
    if (!(in.T > 0.0)) bad("initial.T", "must be > 0");
    if (in.kind == InitialSpec::maxwellian && !(in.amplitude >= 0.0)) bad("initial.amplitude", "must be >= 0");
    if (in.kind == InitialSpec::bose_einstein && !(in.mu < 0.0)) bad("initial.mu", "must be < 0");
    if (!(std::abs(in.modulation) <= 1.0)) bad("initial.modulation", "must satisfy |modulation| <= 1");
    if (in.kind == InitialSpec::two_bumps) {
        const auto* c = r.get("initial.centers");
        if (!c) bad("initial.centers", "required for two_bumps");
        for (const auto& item : split(*c, ';')) in.centers.push_back(to_vec3("initial.centers", item));
        in.widths = to_list("initial.widths", r.str("initial.widths", ""));
        in.amplitudes = to_list("initial.amplitudes", r.str("initial.amplitudes", ""));
        if (in.widths.size() != in.centers.size()) bad("initial.widths", "needs one width per centre");
        if (in.amplitudes.size() != in.centers.size()) bad("initial.amplitudes", "needs one amplitude per centre");
        for (double w : in.widths)
            if (!(w > 0.0)) bad("initial.widths", "must be > 0");
        for (double a : in.amplitudes)
            if (!(a >= 0.0)) bad("initial.amplitudes", "must be >= 0");
    }
    if (in.kind == InitialSpec::file) {
        const auto* p = r.get("initial.path");
        if (!p) bad("initial.path", "required for kind = file");
        in.path = *p;
    }

    StudySpec& st = m.study;
    const std::string mode = r.str("study.mode", "single");
    if (mode == "single") {
        st.mode = StudyMode::single;
    } else if (mode == "alpha_sweep") {
        st.mode = StudyMode::alpha_sweep;
    } else if (mode == "stability_pair") {
        st.mode = StudyMode::stability_pair;
    } else if (mode == "theory_only") {
        st.mode = StudyMode::theory_only;
    } else {
        bad("study.mode", "expected single, alpha_sweep, stability_pair or theory_only, got '" + mode + "'");
    }
    if (const auto* p = r.get("study.alphas")) st.alphas = to_list("study.alphas", *p);
    st.perturbation = r.num("study.perturbation", st.perturbation);
    if (const auto* p = r.get("study.perturbation_center")) st.perturbation_center = to_vec3("study.perturbation_center", *p);
    st.perturbation_width = r.num("study.perturbation_width", st.perturbation_width);
    st.window_horizon = r.flag("study.window_horizon", false);
    if (st.alphas.empty()) bad("study.alphas", "must not be empty");
    for (std::size_t i = 0; i < st.alphas.size(); ++i) {
        if (!(st.alphas[i] > 0.0 && st.alphas[i] <= 1.0)) bad("study.alphas", "every alpha must lie in (0, 1]");
        if (i > 0 && !(st.alphas[i] < st.alphas[i - 1])) bad("study.alphas", "must be strictly descending");
    }
    if (!(st.perturbation >= 0.0)) bad("study.perturbation", "must be >= 0");
    if (!(st.perturbation_width > 0.0)) bad("study.perturbation_width", "must be > 0");

    m.output.dir = r.str("output.dir", "out");
    m.output.every = r.integer("output.every", 1);
    m.output.snapshot = r.flag("output.snapshot", true);
    s.output_every = m.output.every;

    // Cutoff support inside the cube.
    const bool allow_trunc = r.flag("grid.allow_truncated_cutoff", false);
    auto check_support = [&](double alpha) {
        if (allow_trunc || alpha == 0.0) return;
        if (v_max * alpha < 1.0) {
            bad("grid.v_max", "violates v_max >= 1/alpha (v_max = " + std::to_string(v_max) +
                                  ", alpha = " + std::to_string(alpha) + ")");
        }
    };
    if (!(s.alpha >= 0.0 && s.alpha <= 1.0)) bad("solver.alpha", "must lie in [0, 1]");
    if (st.mode == StudyMode::alpha_sweep) {
        for (double a : st.alphas) check_support(a);
    } else {
        check_support(s.alpha);
    }

    m.f0 = build_initial_data(in, m.torus, m.velocity);
    if (st.mode == StudyMode::stability_pair) {
        DistributionField g = m.f0;
        const double w2 = st.perturbation_width * st.perturbation_width;
        for (std::size_t c = 0; c < m.velocity.size(); ++c) {
            const double bump =
                st.perturbation * std::exp(-norm2(m.velocity.velocity(c) - st.perturbation_center) / (2.0 * w2));
            for (std::size_t i = 0; i < m.torus.size(); ++i) g.at(i, c) += bump;
        }
        g.check();
        m.f0_perturbed = std::move(g);
    }

    double linf = m.f0.linf();
    if (m.f0_perturbed) linf = std::max(linf, m.f0_perturbed->linf());
    const std::string Lstr = r.str("solver.L", "auto");
    if (Lstr == "auto") {
        s.L = 0;
        while (std::ldexp(1.0, s.L) < linf) ++s.L;
    } else {
        s.L = to_int("solver.L", Lstr);
        if (s.L < 0) bad("solver.L", "must be >= 0");
        if (linf > std::ldexp(1.0, s.L)) {
            bad("solver.L", "initial data ||f0||_inf = " + std::to_string(linf) + " exceeds 2^L = " +
                                std::to_string(std::ldexp(1.0, s.L)));
        }
    }
    if (const auto* p = r.get("solver.ceiling_exponent")) {
        s.ceiling_exponent = to_double("solver.ceiling_exponent", *p);
    }
    try {
        s.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(e.what());
    }

    TheoryConstants& tc = m.theory;
    tc.c0 = initial_moment_bound(m.f0);
    if (!std::isfinite(tc.c0)) bad("initial", "moment bound c0 = int (1 + |v|^2) sup_x f0 dv is not finite");
    tc.b0 = s.kernel.b0;
    tc.gamma = s.kernel.gamma;
    tc.L = s.L;
    if (const auto* p = r.get("theory.beta_max")) tc.beta_max = to_double("theory.beta_max", *p);
    if (const auto* p = r.get("theory.c1")) tc.c1 = to_double("theory.c1", *p);
    if (const auto* p = r.get("theory.c2")) tc.c2 = to_double("theory.c2", *p);
    tc.validate();

    if (st.window_horizon) {
        const GuaranteedWindows w = guaranteed_window(tc);
        if (!std::isfinite(w.t_uniform)) bad("study.window_horizon", "guaranteed window is unbounded (B0 = 0)");
        s.t_end = w.t_uniform;
    }
    return m;
}

RunManifest load_manifest(const std::optional<std::filesystem::path>& path, const KeyValues& overrides) {
    KeyValues kv;
    if (path) kv = read_manifest_file(*path);
    for (const auto& [k, v] : overrides) {
        if (!known_key(k)) throw ValidationError("unknown key '" + k + "'");
        kv[k] = v;
    }
    return resolve_manifest(kv, path.value_or(std::filesystem::path{}));
}

}  // namespace bnk
