#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "app.hpp"
#include "bnk/cli_io.hpp"
#include "bnk/error.hpp"

using namespace bnk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("bnk_test_cli_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    std::vector<std::string> full{"bnk"};
    full.insert(full.end(), args.begin(), args.end());
    const int code = app::main(full, out, err);
    if (out_text != nullptr) *out_text = out.str() + err.str();
    return code;
}

}  // namespace

TEST_CASE("manifest text parsing") {
    const KeyValues kv = parse_manifest_text("# comment\n[grid]\nv_max = 3  # trailing\nn_v=8\n\n[solver]\nalpha = 0.5\n");
    CHECK(kv.at("grid.v_max") == "3");
    CHECK(kv.at("grid.n_v") == "8");
    CHECK(kv.at("solver.alpha") == "0.5");
    CHECK_THROWS_WITH_AS(parse_manifest_text("[grid]\nbogus = 1\n", "m.ini"), doctest::Contains("m.ini:2"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_manifest_text("[grid]\nn_v = 1\nn_v = 2\n"), doctest::Contains("duplicate"),
                         ValidationError);
    CHECK_THROWS_AS(parse_manifest_text("[grid\n"), ValidationError);
    CHECK_THROWS_AS(parse_manifest_text("v_max = 3\n"), ValidationError);
    CHECK_THROWS_AS(read_manifest_file("/nonexistent/bnk.ini"), IoError);
}

TEST_CASE("minimal Maxwellian manifest") {
    const RunManifest m = resolve_manifest({{"initial.kind", "maxwellian"}});
    CHECK(m.torus.n() == 1);
    CHECK(m.velocity.n() == 16);
    CHECK(m.f0.linf() > 0.0);
    CHECK(m.theory.c0 == doctest::Approx(initial_moment_bound(m.f0)));
    CHECK(m.solver.L == density_exponent(m.f0));
}

TEST_CASE("manifest validation names the key and the bound") {
    CHECK_THROWS_WITH_AS(resolve_manifest({{"grid.v_max", "1.5"}, {"solver.alpha", "0.5"}}),
                         doctest::Contains("v_max >= 1/alpha"), ValidationError);
    CHECK_NOTHROW(resolve_manifest({{"grid.v_max", "1.5"}, {"solver.alpha", "0.5"},
                                    {"grid.allow_truncated_cutoff", "true"}}));
    CHECK_THROWS_WITH_AS(resolve_manifest({{"initial.amplitude", "2.5"}, {"solver.L", "1"}}),
                         doctest::Contains("solver.L"), ValidationError);
    CHECK_THROWS_AS(resolve_manifest({{"solver.dt", "-1"}}), ValidationError);
    CHECK_THROWS_AS(resolve_manifest({{"grid.n_v", "x"}}), ValidationError);
    CHECK_THROWS_AS(resolve_manifest({{"initial.kind", "nope"}}), ValidationError);
    CHECK_THROWS_AS(resolve_manifest({{"study.mode", "alpha_sweep"}, {"study.alphas", "0.5,0.25,0.125"}}),
                    ValidationError);  // v_max = 2 violates 1/alpha for 0.25
}

TEST_CASE("two-bump initial data") {
    const RunManifest m = resolve_manifest({{"initial.kind", "two_bumps"},
                                            {"initial.centers", "0.5,0,0; -0.5,0,0"},
                                            {"initial.widths", "0.4,0.4"},
                                            {"initial.amplitudes", "0.5,0.5"}});
    const VelocityGrid& v = m.velocity;
    // symmetric under v_x -> -v_x
    const int n = v.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                CHECK(m.f0.at(0, v.index(i, j, k)) ==
                      doctest::Approx(m.f0.at(0, v.index(n - 1 - i, j, k))).epsilon(1e-14));
    CHECK_THROWS_AS(resolve_manifest({{"initial.kind", "two_bumps"}, {"initial.centers", "0,0,0"},
                                      {"initial.widths", "0.4,0.4"}, {"initial.amplitudes", "1"}}),
                    ValidationError);
}

TEST_CASE("timeseries CSV schema") {
    std::vector<StepRecord> h(1);
    const std::string one = timeseries_csv(h);
    CHECK(one == "time,mass,px,py,pz,energy,entropy,linf,window_n,fp_iters,projection_norm\n0,0,0,0,0,0,0,0,0,0,0\n");
    h.resize(2);
    h[1].moments.time = 0.1;
    h[1].moments.mass = 1.0 / 3.0;
    const fs::path dir = scratch("csv");
    emit_timeseries(h, dir / "t.csv");
    const CsvTable t = read_csv(dir / "t.csv");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.header.size() == 11);
    CHECK(t.rows[1][0] > t.rows[0][0]);
    CHECK(t.rows[1][1] == 1.0 / 3.0);  // 17 digits roundtrip
    CHECK(slurp(dir / "t.csv").find("0.33333333333333331") != std::string::npos);
    CHECK_THROWS_AS(emit_timeseries({}, dir / "e.csv"), ContractViolation);
    CHECK_THROWS_AS(emit_timeseries(h, "/nonexistent/dir/t.csv"), IoError);
}

TEST_CASE("snapshot roundtrip and rejection") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    const VelocityGrid v(2.5, 6);
    DistributionField f(TorusGrid(3), v);
    for (double& x : f.values()) x = u(rng);
    const fs::path dir = scratch("snap");
    emit_snapshot(f, 0.125, dir / "a.bnkf");
    const std::string bytes = slurp(dir / "a.bnkf");
    CHECK(bytes.size() == snapshot_header_bytes + 8 * f.size());
    CHECK(bytes.substr(0, 4) == "BNKF");

    const Snapshot s = load_snapshot(dir / "a.bnkf");
    CHECK(s.time == 0.125);
    CHECK(s.field.velocity() == v);
    CHECK(s.field.torus().n() == 3);
    CHECK(std::memcmp(s.field.values().data(), f.values().data(), 8 * f.size()) == 0);

    spit(dir / "short.bnkf", bytes.substr(0, bytes.size() - 8));
    const std::string expected = "expected " + std::to_string(bytes.size()) + " bytes";
    CHECK_THROWS_WITH_AS(load_snapshot(dir / "short.bnkf"), doctest::Contains(expected.c_str()), IoError);

    std::string ver = bytes;
    ver[4] = 2;
    spit(dir / "ver.bnkf", ver);
    CHECK_THROWS_WITH_AS(load_snapshot(dir / "ver.bnkf"), doctest::Contains("unsupported"), IoError);

    std::string magic = bytes;
    magic[0] = 'X';
    spit(dir / "magic.bnkf", magic);
    CHECK_THROWS_AS(load_snapshot(dir / "magic.bnkf"), IoError);

    std::string neg = bytes;
    const double m1 = -1.0;
    std::memcpy(neg.data() + snapshot_header_bytes + 8 * 7, &m1, 8);
    spit(dir / "neg.bnkf", neg);
    CHECK_THROWS_WITH_AS(load_snapshot(dir / "neg.bnkf"), doctest::Contains("negative"), IoError);

    CHECK_THROWS_AS(load_snapshot(dir / "missing.bnkf"), IoError);
}

TEST_CASE("snapshot as initial data") {
    const fs::path dir = scratch("init");
    const RunManifest a = resolve_manifest({{"grid.n_v", "6"}, {"grid.n_x", "2"}});
    emit_snapshot(a.f0, 0.0, dir / "f0.bnkf");
    const RunManifest b = resolve_manifest(
        {{"grid.n_v", "6"}, {"grid.n_x", "2"}, {"initial.kind", "file"}, {"initial.path", (dir / "f0.bnkf").string()}});
    CHECK(b.f0.values()[5] == a.f0.values()[5]);
    CHECK_THROWS_AS(resolve_manifest({{"grid.n_v", "8"}, {"initial.kind", "file"},
                                      {"initial.path", (dir / "f0.bnkf").string()}}),
                    ValidationError);
}

TEST_CASE("CLI exit codes") {
    const fs::path dir = scratch("cli");
    std::string text;
    CHECK(cli({}, &text) == app::usage);
    CHECK(cli({"frobnicate"}) == app::usage);
    CHECK(cli({"theory"}, &text) == app::ok);
    CHECK(text.find("T_uniform") != std::string::npos);
    CHECK(cli({"theory", "--grid.v_max", "1", "--solver.alpha", "0.5"}, &text) == app::validation);
    CHECK(text.find("v_max >= 1/alpha") != std::string::npos);
    CHECK(cli({"run", "--initial.amplitude", "2.5", "--solver.L", "0"}) == app::validation);

    const std::vector<std::string> small{"--grid.n_v", "4", "--kernel.sphere_order", "2", "--solver.dt", "0.01",
                                         "--solver.t_end", "0.03", "--output.dir", (dir / "r").string()};
    std::vector<std::string> args{"run"};
    args.insert(args.end(), small.begin(), small.end());
    CHECK(cli(args, &text) == app::ok);
    CHECK(text.find("status completed") != std::string::npos);
    const CsvTable t = read_csv(dir / "r" / "timeseries.csv");
    CHECK(t.rows.size() == 4);
    CHECK(fs::exists(dir / "r" / "final.bnkf"));
    CHECK(cli({"verify", (dir / "r" / "final.bnkf").string()}, &text) == app::ok);
    CHECK(text.find("FAIL") == std::string::npos);

    spit(dir / "bad.bnkf", "BNKF");
    CHECK(cli({"verify", (dir / "bad.bnkf").string()}) == app::validation);

    spit(dir / "m.ini", "[grid]\nn_v = 4\n[bogus]\nkey = 1\n");
    CHECK(cli({"run", "-c", (dir / "m.ini").string()}, &text) == app::validation);
    CHECK(text.find("m.ini:4") != std::string::npos);
}

TEST_CASE("flags override the manifest file") {
    const fs::path dir = scratch("override");
    spit(dir / "m.ini", "[grid]\nn_v = 4\n[solver]\nt_end = 0.02\ndt = 0.01\n[kernel]\nsphere_order = 2\n");
    std::string text;
    CHECK(cli({"run", "-c", (dir / "m.ini").string(), "--solver.t_end", "0.05", "--output.dir",
               (dir / "o").string()},
              &text) == app::ok);
    CHECK(text.find("steps 5") != std::string::npos);
}
