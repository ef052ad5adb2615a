#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bnk/equilibria.hpp"
#include "bnk/phase_grid.hpp"
#include "bnk/solver.hpp"
#include "bnk/theory.hpp"

namespace bnk {

/// Flat `section.key -> value` view of a manifest file.
using KeyValues = std::map<std::string, std::string>;

/// Every accepted `section.key`, with a one-line description.
const std::vector<std::pair<std::string, std::string>>& manifest_keys();

/// Parses `[section]` headers, `key = value` lines and `#` comments.
/// Throws ValidationError on malformed lines, duplicate or unknown keys
/// (with file and line number) and IoError when the file is unreadable.
KeyValues parse_manifest_text(const std::string& text, const std::string& origin = "<string>");
KeyValues read_manifest_file(const std::filesystem::path& path);

struct InitialSpec {
    enum Kind { maxwellian, bose_einstein, two_bumps, file };
    Kind kind = maxwellian;
    double T = 1.0;
    double mu = -1.0;
    double amplitude = 1.0;
    Velocity3 u;
    std::vector<Velocity3> centers;
    std::vector<double> widths;
    std::vector<double> amplitudes;
    std::filesystem::path path;
    double modulation = 0.0;  ///< f *= 1 + modulation cos(2 pi x_1)
};

enum class StudyMode { single, alpha_sweep, stability_pair, theory_only };

struct StudySpec {
    StudyMode mode = StudyMode::single;
    std::vector<double> alphas{0.5, 0.25, 0.125, 0.0625};
    double perturbation = 1e-3;  ///< amplitude of the bump added to the second datum
    Velocity3 perturbation_center{0.3, 0.0, 0.0};
    double perturbation_width = 0.3;
    bool window_horizon = false;  ///< replace solver.t_end by the guaranteed window
};

struct OutputSpec {
    std::filesystem::path dir = "out";
    int every = 1;
    bool snapshot = true;
};

struct RunManifest {
    std::filesystem::path source;
    KeyValues values;  ///< resolved keys after overrides
    VelocityGrid velocity;
    TorusGrid torus;
    SolverConfig solver;
    TheoryConstants theory;  ///< c0 from the initial data
    InitialSpec initial;
    StudySpec study;
    OutputSpec output;
    DistributionField f0;
    std::optional<DistributionField> f0_perturbed;  ///< stability pair partner
};

/// Resolves defaults, the file and command-line overrides (in that order),
/// builds the initial data and validates every module precondition.
/// Throws ValidationError naming the key and the violated bound.
RunManifest load_manifest(const std::optional<std::filesystem::path>& path, const KeyValues& overrides = {});
RunManifest resolve_manifest(const KeyValues& values, const std::filesystem::path& source = {});

DistributionField build_initial_data(const InitialSpec& spec, const TorusGrid& x, const VelocityGrid& v);

/// The CSV schema
/// time,mass,px,py,pz,energy,entropy,linf,window_n,fp_iters,projection_norm
/// with 17 significant digits.
std::string timeseries_csv(const std::vector<StepRecord>& history);
void emit_timeseries(const std::vector<StepRecord>& history, const std::filesystem::path& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

/// Binary snapshot: "BNKF", u32 version (1), u32 n_x[3], u32 n_v[3],
/// f64 v_max, f64 time, then the values in storage order; little endian.
inline constexpr std::uint32_t snapshot_version = 1;
inline constexpr std::size_t snapshot_header_bytes = 48;

void emit_snapshot(const DistributionField& f, double time, const std::filesystem::path& path);

struct Snapshot {
    DistributionField field;
    double time = 0.0;
};
/// Throws IoError for unreadable, corrupt, truncated or unsupported files and
/// for negative or non-finite values.
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace bnk
