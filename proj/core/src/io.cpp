#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "bnk/cli_io.hpp"
#include "bnk/error.hpp"

namespace bnk {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

void put_u32(std::string& out, std::uint32_t v) {
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
}

void put_f64(std::string& out, double v) {
    char b[8];
    std::memcpy(b, &v, 8);
    out.append(b, 8);
}

std::uint32_t get_u32(const std::string& s, std::size_t at) {
    std::uint32_t v;
    std::memcpy(&v, s.data() + at, 4);
    return v;
}

double get_f64(const std::string& s, std::size_t at) {
    double v;
    std::memcpy(&v, s.data() + at, 8);
    return v;
}

void append_g17(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

std::string timeseries_csv(const std::vector<StepRecord>& history) {
    std::string out = "time,mass,px,py,pz,energy,entropy,linf,window_n,fp_iters,projection_norm\n";
    for (const StepRecord& r : history) {
        const Moments& m = r.moments;
        for (double v : {m.time, m.mass, m.momentum.x, m.momentum.y, m.momentum.z, m.energy, m.entropy, m.linf}) {
            append_g17(out, v);
            out += ',';
        }
        out += std::to_string(r.window);
        out += ',';
        out += std::to_string(r.fp_iters);
        out += ',';
        append_g17(out, r.projection_norm);
        out += '\n';
    }
    return out;
}

void emit_timeseries(const std::vector<StepRecord>& history, const std::filesystem::path& path) {
    if (history.empty()) throw ContractViolation("emit_timeseries: empty history");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << timeseries_csv(history);
    if (!out) throw IoError("write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": empty CSV");
    std::istringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream rs(line);
        for (std::string cell; std::getline(rs, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != t.header.size()) throw IoError(path.string() + ": ragged CSV row");
        t.rows.push_back(std::move(row));
    }
    return t;
}

void emit_snapshot(const DistributionField& f, double time, const std::filesystem::path& path) {
    std::string out;
    out.reserve(snapshot_header_bytes + 8 * f.size());
    out.append("BNKF", 4);
    put_u32(out, snapshot_version);
    for (int i = 0; i < 3; ++i) put_u32(out, static_cast<std::uint32_t>(f.torus().n()));
    for (int i = 0; i < 3; ++i) put_u32(out, static_cast<std::uint32_t>(f.velocity().n()));
    put_f64(out, f.velocity().v_max());
    put_f64(out, time);
    for (double v : f.values()) put_f64(out, v);
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot write " + path.string());
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw IoError("write failed for " + path.string());
}

Snapshot load_snapshot(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot read snapshot " + path.string());
    std::stringstream ss;
    ss << file.rdbuf();
    const std::string s = ss.str();
    const std::string name = path.string();
    if (s.size() < 8) throw IoError(name + ": truncated snapshot header (expected " +
                                   std::to_string(snapshot_header_bytes) + " bytes, got " +
                                   std::to_string(s.size()) + ")");
    if (s.compare(0, 4, "BNKF") != 0) throw IoError(name + ": bad magic, not a BNKF snapshot");
    const std::uint32_t version = get_u32(s, 4);
    if (version != snapshot_version) {
        throw IoError(name + ": unsupported snapshot version " + std::to_string(version) + " (expected " +
                      std::to_string(snapshot_version) + ")");
    }
    if (s.size() < snapshot_header_bytes) {
        throw IoError(name + ": truncated snapshot header (expected " + std::to_string(snapshot_header_bytes) +
                      " bytes, got " + std::to_string(s.size()) + ")");
    }
    std::uint32_t nx[3], nv[3];
    for (int i = 0; i < 3; ++i) nx[i] = get_u32(s, 8 + 4 * i);
    for (int i = 0; i < 3; ++i) nv[i] = get_u32(s, 20 + 4 * i);
    if (nx[0] != nx[1] || nx[0] != nx[2] || nv[0] != nv[1] || nv[0] != nv[2]) {
        throw IoError(name + ": only cubic grids are supported");
    }
    if (nx[0] < 1 || nv[0] < 2 || nx[0] > 4096 || nv[0] > 4096) throw IoError(name + ": corrupt grid sizes");
    const double v_max = get_f64(s, 32);
    const double time = get_f64(s, 40);
    if (!(v_max > 0.0) || !std::isfinite(v_max) || !std::isfinite(time)) {
        throw IoError(name + ": corrupt header (v_max or time)");
    }
    const std::size_t count = static_cast<std::size_t>(nx[0]) * nx[0] * nx[0] * nv[0] * nv[0] * nv[0];
    const std::size_t expected = snapshot_header_bytes + 8 * count;
    if (s.size() != expected) {
        throw IoError(name + ": expected " + std::to_string(expected) + " bytes, got " + std::to_string(s.size()));
    }
    std::vector<double> values(count);
    std::memcpy(values.data(), s.data() + snapshot_header_bytes, 8 * count);
    for (std::size_t i = 0; i < count; ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
            throw IoError(name + ": negative or non-finite value at index " + std::to_string(i));
        }
    }
    Snapshot snap{DistributionField(TorusGrid(static_cast<int>(nx[0])), VelocityGrid(v_max, static_cast<int>(nv[0])),
                                    std::move(values)),
                  time};
    return snap;
}

}  // namespace bnk
