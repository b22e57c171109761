#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace slung::cli {

namespace fs = std::filesystem;
using nlohmann::json;

#ifndef SLUNG_VERSION
#define SLUNG_VERSION "0.0.0"
#endif

namespace {

std::vector<std::string> xyz(const std::string& p) { return {p + "_x", p + "_y", p + "_z"}; }

std::vector<std::string> cat(std::initializer_list<std::vector<std::string>> parts) {
    std::vector<std::string> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw IoError(path.string() + ": write failed");
}

class Row {
public:
    explicit Row(std::ostream& out) : out_(out) {}
    Row& operator<<(double v) { return field(format_number(v)); }
    Row& operator<<(const std::string& s) { return field(s); }
    Row& operator<<(const char* s) { return field(s); }
    Row& operator<<(const Vector3& v) { return *this << v.x() << v.y() << v.z(); }
    Row& operator<<(const Quaternion& q) { return *this << q.w << q.x << q.y << q.z; }
    ~Row() { out_ << '\n'; }

private:
    Row& field(const std::string& s) {
        if (!first_) out_ << ',';
        out_ << s;
        first_ = false;
        return *this;
    }

    std::ostream& out_;
    bool first_ = true;
};

void header(std::ostream& out, const std::vector<std::string>& cols) {
    Row r(out);
    for (const auto& c : cols) r << c;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

/// Copies the named columns of a table, keeping row order.
void project(const CsvTable& t, const std::vector<std::string>& cols, const fs::path& path) {
    std::vector<std::size_t> idx;
    for (const auto& c : cols) idx.push_back(t.column(c));
    auto out = open_out(path);
    header(out, cols);
    for (const auto& row : t.rows) {
        Row r(out);
        for (std::size_t i : idx) r << (i < row.size() ? row[i] : std::string());
    }
    finish(out, path);
}

const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Draws the figure panels from the CSV files next to this script."""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def load(name):
    path = os.path.join(HERE, name)
    if not os.path.exists(path):
        return None
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return rows


def col(rows, key):
    return [float(r[key]) if r[key] != "" else float("nan") for r in rows]


def markers(ax, switches):
    for s in switches or []:
        ax.axvline(float(s["t"]), color="k", linestyle="--", linewidth=0.8)


def panels(rows, groups, switches, out, title):
    fig, axes = plt.subplots(len(groups), 1, figsize=(8, 2.4 * len(groups)), sharex=True)
    t = col(rows, "t")
    for ax, (label, keys) in zip(axes, groups):
        for k in keys:
            ax.plot(t, col(rows, k), label=k)
        ax.set_ylabel(label)
        ax.legend(loc="upper right", fontsize=7, ncol=len(keys))
        ax.grid(True, alpha=0.3)
        markers(ax, switches)
    axes[-1].set_xlabel("t [s]")
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, out), dpi=150)
    plt.close(fig)


def main():
    switches = load("switches.csv")
    uav = load("uav_states.csv")
    if uav:
        panels(uav, [
            ("position [m]", ["uav_x", "uav_y", "uav_z"]),
            ("velocity [m/s]", ["uav_vx", "uav_vy", "uav_vz"]),
            ("attitude", ["q_w", "q_x", "q_y", "q_z"]),
            ("rate [rad/s]", ["omega_x", "omega_y", "omega_z"]),
        ], switches, "uav_states.png", "UAV states")
    load_rows = load("load_states.csv")
    if load_rows:
        panels(load_rows, [
            ("position [m]", ["load_x", "load_y", "load_z"]),
            ("velocity [m/s]", ["load_vx", "load_vy", "load_vz"]),
            ("cable direction", ["qc_x", "qc_y", "qc_z"]),
            ("direction rate", ["qc_dot_x", "qc_dot_y", "qc_dot_z"]),
        ], switches, "load_states.png", "Load states")
    err = load("tracking_errors.csv")
    if err:
        panels(err, [
            ("position error [m]", ["e_x", "e_y", "e_z"]),
            ("velocity error [m/s]", ["e_vx", "e_vy", "e_vz"]),
        ], switches, "tracking_errors.png", "Load tracking errors")
    l2 = load("l2_norm.csv")
    if l2:
        fig, ax = plt.subplots(figsize=(8, 3))
        t = col(l2, "t_raise")
        for k in [k for k in l2[0].keys() if k != "t_raise"]:
            ax.plot(t, col(l2, k), label=k)
        ax.set_xlabel("time since Raise entry [s]")
        ax.set_ylabel("L2 norm [m s^0.5]")
        ax.legend()
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        fig.savefig(os.path.join(HERE, "l2_norm.png"), dpi=150)
        plt.close(fig)
    return 0


if __name__ == "__main__":
    sys.exit(main())
)PY";

} // namespace

const std::vector<std::string>& trajectory_columns() {
    static const std::vector<std::string> cols =
        cat({{"t", "mode"},
             {"uav_x", "uav_y", "uav_z", "uav_vx", "uav_vy", "uav_vz"},
             {"q_w", "q_x", "q_y", "q_z"},
             xyz("omega"),
             {"load_x", "load_y", "load_z", "load_vx", "load_vy", "load_vz"},
             xyz("qc"),
             xyz("qc_dot"),
             {"ref_x", "ref_y", "ref_z", "ref_vx", "ref_vy", "ref_vz"},
             {"thrust"},
             xyz("tau")});
    return cols;
}

const std::vector<std::string>& error_columns() {
    static const std::vector<std::string> cols =
        cat({{"t", "mode", "e_x", "e_y", "e_z", "e_vx", "e_vy", "e_vz"}, xyz("qce"), xyz("qce_dot")});
    return cols;
}

const std::vector<std::string>& batch_columns() {
    static const std::vector<std::string> cols = {"t_raise", "l2_rms", "l2_nominal", "mean_e_x", "mean_e_y",
                                                  "mean_e_z"};
    return cols;
}

const std::vector<std::string>& runs_columns() {
    static const std::vector<std::string> cols = {"run", "ok", "t_pull", "t_raise", "t_track", "max_track_error",
                                                  "error"};
    return cols;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv(const fs::path& path, const TrajectoryLog& log) {
    auto out = open_out(path);
    header(out, trajectory_columns());
    for (const auto& r : log.records) {
        Row(out) << r.t << mode_name(r.mode) << r.uav_pos << r.uav_vel << r.uav_att << r.uav_omega << r.load_pos
                 << r.load_vel << r.qc << r.qc_dot << r.ref_pos << r.ref_vel << r.thrust << r.torque;
    }
    finish(out, path);
}

void write_errors_csv(const fs::path& path, const TrajectoryLog& log) {
    auto out = open_out(path);
    header(out, error_columns());
    for (const auto& r : log.records) {
        Row(out) << r.t << mode_name(r.mode) << r.err_pos << r.err_vel << r.qce << r.qce_dot;
    }
    finish(out, path);
}

void write_batch_csv(const fs::path& path, const BatchResult& batch, const std::vector<double>& nominal_l2) {
    auto out = open_out(path);
    header(out, batch_columns());
    for (std::size_t k = 0; k < batch.time.size(); ++k) {
        Row r(out);
        r << batch.time[k] << batch.l2[k];
        if (k < nominal_l2.size()) r << nominal_l2[k];
        else r << "";
        r << batch.mean_error[k];
    }
    finish(out, path);
}

void write_runs_csv(const fs::path& path, const BatchResult& batch) {
    auto out = open_out(path);
    header(out, runs_columns());
    for (const auto& run : batch.runs) {
        auto when = [&](ModeTag tag) -> std::string {
            for (const auto& s : run.switches) {
                if (s.to == tag) return format_number(s.t);
            }
            return "";
        };
        std::string err = run.error;
        for (char& c : err) {
            if (c == ',' || c == '\n') c = ';';
        }
        Row(out) << std::to_string(run.index) << (run.ok ? "1" : "0") << when(ModeTag::Pull) << when(ModeTag::Raise)
                 << when(ModeTag::Track) << run.max_track_error << err;
    }
    finish(out, path);
}

json make_manifest(const RunConfig& config, const std::string& command) {
    return {{"command", command},
            {"version", SLUNG_VERSION},
            {"seed", config.scenario.sim.seed},
            {"config", config_to_json(config)}};
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string() + ": cannot open");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

RunConfig config_from_manifest(const json& manifest) {
    if (!manifest.is_object() || !manifest.contains("config")) throw ConfigError("manifest: missing config");
    return config_from_json(manifest.at("config"));
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw SchemaError("missing column: " + name);
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string() + ": cannot open");
    CsvTable t;
    std::string line;
    if (!std::getline(in, line) || line.empty()) throw SchemaError(path.string() + ": no header row");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (!line.empty()) t.rows.push_back(split(line));
    }
    return t;
}

std::vector<fs::path> emit_plots(const fs::path& bundle) {
    if (!fs::is_directory(bundle)) throw IoError(bundle.string() + ": bundle directory not found");
    const CsvTable traj = read_csv(bundle / "trajectory.csv");
    const CsvTable err = read_csv(bundle / "errors.csv");
    // Validate both schemas before writing anything.
    for (const auto& c : trajectory_columns()) traj.column(c);
    for (const auto& c : error_columns()) err.column(c);
    if (traj.rows.empty()) throw SchemaError("trajectory.csv: log has no records");
    if (err.rows.empty()) throw SchemaError("errors.csv: log has no records");
    std::optional<CsvTable> batch;
    if (fs::exists(bundle / "batch.csv")) {
        batch = read_csv(bundle / "batch.csv");
        for (const auto& c : batch_columns()) batch->column(c);
    }

    const fs::path dir = bundle / "plots";
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(dir.string() + ": " + ec.message());

    std::vector<fs::path> written;
    auto emit = [&](const CsvTable& t, const std::vector<std::string>& cols, const std::string& name) {
        project(t, cols, dir / name);
        written.push_back(dir / name);
    };
    emit(traj,
         cat({{"t", "mode", "uav_x", "uav_y", "uav_z", "uav_vx", "uav_vy", "uav_vz", "q_w", "q_x", "q_y", "q_z"},
              xyz("omega")}),
         "uav_states.csv");
    emit(traj,
         cat({{"t", "mode", "load_x", "load_y", "load_z", "load_vx", "load_vy", "load_vz"}, xyz("qc"),
              xyz("qc_dot")}),
         "load_states.csv");
    emit(err, error_columns(), "tracking_errors.csv");

    // Mode-switch markers.
    {
        const std::size_t it = traj.column("t");
        const std::size_t im = traj.column("mode");
        const fs::path p = dir / "switches.csv";
        auto out = open_out(p);
        header(out, {"t", "mode"});
        for (std::size_t k = 1; k < traj.rows.size(); ++k) {
            if (traj.rows[k][im] != traj.rows[k - 1][im]) Row(out) << traj.rows[k][it] << traj.rows[k][im];
        }
        finish(out, p);
        written.push_back(p);
    }

    // L2 curves: the batch aggregate when present, otherwise the single run's cumulative norm.
    {
        const fs::path p = dir / "l2_norm.csv";
        if (batch) {
            project(*batch, {"t_raise", "l2_rms", "l2_nominal"}, p);
        } else {
            const std::size_t it = err.column("t");
            const std::size_t im = err.column("mode");
            const std::size_t ix = err.column("e_x");
            auto out = open_out(p);
            header(out, {"t_raise", "l2_run"});
            bool started = false;
            double t0 = 0.0;
            double acc = 0.0;
            for (std::size_t k = 0; k < err.rows.size(); ++k) {
                const auto& row = err.rows[k];
                if (!started && (row[im] == "Raise" || row[im] == "Track")) {
                    started = true;
                    t0 = std::stod(row[it]);
                }
                if (!started) continue;
                const double dt = k + 1 < err.rows.size() ? std::stod(err.rows[k + 1][it]) - std::stod(row[it])
                                                          : (k > 0 ? std::stod(row[it]) - std::stod(err.rows[k - 1][it])
                                                                   : 0.0);
                double e2 = 0.0;
                for (std::size_t i = 0; i < 3; ++i) e2 += std::pow(std::stod(row[ix + i]), 2);
                acc += e2 * dt;
                Row(out) << std::stod(row[it]) - t0 << std::sqrt(acc);
            }
            finish(out, p);
        }
        written.push_back(p);
    }

    const fs::path script = dir / "plot_figures.py";
    auto out = open_out(script);
    out << kPlotScript;
    finish(out, script);
    written.push_back(script);
    return written;
}

} // namespace slung::cli
