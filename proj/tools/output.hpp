#pragma once

#include "config.hpp"

#include "slung/sim.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace slung::cli {

/// File could not be created, written or read.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A CSV file is missing a column or has no rows.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::vector<std::string>& trajectory_columns();
const std::vector<std::string>& error_columns();
const std::vector<std::string>& batch_columns();
const std::vector<std::string>& runs_columns();

/// %.17g
std::string format_number(double v);

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryLog& log);
void write_errors_csv(const std::filesystem::path& path, const TrajectoryLog& log);
/// nominal_l2 may be shorter than the batch series; missing samples are left empty.
void write_batch_csv(const std::filesystem::path& path, const BatchResult& batch,
                     const std::vector<double>& nominal_l2);
void write_runs_csv(const std::filesystem::path& path, const BatchResult& batch);

nlohmann::json make_manifest(const RunConfig& config, const std::string& command);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);
/// Config stored in a manifest.
RunConfig config_from_manifest(const nlohmann::json& manifest);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a column; throws SchemaError naming it when absent.
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Writes plots/ under the bundle: per-figure CSVs and plot_figures.py.
/// Returns the files written.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& bundle);

} // namespace slung::cli
