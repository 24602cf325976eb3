#pragma once

// Experiment orchestration behind the gridscan command line:
// simulate -> identify -> evaluate -> compare.

#include "gridscan/config.hpp"
#include "gridscan/impedance_map.hpp"
#include "gridscan/signals.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gridscan::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_missing_input = 3,
    exit_incompatible = 4,
};

struct Dataset {
    DqTimeSeries current;        // measured (noisy) i
    DqTimeSeries voltage;        // measured (noisy) v
    DqTimeSeries current_clean;
    DqTimeSeries voltage_clean;
    std::vector<double> x0;      // grid initial state
    ImpedanceFrfEstimate truth;  // bins 0..N/2-1
    bool grid_symmetric = true;
};

/// Deterministic function of the configuration.
Dataset simulate_dataset(const ExperimentConfig& config);

/// i.csv, v.csv, i_clean.csv, v_clean.csv, truth_frf.csv, x0.csv, manifest.json.
void write_dataset(const std::filesystem::path& dir, const ExperimentConfig& config,
                   const Dataset& data);

/// Measured record from a dataset directory (voltage, current, Ts, symmetry from the manifest).
struct MeasuredRecord {
    DqTimeSeries current;
    DqTimeSeries voltage;
    bool grid_symmetric = true;
};
MeasuredRecord load_measurement(const std::filesystem::path& dir);

/// Runs one method on mean-removed data and writes <dir>/<label>/. Returns the FRF estimate.
ImpedanceFrfEstimate identify_method(const std::filesystem::path& dir, const MethodSpec& method,
                                     const MeasuredRecord& record, int threads, std::ostream& log);

/// Accuracy entry of the report for one (method, band).
nlohmann::ordered_json evaluate_method(const MethodSpec& method, const ImpedanceFrfEstimate& est,
                                       const ImpedanceFrfEstimate& truth,
                                       const BandSelection& band);

/// Fixed-width text rendering of compare.json entries.
std::string render_table(const nlohmann::ordered_json& entries);

int cmd_simulate(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_identify(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_evaluate(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_compare(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace gridscan::cli
