#pragma once

// Experiment and network configuration files (JSON, strict: unknown keys are rejected).

#include "gridscan/grid.hpp"
#include "gridscan/metrics.hpp"
#include "gridscan/spectra.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gridscan {

struct LpmMethod {
    int R = 4;
    int l = 18;
    bool assume_symmetric = false;
    bool assume_periodic = false;
    bool exclude_dc = true;  // the DC line is void after mean removal
};
struct ArxMethod {
    int order = 2;
};
struct SeqpertMethod {
    WindowKind window = WindowKind::hamming;
};
struct EtfeMethod {};

using MethodSpec = std::variant<LpmMethod, ArxMethod, SeqpertMethod, EtfeMethod>;

/// Directory-safe identifier, e.g. lpm_R4_l18, arx_2, seqpert_hamming, etfe.
std::string method_label(const MethodSpec& m);
/// lpm, arx, seqpert or etfe.
std::string method_name(const MethodSpec& m);
/// Order column of the comparison table (R for LPM, na = nb for ARX); empty otherwise.
std::optional<int> method_order(const MethodSpec& m);

struct InjectionFilterSpec {
    bool enabled = true;
    int order = 4;
    double cutoff_hz = 2000.0;
};

struct ExperimentConfig {
    LadderNetworkConfig grid;
    double amplitude = 0.05;
    std::uint64_t excitation_seed = 1;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> channel_seeds;
    double duration_s = 1.0;
    double sample_period = 1e-4;
    NoiseSpec noise;
    double transient_magnitude = 3.0;
    std::uint64_t transient_seed = 3;
    InjectionFilterSpec injection_filter;
    std::vector<MethodSpec> methods;
    std::vector<BandSelection> bands;
    std::string output_dir = "gridscan_out";
    int threads = 1;

    /// duration_s / Ts; throws ConfigError unless it is a positive even integer.
    std::size_t sample_count() const;
    ExcitationSpec excitation() const;
    void validate() const;
};

LadderNetworkConfig parse_network_config(const nlohmann::json& j);
LadderNetworkConfig load_network_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const LadderNetworkConfig& c);

/// `grid` may be an inline object or a path relative to base_dir.
ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
/// Fully resolved form (grid inline, derived seeds explicit).
nlohmann::ordered_json to_json(const ExperimentConfig& c);

}  // namespace gridscan
