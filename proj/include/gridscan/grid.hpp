#pragma once

// Synthetic dq-frame grids: ladder-network state-space builder, exact
// frequency responses, zero-order-hold simulation, measurement noise and the
// spectral transient (leakage) oracle.

#include "gridscan/signals.hpp"
#include "gridscan/spectra.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gridscan {

/// Continuous-time realization of Z_g: input (di_d, di_q), output (dv_d, dv_q), per-unit.
struct StateSpaceGrid {
    Eigen::MatrixXd A;  // n x n, 1/s
    Eigen::MatrixXd B;  // n x 2
    Eigen::MatrixXd C;  // 2 x n
    Eigen::MatrixXd D;  // 2 x 2
    double omega_g = 0.0;

    Eigen::Index order() const { return A.rows(); }
    /// Dimension and stability checks; throws ConstructionError.
    void validate() const;
};

struct LadderBranch {
    double series_R = 0.0;
    double series_L_d = 0.0;
    double series_L_q = 0.0;
    std::optional<double> shunt_R;
    std::optional<double> shunt_C;
};

/// PCC node with a shunt capacitor, then a chain of series R-L branches. Each
/// branch lands on a node carrying its optional shunt R and/or C to the stiff
/// bus (small-signal ground). A last branch with no shunt elements lands on the
/// stiff bus directly. Values are per-unit at base frequency f_b.
struct LadderNetworkConfig {
    double port_shunt_capacitance = 0.0;
    std::vector<LadderBranch> branches;
    double base_frequency = 50.0;  // Hz, also the synchronous frame frequency

    bool is_symmetric() const;
    void validate() const;
};

/// Shipped default grids; the asymmetric one has L_q = 1.5 L_d on the first line.
LadderNetworkConfig default_ladder_config();
LadderNetworkConfig default_asymmetric_ladder_config();

enum class MeasuredQuantity { voltage, current };

struct NoiseSpec {
    double accuracy_class = 0.005;
    double reference_magnitude_v = 1.0;  // p.u.
    double reference_magnitude_i = 1.0;  // p.u.
    std::uint64_t seed = 2;

    void validate() const;
};

/// Inductors contribute dq state pairs with the synchronous-frame coupling
///   L_d di_d/dt = v_d - R i_d + w_g L_q i_q,  L_q di_q/dt = v_q - R i_q - w_g L_d i_d,
/// capacitors the dual pairs. Throws ConstructionError when A is not Hurwitz.
StateSpaceGrid build_ladder_grid(const LadderNetworkConfig& config);

/// C (j w I - A)^{-1} B + D.
Matrix2c frequency_response(const StateSpaceGrid& model, double omega);
std::vector<Matrix2c> true_frf(const StateSpaceGrid& model, std::span<const double> omegas);

/// Zero-order-hold response to the injected current, sampled at the same instants.
/// `oversampling` splits each hold interval into equal exact sub-steps.
DqTimeSeries simulate(const StateSpaceGrid& model, const DqTimeSeries& injected_current,
                      std::span<const double> x0, int oversampling = 1);

/// Continuous-time system shaping the held excitation into the current that
/// flows into the PCC (converter current path). Input and output are dq pairs.
struct InjectionSource {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;  // m x 2
    Eigen::MatrixXd C;  // 2 x m
    Eigen::MatrixXd D;  // 2 x 2

    Eigen::Index order() const { return A.rows(); }

    /// Current equals the held excitation; identical to plain simulate().
    static InjectionSource passthrough();
    /// Unity-gain Butterworth low-pass of the given order per dq channel.
    static InjectionSource butterworth_lowpass(int order, double cutoff_hz);
    /// Autonomous complex tone generator: the state (re, im) rotates at `omega`
    /// and is the output current; the excitation input is ignored.
    static InjectionSource tone(double omega);
};

struct SimulationRecord {
    DqTimeSeries current;
    DqTimeSeries voltage;
};

/// Simulates source and grid together with the excitation held between samples.
SimulationRecord simulate_with_source(const StateSpaceGrid& model, const InjectionSource& source,
                                      const DqTimeSeries& excitation,
                                      std::span<const double> x0_grid,
                                      std::span<const double> x0_source = {},
                                      int oversampling = 1);

/// Gaussian state scaled so that |v(0)| = |d + j q| equals `output_magnitude`.
std::vector<double> random_initial_state(const StateSpaceGrid& model, double output_magnitude,
                                         std::uint64_t seed);

/// Adds independent zero-mean Gaussian noise to both channels with
/// std = accuracy_class * reference magnitude of the measured quantity.
DqTimeSeries add_measurement_noise(const DqTimeSeries& series, const NoiseSpec& spec,
                                   MeasuredQuantity quantity);

/// T_k = V_k - G+(j w_k) I_k - G-(j w_k) conj(I_{(N-k) mod N}) computed from a
/// noise-free sampled record and the exact model (w_k signed, see signed_bin_frequency).
Spectrum leakage_oracle(const StateSpaceGrid& model, const SimulationRecord& record);

/// Convenience overload: simulates the held injected current first.
Spectrum leakage_oracle(const StateSpaceGrid& model, const DqTimeSeries& injected_current,
                        std::span<const double> x0);

}  // namespace gridscan
