#pragma once

// Reference estimators: empirical transfer function estimate, two-experiment
// sequential perturbation and discrete-time MIMO ARX.

#include "gridscan/impedance_map.hpp"
#include "gridscan/signals.hpp"
#include "gridscan/spectra.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace gridscan {

struct EtfeResult {
    std::vector<Complex> values;
    std::vector<std::uint8_t> valid;
};

/// V_k / I_k; bins with |I_k| < floor_rel * max|I| are flagged and left at zero.
EtfeResult etfe(const Spectrum& V, const Spectrum& I, double floor_rel = 1e-12);

struct Experiment {
    DqTimeSeries voltage;
    DqTimeSeries current;
};

/// Windowed DFT of the d and q channels of each experiment, then per bin
/// [V1 V2] = Z [I1 I2]. Bins whose current matrix has condition number above
/// 1e12 are flagged. Covers k = 0..N/2-1 of the per-experiment length N.
ImpedanceFrfEstimate sequential_perturbation_estimate(const Experiment& exp1,
                                                      const Experiment& exp2, WindowKind window);

/// Splits one record into two equal halves and treats them as two experiments.
ImpedanceFrfEstimate sequential_perturbation_split(const DqTimeSeries& voltage,
                                                   const DqTimeSeries& current,
                                                   WindowKind window);

/// y[n] + sum_m A_m y[n-m] = sum_m B_m u[n-m] + e[n]
struct ArxModel {
    int na = 0;
    int nb = 0;
    std::vector<Eigen::Matrix2d> A_coeffs;
    std::vector<Eigen::Matrix2d> B_coeffs;
    double sample_period = 0.0;

    /// All poles of A(z) inside the unit circle.
    bool is_stable() const;
};

/// Joint least squares over rows n = max(na, nb)..N-1. u and y are (d, q) pairs.
/// Throws RankDeficientError when the regression loses rank.
ArxModel arx_fit(const RealTimeSeries& u_d, const RealTimeSeries& u_q, const RealTimeSeries& y_d,
                 const RealTimeSeries& y_q, int na, int nb);
ArxModel arx_fit(const DqTimeSeries& u, const DqTimeSeries& y, int order);

struct ArxFrf {
    std::vector<Matrix2c> values;
    std::vector<std::uint8_t> valid;
};

/// A(z)^{-1} B(z) at z = exp(j w Ts); singular A(z) flags the point.
ArxFrf arx_frf(const ArxModel& model, std::span<const double> omegas);

}  // namespace gridscan
