#pragma once

// Accuracy metrics for FRF estimates: squared-norm fit percentage and the
// relative H-infinity error over a frequency band.

#include "gridscan/impedance_map.hpp"
#include "gridscan/types.hpp"

#include <cstddef>
#include <span>

namespace gridscan {

/// (1 - |est - truth|^2 / |truth - mean(truth)|^2) * 100 with squared 2-norms.
double fit_percent(std::span<const Complex> estimate, std::span<const Complex> truth);

/// Largest singular value of a 2x2 complex matrix, closed form.
double sigma_max_2x2(const Matrix2c& M);

/// max_k sigma(est_k - truth_k) / max_k sigma(truth_k).
double relative_hinf_error(std::span<const Matrix2c> estimates, std::span<const Matrix2c> truths);

struct BandSelection {
    double f_min = 0.0;  // Hz
    double f_max = 0.0;  // Hz
};

/// Inclusive bin range.
struct BinRange {
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t count() const { return last - first + 1; }
};

/// k = round(f N Ts) (ties to even) at both ends, clipped to the bins the estimate holds.
BinRange select_band(std::size_t n, double sample_period, std::size_t available,
                     const BandSelection& band);
BinRange select_band(const ImpedanceFrfEstimate& frf, const BandSelection& band);

struct AccuracyReport {
    double fit_dd = 0.0, fit_dq = 0.0, fit_qd = 0.0, fit_qq = 0.0;
    double rel_hinf = 0.0;
    std::size_t bins = 0;
};

/// Compares an estimate against a truth FRF over a band. The truth grid may be
/// finer by an integer factor (same Ts); bins are matched by frequency.
/// Throws ShapeError when the grids cannot be aligned.
AccuracyReport evaluate_band(const ImpedanceFrfEstimate& estimate,
                             const ImpedanceFrfEstimate& truth, const BandSelection& band);

}  // namespace gridscan
