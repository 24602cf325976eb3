#pragma once

// CSV persistence for time series, spectra and FRF estimates. Numbers are
// written with 17 significant digits so that a write/read cycle is exact.

#include "gridscan/impedance_map.hpp"
#include "gridscan/lpm.hpp"
#include "gridscan/signals.hpp"
#include "gridscan/spectra.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gridscan::io {

std::string format_double(double x);

/// Header `t,d,q`; t_n = n Ts.
void write_dq_csv(const std::filesystem::path& path, const DqTimeSeries& series);
/// Header `t,val`.
void write_real_csv(const std::filesystem::path& path, const RealTimeSeries& series);

/// Loads `t,d,q`. Times must be uniform to 1 part in 1e9 of the record span.
DqTimeSeries read_dq_csv(const std::filesystem::path& path);
RealTimeSeries read_real_csv(const std::filesystem::path& path);

/// Columns k, omega_rad_s, re, im.
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spectrum);

/// Columns k, f_hz, z_dd_re, z_dd_im, z_dq_re, z_dq_im, z_qd_re, z_qd_im, z_qq_re, z_qq_im, valid.
void write_frf_csv(const std::filesystem::path& path, const ImpedanceFrfEstimate& frf);
/// The sample period is not stored in the file; N is recovered from the bin spacing.
ImpedanceFrfEstimate read_frf_csv(const std::filesystem::path& path, double sample_period);

/// Columns k, omega_rad_s, G+, G-, transient (re/im each), residual, condition, rank, flags.
void write_complex_tf_csv(const std::filesystem::path& path, const ComplexTfEstimate& est);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace gridscan::io
