#pragma once

#include "gridscan/signals.hpp"

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace gridscan {

/// N-point DFT with the symmetric 1/sqrt(N) normalization,
/// values[k] = N^{-1/2} sum_n x[n] exp(-j w_k n Ts), w_k = 2 pi k / (N Ts).
struct Spectrum {
    std::vector<Complex> values;
    double sample_period = 0.0;

    std::size_t size() const { return values.size(); }
    /// Bin lookup with modulo-N wrap; negative offsets allowed.
    const Complex& at_wrapped(std::ptrdiff_t k) const;
};

enum class WindowKind { rectangular, hamming };

Spectrum dft(const DqTimeSeries& series);
DqTimeSeries idft(const Spectrum& spectrum);

/// output[k] = conj(input[(N - k) mod N]); the DFT of the conjugated signal.
Spectrum conj_reversed(const Spectrum& spectrum);

/// w_k = 2 pi k / (N Ts) for k = 0..N-1 (bins above N/2 alias to negative frequencies).
std::vector<double> frequency_grid(std::size_t n, double sample_period);

/// Continuous-time frequency that bin k represents: w_k for k <= N/2, w_k - 2 pi / Ts above.
double signed_bin_frequency(std::size_t k, std::size_t n, double sample_period);

/// Hamming: w[n] = 0.54 - 0.46 cos(2 pi n / (N - 1)).
std::vector<double> window_coefficients(WindowKind kind, std::size_t n);
DqTimeSeries apply_window(const DqTimeSeries& series, WindowKind kind);
RealTimeSeries apply_window(const RealTimeSeries& series, WindowKind kind);

WindowKind parse_window_kind(const std::string& name);
const char* to_string(WindowKind kind);

}  // namespace gridscan
