#include "gridscan/spectra.hpp"

#include "fft.hpp"
#include "gridscan/errors.hpp"

#include <cmath>
#include <numbers>

namespace gridscan {

const Complex& Spectrum::at_wrapped(std::ptrdiff_t k) const {
    const auto n = static_cast<std::ptrdiff_t>(values.size());
    return values[static_cast<std::size_t>(((k % n) + n) % n)];
}

Spectrum dft(const DqTimeSeries& series) {
    check_series(series, "dft");
    const std::size_t n = series.size();
    detail::FftPlan plan(n);
    Spectrum out{std::vector<Complex>(n), series.sample_period};
    plan.forward(series.samples, out.values);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : out.values) v *= scale;
    return out;
}

DqTimeSeries idft(const Spectrum& spectrum) {
    if (spectrum.values.empty()) throw InvalidSpecError("idft: empty spectrum");
    const std::size_t n = spectrum.size();
    detail::FftPlan plan(n);
    DqTimeSeries out{std::vector<Complex>(n), spectrum.sample_period};
    plan.backward(spectrum.values, out.samples);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : out.samples) v *= scale;
    return out;
}

Spectrum conj_reversed(const Spectrum& spectrum) {
    const std::size_t n = spectrum.size();
    Spectrum out{std::vector<Complex>(n), spectrum.sample_period};
    for (std::size_t k = 0; k < n; ++k) out.values[k] = std::conj(spectrum.values[(n - k) % n]);
    return out;
}

std::vector<double> frequency_grid(std::size_t n, double sample_period) {
    if (n < 1) throw InvalidSpecError("frequency_grid: N must be >= 1");
    if (!(sample_period > 0.0)) throw InvalidSpecError("frequency_grid: Ts must be > 0");
    std::vector<double> w(n);
    const double step = 2.0 * std::numbers::pi / (static_cast<double>(n) * sample_period);
    for (std::size_t k = 0; k < n; ++k) w[k] = step * static_cast<double>(k);
    return w;
}

double signed_bin_frequency(std::size_t k, std::size_t n, double sample_period) {
    const double step = 2.0 * std::numbers::pi / (static_cast<double>(n) * sample_period);
    if (2 * k <= n) return step * static_cast<double>(k);
    return -step * static_cast<double>(n - k);
}

std::vector<double> window_coefficients(WindowKind kind, std::size_t n) {
    if (kind == WindowKind::rectangular) return std::vector<double>(n, 1.0);
    if (n < 2) throw InvalidSpecError("Hamming window needs at least 2 samples");
    std::vector<double> w(n);
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom);
    return w;
}

DqTimeSeries apply_window(const DqTimeSeries& series, WindowKind kind) {
    check_series(series, "apply_window");
    if (kind == WindowKind::rectangular) return series;
    const auto w = window_coefficients(kind, series.size());
    DqTimeSeries out = series;
    for (std::size_t i = 0; i < w.size(); ++i) out.samples[i] *= w[i];
    return out;
}

RealTimeSeries apply_window(const RealTimeSeries& series, WindowKind kind) {
    check_series(series, "apply_window");
    if (kind == WindowKind::rectangular) return series;
    const auto w = window_coefficients(kind, series.size());
    RealTimeSeries out = series;
    for (std::size_t i = 0; i < w.size(); ++i) out.samples[i] *= w[i];
    return out;
}

WindowKind parse_window_kind(const std::string& name) {
    if (name == "rectangular") return WindowKind::rectangular;
    if (name == "hamming") return WindowKind::hamming;
    throw InvalidSpecError("unknown window kind '" + name + "'");
}

const char* to_string(WindowKind kind) {
    return kind == WindowKind::hamming ? "hamming" : "rectangular";
}

}  // namespace gridscan
