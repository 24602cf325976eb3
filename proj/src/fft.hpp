#pragma once

// Internal complex FFT used by the spectra layer. Mixed-radix Cooley-Tukey for
// lengths whose prime factors are all small, Bluestein's chirp-z otherwise.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace gridscan::detail {

class FftPlan {
public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(FftPlan&&) noexcept;
    FftPlan& operator=(FftPlan&&) noexcept;

    std::size_t size() const { return n_; }

    /// Unnormalized forward transform X_k = sum_n x_n exp(-2 pi i k n / N).
    void forward(std::span<const std::complex<double>> in,
                 std::span<std::complex<double>> out) const;

    /// Unnormalized backward transform (positive exponent).
    void backward(std::span<const std::complex<double>> in,
                  std::span<std::complex<double>> out) const;

private:
    struct Bluestein;

    void cooley_tukey(const std::complex<double>* in, std::complex<double>* out, std::size_t n,
                      std::size_t stride, std::size_t factor_index) const;

    std::size_t n_;
    std::vector<std::size_t> factors_;
    std::vector<std::complex<double>> twiddles_;  // exp(-2 pi i k / n_)
    std::unique_ptr<Bluestein> bluestein_;
};

}  // namespace gridscan::detail
