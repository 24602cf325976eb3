#include "fft.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

namespace gridscan::detail {

namespace {

constexpr std::size_t kMaxDirectRadix = 31;

using cd = std::complex<double>;

std::vector<std::size_t> factorize(std::size_t n) {
    std::vector<std::size_t> f;
    while (n % 4 == 0) {
        f.push_back(4);
        n /= 4;
    }
    for (std::size_t p = 2; p * p <= n; ++p) {
        while (n % p == 0) {
            f.push_back(p);
            n /= p;
        }
    }
    if (n > 1) f.push_back(n);
    return f;
}

std::vector<cd> unit_roots(std::size_t n) {
    std::vector<cd> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        w[k] = {std::cos(ang), std::sin(ang)};
    }
    return w;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

}  // namespace

struct FftPlan::Bluestein {
    std::vector<cd> chirp;       // exp(-i pi k^2 / n), k < n
    std::vector<cd> kernel_fft;  // FFT of the conjugate chirp, zero padded to m
    std::unique_ptr<FftPlan> inner;
};

FftPlan::FftPlan(std::size_t n) : n_(n) {
    assert(n >= 1);
    factors_ = factorize(n);
    const bool small_factors =
        std::all_of(factors_.begin(), factors_.end(), [](std::size_t p) { return p <= kMaxDirectRadix; });
    if (small_factors) {
        twiddles_ = unit_roots(n);
        return;
    }

    bluestein_ = std::make_unique<Bluestein>();
    auto& b = *bluestein_;
    const std::size_t m = next_pow2(2 * n - 1);
    b.inner = std::make_unique<FftPlan>(m);
    b.chirp.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the phase argument small for large k
        const std::size_t k2 = static_cast<std::size_t>((static_cast<unsigned __int128>(k) * k) % (2 * n));
        const double ang = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
        b.chirp[k] = {std::cos(ang), std::sin(ang)};
    }
    std::vector<cd> kernel(m, cd{0.0, 0.0});
    kernel[0] = std::conj(b.chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
        kernel[k] = std::conj(b.chirp[k]);
        kernel[m - k] = std::conj(b.chirp[k]);
    }
    b.kernel_fft.resize(m);
    b.inner->forward(kernel, b.kernel_fft);
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

void FftPlan::cooley_tukey(const cd* in, cd* out, std::size_t n, std::size_t stride,
                           std::size_t factor_index) const {
    if (n == 1) {
        out[0] = in[0];
        return;
    }
    const std::size_t p = factors_[factor_index];
    const std::size_t m = n / p;
    for (std::size_t j = 0; j < p; ++j)
        cooley_tukey(in + j * stride, out + j * m, m, stride * p, factor_index + 1);

    const std::size_t tw_step = n_ / n;   // W_n^x = W_N^(x * tw_step)
    const std::size_t root_step = n_ / p; // W_p^x = W_N^(x * root_step)
    cd tmp[kMaxDirectRadix];
    for (std::size_t s = 0; s < m; ++s) {
        for (std::size_t j = 0; j < p; ++j)
            tmp[j] = out[j * m + s] * twiddles_[(j * s * tw_step) % n_];
        if (p == 2) {
            out[s] = tmp[0] + tmp[1];
            out[s + m] = tmp[0] - tmp[1];
        } else if (p == 4) {
            const cd a = tmp[0] + tmp[2], b = tmp[0] - tmp[2];
            const cd c = tmp[1] + tmp[3];
            const cd d = (tmp[1] - tmp[3]) * cd{0.0, -1.0};
            out[s] = a + c;
            out[s + m] = b + d;
            out[s + 2 * m] = a - c;
            out[s + 3 * m] = b - d;
        } else {
            for (std::size_t q = 0; q < p; ++q) {
                cd acc = tmp[0];
                for (std::size_t j = 1; j < p; ++j) acc += tmp[j] * twiddles_[((j * q) % p) * root_step];
                out[s + q * m] = acc;
            }
        }
    }
}

void FftPlan::forward(std::span<const cd> in, std::span<cd> out) const {
    assert(in.size() == n_ && out.size() == n_);
    if (!bluestein_) {
        if (in.data() == out.data()) {
            std::vector<cd> copy(in.begin(), in.end());
            cooley_tukey(copy.data(), out.data(), n_, 1, 0);
        } else {
            cooley_tukey(in.data(), out.data(), n_, 1, 0);
        }
        return;
    }

    const auto& b = *bluestein_;
    const std::size_t m = b.inner->size();
    std::vector<cd> a(m, cd{0.0, 0.0});
    for (std::size_t k = 0; k < n_; ++k) a[k] = in[k] * b.chirp[k];
    std::vector<cd> af(m);
    b.inner->forward(a, af);
    for (std::size_t k = 0; k < m; ++k) af[k] *= b.kernel_fft[k];
    b.inner->backward(af, a);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n_; ++k) out[k] = a[k] * b.chirp[k] * scale;
}

void FftPlan::backward(std::span<const cd> in, std::span<cd> out) const {
    std::vector<cd> tmp(in.size());
    for (std::size_t k = 0; k < in.size(); ++k) tmp[k] = std::conj(in[k]);
    forward(tmp, out);
    for (auto& v : out) v = std::conj(v);
}

}  // namespace gridscan::detail
