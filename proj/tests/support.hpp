#pragma once

#include "gridscan/grid.hpp"
#include "gridscan/signals.hpp"
#include "gridscan/spectra.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace testsupport {

using gridscan::Complex;

inline std::vector<Complex> random_complex(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<Complex> x(n);
    for (auto& v : x) v = {nd(gen), nd(gen)};
    return x;
}

inline gridscan::DqTimeSeries series(std::vector<Complex> x, double ts = 1e-4) {
    return {std::move(x), ts};
}

// Textbook O(N^2) sum with the 1/sqrt(N) scaling.
inline std::vector<Complex> direct_dft(const std::vector<Complex>& x) {
    const std::size_t n = x.size();
    std::vector<Complex> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc{};
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * m) % n) /
                               static_cast<double>(n);
            acc += x[m] * Complex(std::cos(ang), std::sin(ang));
        }
        out[k] = acc / std::sqrt(static_cast<double>(n));
    }
    return out;
}

inline double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const std::vector<Complex>& a) {
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
}

// Frequency response of the zero-order-hold sampled grid, C (zI - Ad)^{-1} Bd + D at z = e^{j w Ts}.
inline std::vector<gridscan::Matrix2c> zoh_frf(const gridscan::StateSpaceGrid& g, double ts,
                                               const std::vector<double>& omegas) {
    const Eigen::Index n = g.order();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 2, n + 2);
    M.topLeftCorner(n, n) = g.A * ts;
    M.topRightCorner(n, 2) = g.B * ts;
    const Eigen::MatrixXd E = M.exp();
    const Eigen::MatrixXcd Ad = E.topLeftCorner(n, n).cast<Complex>();
    const Eigen::MatrixXcd Bd = E.topRightCorner(n, 2).cast<Complex>();
    std::vector<gridscan::Matrix2c> out;
    for (double w : omegas) {
        Eigen::MatrixXcd zI = Eigen::MatrixXcd::Identity(n, n) * std::polar(1.0, w * ts);
        out.push_back(g.C.cast<Complex>() * (zI - Ad).partialPivLu().solve(Bd) +
                      g.D.cast<Complex>());
    }
    return out;
}

// Repeats one period `periods` times.
inline gridscan::DqTimeSeries repeat(const gridscan::DqTimeSeries& one, int periods) {
    gridscan::DqTimeSeries out{{}, one.sample_period};
    for (int p = 0; p < periods; ++p)
        out.samples.insert(out.samples.end(), one.samples.begin(), one.samples.end());
    return out;
}

inline gridscan::DqTimeSeries tail(const gridscan::DqTimeSeries& x, std::size_t n) {
    return {{x.samples.end() - static_cast<std::ptrdiff_t>(n), x.samples.end()}, x.sample_period};
}

// Noise-free spectra built directly from the spectral input-output relation
// with a real-rational 2x2 truth Z(s) = N(s)/d(s), deg N <= R, deg d = R, and
// an optional transient c(s)/d(s) sharing the denominator.
struct RationalCase {
    gridscan::Spectrum V, I;
    std::vector<Complex> gplus, gminus, transient;
    std::vector<gridscan::Matrix2c> z;  // truth at the signed bin frequencies
};

inline RationalCase make_rational_case(std::size_t n, int R, std::uint64_t seed, bool with_transient,
                                       double ts = 1e-4) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0), mag(0.2, 3.0), damp(0.05, 0.5);
    const double s_unit = 2.0 * std::numbers::pi * 1000.0;

    std::vector<Complex> roots;
    while (static_cast<int>(roots.size()) + 2 <= R) {
        const double w = mag(gen), z = damp(gen);
        roots.emplace_back(-z * w, w);
        roots.emplace_back(-z * w, -w);
    }
    if (static_cast<int>(roots.size()) < R) roots.emplace_back(-mag(gen), 0.0);

    std::array<std::vector<double>, 4> num;
    for (auto& p : num) {
        p.resize(static_cast<std::size_t>(R) + 1);
        for (auto& c : p) c = u(gen);
    }
    std::vector<Complex> cnum(static_cast<std::size_t>(R) + 1);
    for (auto& c : cnum) c = {u(gen), u(gen)};

    auto poly = [](const auto& coeffs, Complex s) {
        Complex acc{};
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + Complex(*it);
        return acc;
    };

    RationalCase out;
    out.I.values = random_complex(n, seed ^ 0x5eedULL);
    out.I.sample_period = ts;
    out.V.values.assign(n, Complex{});
    out.V.sample_period = ts;
    out.gplus.resize(n);
    out.gminus.resize(n);
    out.transient.assign(n, Complex{});
    out.z.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Complex s(0.0, gridscan::signed_bin_frequency(k, n, ts) / s_unit);
        Complex d = 1.0;
        for (const auto& r : roots) d *= s - r;
        gridscan::Matrix2c z;
        z << poly(num[0], s), poly(num[1], s), poly(num[2], s), poly(num[3], s);
        z /= d;
        out.z[k] = z;
        const Complex gp = 0.5 * (z(0, 0) + z(1, 1) + Complex(0, 1) * (z(1, 0) - z(0, 1)));
        const Complex gm = 0.5 * (z(0, 0) - z(1, 1) + Complex(0, 1) * (z(0, 1) + z(1, 0)));
        out.gplus[k] = gp;
        out.gminus[k] = gm;
        if (with_transient) out.transient[k] = poly(cnum, s) / d;
    }
    for (std::size_t k = 0; k < n; ++k)
        out.V.values[k] = out.gplus[k] * out.I.values[k] +
                          out.gminus[k] * std::conj(out.I.values[(n - k) % n]) + out.transient[k];
    return out;
}

// Bins whose local window crosses the Nyquist line, where the signed frequency jumps.
inline bool window_crosses_nyquist(std::size_t k, int l, std::size_t n) {
    const auto d = static_cast<long>(k) - static_cast<long>(n / 2);
    return d >= 1 - l && d <= l;
}

}  // namespace testsupport
