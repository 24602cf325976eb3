#include "gridscan/impedance_map.hpp"

#include "gridscan/errors.hpp"

#include <string>

namespace gridscan {

namespace {

constexpr Complex kJ{0.0, 1.0};

ImpedanceFrfEstimate make_estimate(std::size_t n, double sample_period) {
    if (n == 0 || n % 2 != 0)
        throw InvalidSpecError("impedance extraction needs an even, non-zero N (got " +
                               std::to_string(n) + ")");
    ImpedanceFrfEstimate z;
    const std::size_t h = n / 2;
    z.z_dd.resize(h);
    z.z_dq.resize(h);
    z.z_qd.resize(h);
    z.z_qq.resize(h);
    z.valid.assign(h, 1);
    z.n = n;
    z.sample_period = sample_period;
    return z;
}

}  // namespace

std::pair<Complex, Complex> impedance_to_complex_pair(const Matrix2c& Z) {
    const Complex gp = 0.5 * (Z(0, 0) + Z(1, 1) + kJ * (Z(1, 0) - Z(0, 1)));
    const Complex gm = 0.5 * (Z(0, 0) - Z(1, 1) + kJ * (Z(0, 1) + Z(1, 0)));
    return {gp, gm};
}

Matrix2c ImpedanceFrfEstimate::at(std::size_t k) const {
    Matrix2c m;
    m << z_dd[k], z_dq[k], z_qd[k], z_qq[k];
    return m;
}

double ImpedanceFrfEstimate::frequency_hz(std::size_t k) const {
    return static_cast<double>(k) / (static_cast<double>(n) * sample_period);
}

ImpedanceFrfEstimate complex_pair_to_impedance(std::span<const Complex> gplus,
                                               std::span<const Complex> gminus,
                                               double sample_period) {
    if (gplus.size() != gminus.size()) throw ShapeError("G+ and G- arrays differ in length");
    const std::size_t n = gplus.size();
    auto z = make_estimate(n, sample_period);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const std::size_t kb = (n - k) % n;
        const Complex a = gplus[k], ab = std::conj(gplus[kb]);
        const Complex b = gminus[k], bb = std::conj(gminus[kb]);
        z.z_dd[k] = 0.5 * (a + ab + b + bb);
        z.z_qq[k] = 0.5 * (a + ab - b - bb);
        z.z_dq[k] = -(a - ab - b + bb) / (2.0 * kJ);
        z.z_qd[k] = (a - ab + b - bb) / (2.0 * kJ);
    }
    return z;
}

ImpedanceFrfEstimate complex_pair_to_impedance(const ComplexTfEstimate& est) {
    auto z = complex_pair_to_impedance(est.gplus, est.gminus, est.sample_period);
    if (est.flags.size() == est.n) {
        for (std::size_t k = 0; k < z.size(); ++k)
            z.valid[k] = est.flags[k] == bin_ok && est.flags[(est.n - k) % est.n] == bin_ok;
    }
    return z;
}

ImpedanceFrfEstimate symmetric_complex_to_impedance(std::span<const Complex> g,
                                                    double sample_period) {
    const std::size_t n = g.size();
    auto z = make_estimate(n, sample_period);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const Complex a = g[k], ab = std::conj(g[(n - k) % n]);
        z.z_dd[k] = 0.5 * (a + ab);
        z.z_qd[k] = (a - ab) / (2.0 * kJ);
        z.z_qq[k] = z.z_dd[k];
        z.z_dq[k] = -z.z_qd[k];
    }
    return z;
}

ImpedanceFrfEstimate impedance_from_matrices(std::span<const Matrix2c> z, std::size_t n,
                                             double sample_period) {
    ImpedanceFrfEstimate out;
    out.n = n;
    out.sample_period = sample_period;
    out.valid.assign(z.size(), 1);
    for (const auto& m : z) {
        out.z_dd.push_back(m(0, 0));
        out.z_dq.push_back(m(0, 1));
        out.z_qd.push_back(m(1, 0));
        out.z_qq.push_back(m(1, 1));
    }
    return out;
}

}  // namespace gridscan
