#include "gridscan/baselines.hpp"

#include "gridscan/errors.hpp"
#include "gridscan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gridscan {

namespace {

constexpr double kMaxCondition = 1e12;

// 1 / condition number of a 2x2 matrix (0 when singular).
double inverse_condition(const Matrix2c& M) {
    const double smax = sigma_max_2x2(M);
    if (!(smax > 0.0)) return 0.0;
    const double smin = std::abs(M.determinant()) / smax;
    return smin / smax;
}

Spectrum real_channel_spectrum(const std::vector<double>& x, double sample_period) {
    DqTimeSeries s;
    s.sample_period = sample_period;
    s.samples.reserve(x.size());
    for (double v : x) s.samples.emplace_back(v, 0.0);
    return dft(s);
}

struct ChannelSpectra {
    Spectrum d, q;
};

ChannelSpectra windowed_spectra(const DqTimeSeries& x, WindowKind window) {
    const auto w = apply_window(x, window);
    auto [d, q] = unpack_complex(w);
    return {real_channel_spectrum(d.samples, x.sample_period),
            real_channel_spectrum(q.samples, x.sample_period)};
}

void check_pair(const DqTimeSeries& a, const DqTimeSeries& b, const char* what) {
    check_series(a, what);
    check_series(b, what);
    if (a.size() != b.size() || a.sample_period != b.sample_period)
        throw ShapeError(std::string(what) + ": series differ in length or sample period");
}

}  // namespace

EtfeResult etfe(const Spectrum& V, const Spectrum& I, double floor_rel) {
    if (V.size() != I.size()) throw ShapeError("etfe: spectra differ in length");
    double imax = 0.0;
    for (const auto& v : I.values) imax = std::max(imax, std::abs(v));
    const double floor = floor_rel * imax;
    EtfeResult out;
    out.values.assign(V.size(), Complex{});
    out.valid.assign(V.size(), 0);
    for (std::size_t k = 0; k < V.size(); ++k) {
        if (std::abs(I.values[k]) > floor && std::abs(I.values[k]) > 0.0) {
            out.values[k] = V.values[k] / I.values[k];
            out.valid[k] = 1;
        }
    }
    return out;
}

ImpedanceFrfEstimate sequential_perturbation_estimate(const Experiment& exp1,
                                                      const Experiment& exp2, WindowKind window) {
    check_pair(exp1.voltage, exp1.current, "sequential perturbation");
    check_pair(exp2.voltage, exp2.current, "sequential perturbation");
    check_pair(exp1.voltage, exp2.voltage, "sequential perturbation");
    const std::size_t n = exp1.voltage.size();
    if (n % 2 != 0) throw InvalidSpecError("sequential perturbation needs an even record length");

    const auto v1 = windowed_spectra(exp1.voltage, window);
    const auto i1 = windowed_spectra(exp1.current, window);
    const auto v2 = windowed_spectra(exp2.voltage, window);
    const auto i2 = windowed_spectra(exp2.current, window);

    const std::size_t h = n / 2;
    std::vector<Matrix2c> z(h, Matrix2c::Zero());
    std::vector<std::uint8_t> valid(h, 0);
    for (std::size_t k = 0; k < h; ++k) {
        Matrix2c U, Y;
        U << i1.d.values[k], i2.d.values[k], i1.q.values[k], i2.q.values[k];
        Y << v1.d.values[k], v2.d.values[k], v1.q.values[k], v2.q.values[k];
        if (inverse_condition(U) * kMaxCondition < 1.0) continue;
        z[k] = Y * U.inverse();
        valid[k] = 1;
    }
    auto out = impedance_from_matrices(z, n, exp1.voltage.sample_period);
    out.valid = std::move(valid);
    return out;
}

ImpedanceFrfEstimate sequential_perturbation_split(const DqTimeSeries& voltage,
                                                   const DqTimeSeries& current,
                                                   WindowKind window) {
    check_pair(voltage, current, "sequential perturbation");
    const std::size_t h = voltage.size() / 2;
    if (h < 2) throw InvalidSpecError("record too short to split into two experiments");
    auto half = [&](const DqTimeSeries& s, std::size_t off) {
        DqTimeSeries out;
        out.sample_period = s.sample_period;
        out.samples.assign(s.samples.begin() + static_cast<std::ptrdiff_t>(off),
                           s.samples.begin() + static_cast<std::ptrdiff_t>(off + h));
        return out;
    };
    return sequential_perturbation_estimate({half(voltage, 0), half(current, 0)},
                                            {half(voltage, h), half(current, h)}, window);
}

bool ArxModel::is_stable() const {
    if (na == 0) return true;
    const Eigen::Index n = 2 * na;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int m = 0; m < na; ++m) comp.block(0, 2 * m, 2, 2) = -A_coeffs[static_cast<std::size_t>(m)];
    if (na > 1) comp.block(2, 0, n - 2, n - 2).setIdentity();
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(es.eigenvalues()[i]) >= 1.0) return false;
    return true;
}

ArxModel arx_fit(const RealTimeSeries& u_d, const RealTimeSeries& u_q, const RealTimeSeries& y_d,
                 const RealTimeSeries& y_q, int na, int nb) {
    if (na < 0 || nb < 0 || na + nb == 0) throw InvalidSpecError("ARX orders must be >= 0, not both 0");
    const RealTimeSeries* all[] = {&u_d, &u_q, &y_d, &y_q};
    for (const auto* s : all) check_series(*s, "arx_fit");
    for (const auto* s : all)
        if (s->size() != u_d.size() || s->sample_period != u_d.sample_period)
            throw ShapeError("arx_fit: channels differ in length or sample period");
    const int lag = std::max(na, nb);
    const std::size_t N = u_d.size();
    if (N <= static_cast<std::size_t>(lag) + 10)
        throw InvalidSpecError("arx_fit: record too short for the requested orders");

    const Eigen::Index rows = static_cast<Eigen::Index>(N) - lag;
    const Eigen::Index cols = 2 * (na + nb);
    Eigen::MatrixXd X(rows, cols);
    Eigen::MatrixXd T(rows, 2);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t n = static_cast<std::size_t>(r + lag);
        Eigen::Index c = 0;
        for (int m = 1; m <= na; ++m) {
            X(r, c++) = -y_d.samples[n - m];
            X(r, c++) = -y_q.samples[n - m];
        }
        for (int m = 1; m <= nb; ++m) {
            X(r, c++) = u_d.samples[n - m];
            X(r, c++) = u_q.samples[n - m];
        }
        T(r, 0) = y_d.samples[n];
        T(r, 1) = y_q.samples[n];
    }

    // Identically zero regressors (e.g. y = 0) carry no information; their
    // coefficients are fixed at zero and only the remaining columns are solved.
    std::vector<Eigen::Index> live;
    for (Eigen::Index c = 0; c < cols; ++c)
        if (X.col(c).cwiseAbs().maxCoeff() > 0.0) live.push_back(c);

    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(cols, 2);
    if (!live.empty()) {
        Eigen::MatrixXd Xl(rows, static_cast<Eigen::Index>(live.size()));
        for (std::size_t i = 0; i < live.size(); ++i) Xl.col(static_cast<Eigen::Index>(i)) = X.col(live[i]);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xl);
        if (qr.rank() < Xl.cols())
            throw RankDeficientError("ARX regression is rank deficient: rank " +
                                     std::to_string(qr.rank()) + " of " +
                                     std::to_string(Xl.cols()) + " regressors");
        const Eigen::MatrixXd sol = qr.solve(T);
        for (std::size_t i = 0; i < live.size(); ++i) theta.row(live[i]) = sol.row(static_cast<Eigen::Index>(i));
    }

    ArxModel model;
    model.na = na;
    model.nb = nb;
    model.sample_period = u_d.sample_period;
    for (int m = 0; m < na; ++m) model.A_coeffs.push_back(theta.block(2 * m, 0, 2, 2).transpose());
    for (int m = 0; m < nb; ++m)
        model.B_coeffs.push_back(theta.block(2 * (na + m), 0, 2, 2).transpose());
    return model;
}

ArxModel arx_fit(const DqTimeSeries& u, const DqTimeSeries& y, int order) {
    auto [ud, uq] = unpack_complex(u);
    auto [yd, yq] = unpack_complex(y);
    return arx_fit(ud, uq, yd, yq, order, order);
}

ArxFrf arx_frf(const ArxModel& model, std::span<const double> omegas) {
    if (!(model.sample_period > 0.0)) throw InvalidSpecError("ARX model has no sample period");
    const double nyquist = std::acos(-1.0) / model.sample_period;
    ArxFrf out;
    out.values.reserve(omegas.size());
    out.valid.reserve(omegas.size());
    for (double w : omegas) {
        if (std::abs(w) > nyquist * (1.0 + 1e-12))
            throw InvalidSpecError("arx_frf: frequency above Nyquist");
        const Complex zinv = std::polar(1.0, -w * model.sample_period);
        Matrix2c A = Matrix2c::Identity(), B = Matrix2c::Zero();
        Complex zp = 1.0;
        for (int m = 0; m < std::max(model.na, model.nb); ++m) {
            zp *= zinv;
            if (m < model.na) A += model.A_coeffs[static_cast<std::size_t>(m)].cast<Complex>() * zp;
            if (m < model.nb) B += model.B_coeffs[static_cast<std::size_t>(m)].cast<Complex>() * zp;
        }
        if (inverse_condition(A) * kMaxCondition < 1.0) {
            out.values.push_back(Matrix2c::Zero());
            out.valid.push_back(0);
            continue;
        }
        out.values.push_back(A.inverse() * B);
        out.valid.push_back(1);
    }
    return out;
}

}  // namespace gridscan
