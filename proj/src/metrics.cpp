#include "gridscan/metrics.hpp"

#include "gridscan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace gridscan {

double fit_percent(std::span<const Complex> estimate, std::span<const Complex> truth) {
    if (estimate.size() != truth.size()) throw ShapeError("fit_percent: length mismatch");
    if (truth.size() < 2) throw InvalidSpecError("fit_percent needs at least 2 points");
    Complex mean{};
    for (const auto& t : truth) mean += t;
    mean /= static_cast<double>(truth.size());
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        num += std::norm(estimate[k] - truth[k]);
        den += std::norm(truth[k] - mean);
    }
    if (!(den > 0.0)) throw InvalidSpecError("fit_percent: truth is constant");
    return (1.0 - num / den) * 100.0;
}

double sigma_max_2x2(const Matrix2c& M) {
    const double f2 = M.squaredNorm();
    const double det2 = std::norm(M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0));
    const double disc = std::max(0.0, f2 * f2 - 4.0 * det2);
    return std::sqrt(0.5 * (f2 + std::sqrt(disc)));
}

double relative_hinf_error(std::span<const Matrix2c> estimates, std::span<const Matrix2c> truths) {
    if (estimates.size() != truths.size()) throw ShapeError("relative_hinf_error: length mismatch");
    if (truths.empty()) throw InvalidSpecError("relative_hinf_error needs at least one bin");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < truths.size(); ++k) {
        num = std::max(num, sigma_max_2x2(estimates[k] - truths[k]));
        den = std::max(den, sigma_max_2x2(truths[k]));
    }
    if (!(den > 0.0)) throw InvalidSpecError("relative_hinf_error: truth is identically zero");
    return num / den;
}

BinRange select_band(std::size_t n, double sample_period, std::size_t available,
                     const BandSelection& band) {
    const double nyquist = 0.5 / sample_period;
    if (!(band.f_min >= 0.0) || !(band.f_min < band.f_max) || band.f_max > nyquist * (1 + 1e-12))
        throw InvalidSpecError("band must satisfy 0 <= f_min < f_max <= Nyquist");
    if (available == 0) throw InvalidSpecError("no bins available for band selection");
    const double scale = static_cast<double>(n) * sample_period;
    const double lo = std::nearbyint(band.f_min * scale);
    const double hi = std::nearbyint(band.f_max * scale);
    BinRange r;
    r.first = static_cast<std::size_t>(lo);
    r.last = std::min(static_cast<std::size_t>(hi), available - 1);
    if (r.first > r.last) throw InvalidSpecError("band selects no bins");
    return r;
}

BinRange select_band(const ImpedanceFrfEstimate& frf, const BandSelection& band) {
    return select_band(frf.n, frf.sample_period, frf.size(), band);
}

AccuracyReport evaluate_band(const ImpedanceFrfEstimate& estimate,
                             const ImpedanceFrfEstimate& truth, const BandSelection& band) {
    if (std::abs(estimate.sample_period - truth.sample_period) >
        1e-12 * std::max(estimate.sample_period, truth.sample_period))
        throw ShapeError("estimate and truth use different sample periods");
    if (estimate.n == 0 || truth.n % estimate.n != 0)
        throw ShapeError("estimate grid (N = " + std::to_string(estimate.n) +
                         ") does not align with truth grid (N = " + std::to_string(truth.n) + ")");
    const std::size_t ratio = truth.n / estimate.n;
    const BinRange r = select_band(estimate, band);
    if (r.last * ratio >= truth.size())
        throw ShapeError("truth FRF does not cover the requested band");

    std::vector<Complex> e[4], t[4];
    std::vector<Matrix2c> em, tm;
    for (std::size_t k = r.first; k <= r.last; ++k) {
        const std::size_t j = k * ratio;
        const Matrix2c me = estimate.at(k), mt = truth.at(j);
        em.push_back(me);
        tm.push_back(mt);
        for (int c = 0; c < 4; ++c) {
            e[c].push_back(me(c / 2, c % 2));
            t[c].push_back(mt(c / 2, c % 2));
        }
    }
    AccuracyReport rep;
    rep.fit_dd = fit_percent(e[0], t[0]);
    rep.fit_dq = fit_percent(e[1], t[1]);
    rep.fit_qd = fit_percent(e[2], t[2]);
    rep.fit_qq = fit_percent(e[3], t[3]);
    rep.rel_hinf = relative_hinf_error(em, tm);
    rep.bins = r.count();
    return rep;
}

}  // namespace gridscan
