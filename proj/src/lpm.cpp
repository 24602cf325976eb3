#include "gridscan/lpm.hpp"

#include "gridscan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace gridscan {

int LpmConfig::unknown_count() const {
    const int flags = (assume_symmetric ? 1 : 0) + (assume_periodic ? 1 : 0);
    return (4 - flags) * order_R + (3 - flags);
}

void LpmConfig::validate() const {
    if (order_R < 0) throw InvalidSpecError("LPM order R must be >= 0");
    if (half_window_l < 0) throw InvalidSpecError("LPM half window must be >= 0");
    if (!(rank_rel_tol > 0.0)) throw InvalidSpecError("rank_rel_tol must be > 0");
    if (2 * half_window_l + 1 < unknown_count())
        throw UnderdeterminedError("local window of " + std::to_string(2 * half_window_l + 1) +
                                   " lines cannot determine " + std::to_string(unknown_count()) +
                                   " unknowns (R = " + std::to_string(order_R) +
                                   ", l = " + std::to_string(half_window_l) + ")");
}

std::vector<std::size_t> local_window_indices(std::size_t k, int l, std::size_t n) {
    if (l < 0) throw InvalidSpecError("half window must be >= 0");
    if (2 * static_cast<std::size_t>(l) + 1 > n)
        throw InvalidSpecError("local window of " + std::to_string(2 * l + 1) +
                               " lines exceeds the spectrum length " + std::to_string(n));
    if (k >= n) throw InvalidSpecError("bin index out of range");
    std::vector<std::size_t> idx;
    idx.reserve(2 * static_cast<std::size_t>(l) + 1);
    const auto N = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t r = -l; r <= l; ++r)
        idx.push_back(static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(k) + r) % N + N) % N));
    return idx;
}

namespace {

LocalSystem build_rows(const Spectrum& V, const Spectrum& I, std::size_t k,
                       const LpmConfig& config, const std::vector<char>& excluded) {
    const std::size_t n = V.size();
    const int R = config.order_R;
    const int l = config.half_window_l;
    const auto window = local_window_indices(k, l, n);

    int rows = 0;
    for (std::size_t b : window) rows += excluded.empty() || !excluded[b];
    const int cols = config.unknown_count();

    LocalSystem sys{Eigen::VectorXcd(rows), Eigen::MatrixXcd(rows, cols)};
    std::vector<double> pw(static_cast<std::size_t>(R) + 1);
    int row = 0;
    for (int r = -l; r <= l; ++r) {
        const std::size_t bin = window[static_cast<std::size_t>(r + l)];
        if (!excluded.empty() && excluded[bin]) continue;
        pw[0] = 1.0;
        for (int m = 1; m <= R; ++m) pw[m] = pw[m - 1] * r;

        const Complex v = V.values[bin];
        const Complex ip = I.values[bin];
        const Complex im = std::conj(I.values[(n - bin) % n]);
        sys.Y(row) = v;
        int c = 0;
        for (int m = 1; m <= R; ++m) sys.Phi(row, c++) = v * pw[m];
        for (int m = 0; m <= R; ++m) sys.Phi(row, c++) = ip * pw[m];
        if (!config.assume_symmetric)
            for (int m = 0; m <= R; ++m) sys.Phi(row, c++) = im * pw[m];
        if (!config.assume_periodic)
            for (int m = 0; m <= R; ++m) sys.Phi(row, c++) = Complex(pw[m], 0.0);
        ++row;
    }
    return sys;
}

std::vector<char> exclusion_mask(const LpmConfig& config, std::size_t n) {
    if (config.excluded_bins.empty()) return {};
    std::vector<char> mask(n, 0);
    for (std::size_t b : config.excluded_bins) {
        if (b >= n) throw InvalidSpecError("excluded bin " + std::to_string(b) + " out of range");
        mask[b] = 1;
    }
    return mask;
}

void check_spectra(const Spectrum& V, const Spectrum& I) {
    if (V.size() != I.size())
        throw ShapeError("voltage and current spectra differ in length (" +
                         std::to_string(V.size()) + " vs " + std::to_string(I.size()) + ")");
    if (V.values.empty()) throw InvalidSpecError("empty spectrum");
}

}  // namespace

LocalSystem build_local_system(const Spectrum& V, const Spectrum& I, std::size_t k,
                               const LpmConfig& config) {
    config.validate();
    check_spectra(V, I);
    return build_rows(V, I, k, config, exclusion_mask(config, V.size()));
}

LocalSolution solve_scaled_pinv(const Eigen::MatrixXcd& Phi, const Eigen::VectorXcd& Y,
                                double rank_rel_tol) {
    if (Phi.rows() != Y.size()) throw ShapeError("regressor rows and data length differ");
    const Eigen::Index cols = Phi.cols();

    Eigen::VectorXd scale(cols);
    Eigen::MatrixXcd Ps = Phi;
    for (Eigen::Index c = 0; c < cols; ++c) {
        const double s = Phi.col(c).norm();
        scale(c) = s > 0.0 ? s : 1.0;
        Ps.col(c) /= scale(c);
    }

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(Ps, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    LocalSolution sol;
    sol.theta = Eigen::VectorXcd::Zero(cols);
    if (sv.size() == 0 || !(sv(0) > 0.0)) {
        sol.residual_norm = Y.norm();
        sol.condition_number = std::numeric_limits<double>::infinity();
        return sol;
    }
    const double cutoff = rank_rel_tol * sv(0);
    int rank = 0;
    while (rank < sv.size() && sv(rank) >= cutoff) ++rank;

    const Eigen::VectorXcd uty =
        (svd.matrixU().leftCols(rank).adjoint() * Y).cwiseQuotient(sv.head(rank).cast<Complex>());
    const Eigen::VectorXcd theta_s = svd.matrixV().leftCols(rank) * uty;
    sol.theta = theta_s.cwiseQuotient(scale.cast<Complex>());
    sol.residual_norm = (Y - Ps * theta_s).norm();
    sol.condition_number = sv(0) / sv(rank - 1);
    sol.effective_rank = rank;
    return sol;
}

ComplexTfEstimate estimate_frf(const Spectrum& V, const Spectrum& I, const LpmConfig& config,
                               int threads) {
    config.validate();
    check_spectra(V, I);
    const std::size_t n = V.size();
    if (2 * static_cast<std::size_t>(config.half_window_l) + 1 > n)
        throw InvalidSpecError("local window exceeds the spectrum length");
    const auto excluded = exclusion_mask(config, n);
    const int R = config.order_R;
    const int cols = config.unknown_count();
    const Eigen::Index i_gplus = R;
    const Eigen::Index i_gminus = config.assume_symmetric ? -1 : 2 * R + 1;
    const Eigen::Index i_trans =
        config.assume_periodic ? -1 : (config.assume_symmetric ? 2 * R + 1 : 3 * R + 2);

    ComplexTfEstimate est;
    est.gplus.assign(n, Complex{});
    est.gminus.assign(n, Complex{});
    est.transient.assign(n, Complex{});
    est.residual_norm.assign(n, 0.0);
    est.condition_number.assign(n, 0.0);
    est.effective_rank.assign(n, 0);
    est.flags.assign(n, bin_ok);
    est.n = n;
    est.sample_period = V.sample_period;
    est.config = config;

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const LocalSystem sys = build_rows(V, I, k, config, excluded);
            const LocalSolution sol = solve_scaled_pinv(sys.Phi, sys.Y, config.rank_rel_tol);
            est.gplus[k] = sol.theta(i_gplus);
            if (i_gminus >= 0) est.gminus[k] = sol.theta(i_gminus);
            if (i_trans >= 0) est.transient[k] = sol.theta(i_trans);
            est.residual_norm[k] = sol.residual_norm;
            est.condition_number[k] = sol.condition_number;
            est.effective_rank[k] = sol.effective_rank;
            std::uint8_t f = bin_ok;
            if (sys.Phi.rows() < cols) f |= bin_underdetermined;
            if (sol.effective_rank < cols) f |= bin_rank_deficient;
            est.flags[k] = f;
        }
    };

    const std::size_t workers =
        std::clamp<std::size_t>(threads < 1 ? 1 : static_cast<std::size_t>(threads), 1, n);
    if (workers == 1) {
        run_range(0, n);
        return est;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back(run_range, b, e);
    }
    for (auto& t : pool) t.join();
    return est;
}

}  // namespace gridscan
