#pragma once

// Local parametric estimation of the complex transfer-function pair (G+, G-)
// from the DFT spectra of a single non-periodic record.

#include "gridscan/spectra.hpp"
#include "gridscan/types.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gridscan {

struct LpmConfig {
    int order_R = 4;
    int half_window_l = 18;
    bool assume_symmetric = false;
    bool assume_periodic = false;
    double rank_rel_tol = 1e-10;
    /// Spectral lines left out of every local fit (e.g. DC after mean removal).
    std::vector<std::size_t> excluded_bins;

    /// 4R+3, 3R+2 or 2R+1 depending on the flags.
    int unknown_count() const;
    /// Throws UnderdeterminedError if 2l+1 < unknown_count(), InvalidSpecError for R < 0.
    void validate() const;
    static int default_half_window(int order_R) { return 4 * order_R + 2; }
};

/// (k + r) mod N for r = -l..l.
std::vector<std::size_t> local_window_indices(std::size_t k, int l, std::size_t n);

struct LocalSystem {
    Eigen::VectorXcd Y;
    Eigen::MatrixXcd Phi;
};

/// Regressor row for offset r:
///   [V_{k+r} (r..r^R) | I_{k+r} (1..r^R) | conj(I_{(N-k-r) mod N}) (1..r^R) | (1..r^R)]
/// with the third block dropped for assume_symmetric and the last for assume_periodic.
/// Excluded bins remove their rows.
LocalSystem build_local_system(const Spectrum& V, const Spectrum& I, std::size_t k,
                               const LpmConfig& config);

struct LocalSolution {
    Eigen::VectorXcd theta;
    double residual_norm = 0.0;
    double condition_number = 0.0;
    int effective_rank = 0;
};

/// Column-normalized SVD pseudoinverse; singular values below rank_rel_tol * s_max are dropped.
LocalSolution solve_scaled_pinv(const Eigen::MatrixXcd& Phi, const Eigen::VectorXcd& Y,
                                double rank_rel_tol);

enum BinFlag : std::uint8_t {
    bin_ok = 0,
    bin_rank_deficient = 1,
    bin_underdetermined = 2,  // too few rows left after exclusions
};

struct ComplexTfEstimate {
    std::vector<Complex> gplus;
    std::vector<Complex> gminus;     // zeros when assume_symmetric
    std::vector<Complex> transient;  // zeros when assume_periodic
    std::vector<double> residual_norm;
    std::vector<double> condition_number;
    std::vector<int> effective_rank;
    std::vector<std::uint8_t> flags;
    std::size_t n = 0;
    double sample_period = 0.0;
    LpmConfig config;
};

/// Runs the local fit at every bin. threads <= 1 runs serially; any thread
/// count gives bit-identical results.
ComplexTfEstimate estimate_frf(const Spectrum& V, const Spectrum& I, const LpmConfig& config,
                               int threads = 1);

}  // namespace gridscan
