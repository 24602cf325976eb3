#pragma once

// Conversions between the 2x2 real dq impedance and the complex pair (G+, G-).

#include "gridscan/lpm.hpp"
#include "gridscan/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace gridscan {

/// G+ = (Zdd + Zqq + j(Zqd - Zdq)) / 2,  G- = (Zdd - Zqq + j(Zdq + Zqd)) / 2.
std::pair<Complex, Complex> impedance_to_complex_pair(const Matrix2c& Z);

/// Bins k = 0..N/2-1 of the 2x2 FRF.
struct ImpedanceFrfEstimate {
    std::vector<Complex> z_dd, z_dq, z_qd, z_qq;
    std::vector<std::uint8_t> valid;  // 1 when both contributing bins were fit cleanly
    std::size_t n = 0;                // length of the source spectrum
    double sample_period = 0.0;

    std::size_t size() const { return z_dd.size(); }
    Matrix2c at(std::size_t k) const;
    double frequency_hz(std::size_t k) const;
};

/// Reads the conjugate partner from bin (N - k) mod N. Throws InvalidSpecError for odd N.
ImpedanceFrfEstimate complex_pair_to_impedance(std::span<const Complex> gplus,
                                               std::span<const Complex> gminus,
                                               double sample_period);
ImpedanceFrfEstimate complex_pair_to_impedance(const ComplexTfEstimate& est);

/// Symmetric special case (G- = 0): z_qq = z_dd, z_dq = -z_qd.
ImpedanceFrfEstimate symmetric_complex_to_impedance(std::span<const Complex> g,
                                                    double sample_period);

/// Packs per-bin matrices (k = 0..size-1) into the four arrays.
ImpedanceFrfEstimate impedance_from_matrices(std::span<const Matrix2c> z, std::size_t n,
                                             double sample_period);

}  // namespace gridscan
