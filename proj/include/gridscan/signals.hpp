#pragma once

// Time-domain signal plumbing: excitation generation, Park transform,
// mean removal and complex dq packing.

#include "gridscan/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gridscan {

/// Uniformly sampled real channel in per-unit.
struct RealTimeSeries {
    std::vector<double> samples;
    double sample_period = 0.0;  // seconds
    std::string channel_label;

    std::size_t size() const { return samples.size(); }
};

/// Uniformly sampled complex dq signal, samples[n] = d[n] + j q[n].
struct DqTimeSeries {
    std::vector<Complex> samples;
    double sample_period = 0.0;  // seconds

    std::size_t size() const { return samples.size(); }
};

/// Parameters of a random binary excitation for both dq channels.
struct ExcitationSpec {
    double amplitude = 0.05;  // p.u.
    std::size_t duration_samples = 0;
    std::uint64_t seed = 1;
    std::uint64_t seed_d = 0;  // 0: derived from seed
    std::uint64_t seed_q = 0;  // 0: derived from seed

    /// Channel seeds after derivation; always distinct.
    std::pair<std::uint64_t, std::uint64_t> channel_seeds() const;
    void validate() const;
};

/// Throws InvalidSpecError unless sample_period > 0 and the series is non-empty.
void check_series(const RealTimeSeries& s, const char* what);
void check_series(const DqTimeSeries& s, const char* what);

/// Sample-and-hold random binary sequence with alphabet {-a, +a}, one draw per
/// sample from a seeded 64-bit Mersenne twister.
RealTimeSeries generate_rbs(std::size_t n, double amplitude, std::uint64_t seed,
                            double sample_period, std::string label = "rbs");

/// Independent d and q RBS channels packed as a complex excitation.
DqTimeSeries generate_dq_rbs(const ExcitationSpec& spec, double sample_period);

/// Amplitude-invariant Park transform with angle theta(t_n) = omega_g * n * Ts + theta0.
///   d =  2/3 [a cos(th) + b cos(th - 2pi/3) + c cos(th + 2pi/3)]
///   q = -2/3 [a sin(th) + b sin(th - 2pi/3) + c sin(th + 2pi/3)]
std::pair<RealTimeSeries, RealTimeSeries> abc_to_dq(const RealTimeSeries& a,
                                                    const RealTimeSeries& b,
                                                    const RealTimeSeries& c,
                                                    double omega_g, double theta0);

struct AbcSeries {
    RealTimeSeries a, b, c;
};

/// Inverse of abc_to_dq for zero-sequence-free signals.
AbcSeries dq_to_abc(const RealTimeSeries& d, const RealTimeSeries& q, double omega_g,
                    double theta0);

Complex mean(std::span<const Complex> x);

DqTimeSeries remove_mean(const DqTimeSeries& series);

DqTimeSeries pack_complex(const RealTimeSeries& d, const RealTimeSeries& q);
std::pair<RealTimeSeries, RealTimeSeries> unpack_complex(const DqTimeSeries& s);

}  // namespace gridscan
