#include "gridscan/signals.hpp"

#include "gridscan/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace gridscan {

namespace {

// splitmix64 finalizer, used to derive independent stream seeds from one seed.
std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

void check_same_shape(const RealTimeSeries& x, const RealTimeSeries& y) {
    if (x.size() != y.size())
        throw ShapeError("series '" + x.channel_label + "' and '" + y.channel_label +
                         "' differ in length (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
    if (x.sample_period != y.sample_period)
        throw ShapeError("series '" + x.channel_label + "' and '" + y.channel_label +
                         "' differ in sample period");
}

}  // namespace

std::pair<std::uint64_t, std::uint64_t> ExcitationSpec::channel_seeds() const {
    std::uint64_t sd = seed_d != 0 ? seed_d : mix_seed(seed);
    std::uint64_t sq = seed_q != 0 ? seed_q : mix_seed(sd ^ 0xD1B54A32D192ED03ull);
    return {sd, sq};
}

void ExcitationSpec::validate() const {
    if (!(amplitude > 0.0)) throw InvalidSpecError("excitation amplitude must be > 0");
    if (duration_samples < 1) throw InvalidSpecError("excitation duration must be >= 1 sample");
    auto [sd, sq] = channel_seeds();
    if (sd == sq) throw InvalidSpecError("d and q excitation channels need distinct seeds");
}

void check_series(const RealTimeSeries& s, const char* what) {
    if (s.samples.empty()) throw InvalidSpecError(std::string(what) + ": empty series");
    if (!(s.sample_period > 0.0))
        throw InvalidSpecError(std::string(what) + ": sample period must be > 0");
}

void check_series(const DqTimeSeries& s, const char* what) {
    if (s.samples.empty()) throw InvalidSpecError(std::string(what) + ": empty series");
    if (!(s.sample_period > 0.0))
        throw InvalidSpecError(std::string(what) + ": sample period must be > 0");
}

RealTimeSeries generate_rbs(std::size_t n, double amplitude, std::uint64_t seed,
                            double sample_period, std::string label) {
    if (!(amplitude > 0.0)) throw InvalidSpecError("RBS amplitude must be > 0");
    if (n == 0) throw InvalidSpecError("RBS length must be >= 1");
    if (!(sample_period > 0.0)) throw InvalidSpecError("RBS sample period must be > 0");

    std::mt19937_64 gen(seed);
    RealTimeSeries out{std::vector<double>(n), sample_period, std::move(label)};
    for (auto& x : out.samples) x = (gen() >> 63) ? amplitude : -amplitude;
    return out;
}

DqTimeSeries generate_dq_rbs(const ExcitationSpec& spec, double sample_period) {
    spec.validate();
    auto [sd, sq] = spec.channel_seeds();
    auto d = generate_rbs(spec.duration_samples, spec.amplitude, sd, sample_period, "rbs_d");
    auto q = generate_rbs(spec.duration_samples, spec.amplitude, sq, sample_period, "rbs_q");
    return pack_complex(d, q);
}

std::pair<RealTimeSeries, RealTimeSeries> abc_to_dq(const RealTimeSeries& a,
                                                    const RealTimeSeries& b,
                                                    const RealTimeSeries& c,
                                                    double omega_g, double theta0) {
    check_series(a, "abc_to_dq");
    check_same_shape(a, b);
    check_same_shape(a, c);

    constexpr double shift = 2.0 * std::numbers::pi / 3.0;
    const std::size_t n = a.size();
    RealTimeSeries d{std::vector<double>(n), a.sample_period, "d"};
    RealTimeSeries q{std::vector<double>(n), a.sample_period, "q"};
    for (std::size_t i = 0; i < n; ++i) {
        const double th = omega_g * static_cast<double>(i) * a.sample_period + theta0;
        const double va = a.samples[i], vb = b.samples[i], vc = c.samples[i];
        d.samples[i] = (2.0 / 3.0) *
                       (va * std::cos(th) + vb * std::cos(th - shift) + vc * std::cos(th + shift));
        q.samples[i] = -(2.0 / 3.0) *
                       (va * std::sin(th) + vb * std::sin(th - shift) + vc * std::sin(th + shift));
    }
    return {std::move(d), std::move(q)};
}

AbcSeries dq_to_abc(const RealTimeSeries& d, const RealTimeSeries& q, double omega_g,
                    double theta0) {
    check_series(d, "dq_to_abc");
    check_same_shape(d, q);

    constexpr double shift = 2.0 * std::numbers::pi / 3.0;
    const std::size_t n = d.size();
    AbcSeries out{{std::vector<double>(n), d.sample_period, "a"},
                  {std::vector<double>(n), d.sample_period, "b"},
                  {std::vector<double>(n), d.sample_period, "c"}};
    for (std::size_t i = 0; i < n; ++i) {
        const double th = omega_g * static_cast<double>(i) * d.sample_period + theta0;
        const double vd = d.samples[i], vq = q.samples[i];
        out.a.samples[i] = vd * std::cos(th) - vq * std::sin(th);
        out.b.samples[i] = vd * std::cos(th - shift) - vq * std::sin(th - shift);
        out.c.samples[i] = vd * std::cos(th + shift) - vq * std::sin(th + shift);
    }
    return out;
}

Complex mean(std::span<const Complex> x) {
    Complex acc{0.0, 0.0};
    for (const auto& v : x) acc += v;
    return acc / static_cast<double>(x.size());
}

DqTimeSeries remove_mean(const DqTimeSeries& series) {
    check_series(series, "remove_mean");
    const Complex m = mean(series.samples);
    DqTimeSeries out = series;
    for (auto& v : out.samples) v -= m;
    return out;
}

DqTimeSeries pack_complex(const RealTimeSeries& d, const RealTimeSeries& q) {
    check_series(d, "pack_complex");
    check_same_shape(d, q);
    DqTimeSeries out{std::vector<Complex>(d.size()), d.sample_period};
    for (std::size_t i = 0; i < d.size(); ++i) out.samples[i] = {d.samples[i], q.samples[i]};
    return out;
}

std::pair<RealTimeSeries, RealTimeSeries> unpack_complex(const DqTimeSeries& s) {
    check_series(s, "unpack_complex");
    RealTimeSeries d{std::vector<double>(s.size()), s.sample_period, "d"};
    RealTimeSeries q{std::vector<double>(s.size()), s.sample_period, "q"};
    for (std::size_t i = 0; i < s.size(); ++i) {
        d.samples[i] = s.samples[i].real();
        q.samples[i] = s.samples[i].imag();
    }
    return {std::move(d), std::move(q)};
}

}  // namespace gridscan
