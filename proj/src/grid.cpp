#include "gridscan/grid.hpp"

#include "gridscan/errors.hpp"
#include "gridscan/impedance_map.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

namespace gridscan {

namespace {

using Eigen::MatrixXd;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive(double v, const std::string& name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << name << " must be finite and > 0 (got " << v << ")";
        throw InvalidSpecError(os.str());
    }
}

std::string format_eigenvalue(std::complex<double> ev) {
    std::ostringstream os;
    os.precision(6);
    os << ev.real() << (ev.imag() < 0 ? " - " : " + ") << std::abs(ev.imag()) << "j";
    return os.str();
}

void check_hurwitz(const MatrixXd& A) {
    if (A.rows() == 0) return;
    Eigen::EigenSolver<MatrixXd> es(A, false);
    if (es.info() != Eigen::Success) throw ConstructionError("eigenvalue computation failed");
    const auto ev = es.eigenvalues();
    Eigen::Index worst = 0;
    for (Eigen::Index i = 1; i < ev.size(); ++i)
        if (ev[i].real() > ev[worst].real()) worst = i;
    if (!(ev[worst].real() < 0.0))
        throw ConstructionError("state matrix is not Hurwitz: eigenvalue " +
                                format_eigenvalue(ev[worst]) + " has non-negative real part");
}

// Block [[0, w], [-w, 0]] added to a dq state pair.
void add_rotation(MatrixXd& M, Eigen::Index row, Eigen::Index col, double a01, double a10) {
    M(row, col + 1) += a01;
    M(row + 1, col) += a10;
}

struct Discretized {
    MatrixXd Ad;
    MatrixXd Bd;
};

Discretized zoh(const MatrixXd& A, const MatrixXd& B, double h) {
    const Eigen::Index n = A.rows(), m = B.cols();
    MatrixXd M = MatrixXd::Zero(n + m, n + m);
    M.topLeftCorner(n, n) = A * h;
    M.topRightCorner(n, m) = B * h;
    const MatrixXd E = M.exp();
    return {E.topLeftCorner(n, n), E.topRightCorner(n, m)};
}

Eigen::VectorXd to_vector(std::span<const double> x, Eigen::Index n, const char* what) {
    if (x.empty()) return Eigen::VectorXd::Zero(n);
    if (static_cast<Eigen::Index>(x.size()) != n)
        throw ShapeError(std::string(what) + ": expected " + std::to_string(n) +
                         " initial states, got " + std::to_string(x.size()));
    return Eigen::Map<const Eigen::VectorXd>(x.data(), n);
}

}  // namespace

void StateSpaceGrid::validate() const {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || B.rows() != n || B.cols() != 2 || C.rows() != 2 || C.cols() != n ||
        D.rows() != 2 || D.cols() != 2)
        throw ConstructionError("state-space dimensions are inconsistent");
    check_hurwitz(A);
}

bool LadderNetworkConfig::is_symmetric() const {
    for (const auto& b : branches)
        if (b.series_L_d != b.series_L_q) return false;
    return true;
}

void LadderNetworkConfig::validate() const {
    require_positive(port_shunt_capacitance, "port_shunt_capacitance");
    require_positive(base_frequency, "base_frequency");
    if (branches.empty()) throw InvalidSpecError("network needs at least one branch");
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const auto& b = branches[i];
        const std::string p = "branches[" + std::to_string(i) + "].";
        require_positive(b.series_R, p + "series_R");
        require_positive(b.series_L_d, p + "series_L_d");
        require_positive(b.series_L_q, p + "series_L_q");
        if (b.shunt_R) require_positive(*b.shunt_R, p + "shunt_R");
        if (b.shunt_C) require_positive(*b.shunt_C, p + "shunt_C");
        const bool last = i + 1 == branches.size();
        if (!last && !b.shunt_R && !b.shunt_C)
            throw InvalidSpecError(p + "intermediate node needs shunt_R or shunt_C");
    }
}

LadderNetworkConfig default_ladder_config() {
    LadderNetworkConfig c;
    c.port_shunt_capacitance = 0.08;
    c.base_frequency = 50.0;
    c.branches.push_back({0.015, 0.15, 0.15, 2.0, 0.05});
    c.branches.push_back({0.015, 0.15, 0.15, std::nullopt, 10.0});
    return c;
}

LadderNetworkConfig default_asymmetric_ladder_config() {
    LadderNetworkConfig c = default_ladder_config();
    c.branches[0].series_L_q = 1.5 * c.branches[0].series_L_d;
    return c;
}

void NoiseSpec::validate() const {
    if (!(accuracy_class >= 0.0) || !std::isfinite(accuracy_class))
        throw InvalidSpecError("noise accuracy_class must be >= 0");
    if (!(reference_magnitude_v >= 0.0) || !(reference_magnitude_i >= 0.0))
        throw InvalidSpecError("noise reference magnitudes must be >= 0");
}

StateSpaceGrid build_ladder_grid(const LadderNetworkConfig& config) {
    config.validate();
    const double wb = kTwoPi * config.base_frequency;
    const double wg = wb;
    const std::size_t M = config.branches.size();

    // State layout: port capacitor, then per branch its inductor and node capacitor.
    std::vector<Eigen::Index> l_idx(M), c_idx(M + 1, -1);
    Eigen::Index n = 2;
    c_idx[0] = 0;
    for (std::size_t b = 0; b < M; ++b) {
        l_idx[b] = n;
        n += 2;
        if (config.branches[b].shunt_C) {
            c_idx[b + 1] = n;
            n += 2;
        }
    }

    // Node voltage as a linear combination of states (2 x n).
    auto node_voltage = [&](std::size_t node) -> MatrixXd {
        MatrixXd e = MatrixXd::Zero(2, n);
        if (c_idx[node] >= 0) {
            e.block(0, c_idx[node], 2, 2).setIdentity();
            return e;
        }
        const auto& br = config.branches[node - 1];
        if (!br.shunt_R) return e;  // far end: stiff bus
        const double R = *br.shunt_R;
        e.block(0, l_idx[node - 1], 2, 2) += R * Eigen::Matrix2d::Identity();
        if (node < M) e.block(0, l_idx[node], 2, 2) -= R * Eigen::Matrix2d::Identity();
        return e;
    };

    StateSpaceGrid g;
    g.A = MatrixXd::Zero(n, n);
    g.B = MatrixXd::Zero(n, 2);
    g.C = MatrixXd::Zero(2, n);
    g.D = MatrixXd::Zero(2, 2);
    g.omega_g = wg;

    for (std::size_t b = 0; b < M; ++b) {
        const auto& br = config.branches[b];
        const Eigen::Index li = l_idx[b];
        const double Ld = br.series_L_d / wb, Lq = br.series_L_q / wb;
        MatrixXd rows = node_voltage(b) - node_voltage(b + 1);
        rows(0, li) -= br.series_R;
        rows(1, li + 1) -= br.series_R;
        add_rotation(rows, 0, li, wg * Lq, -wg * Ld);
        g.A.row(li) = rows.row(0) / Ld;
        g.A.row(li + 1) = rows.row(1) / Lq;
    }

    for (std::size_t node = 0; node <= M; ++node) {
        const Eigen::Index ci = c_idx[node];
        if (ci < 0) continue;
        const double Cv =
            (node == 0 ? config.port_shunt_capacitance : *config.branches[node - 1].shunt_C) / wb;
        MatrixXd rows = MatrixXd::Zero(2, n);
        if (node > 0) rows.block(0, l_idx[node - 1], 2, 2) += Eigen::Matrix2d::Identity();
        if (node < M) rows.block(0, l_idx[node], 2, 2) -= Eigen::Matrix2d::Identity();
        if (node > 0 && config.branches[node - 1].shunt_R)
            rows.block(0, ci, 2, 2) -= Eigen::Matrix2d::Identity() / *config.branches[node - 1].shunt_R;
        add_rotation(rows, 0, ci, wg * Cv, -wg * Cv);
        g.A.row(ci) = rows.row(0) / Cv;
        g.A.row(ci + 1) = rows.row(1) / Cv;
        if (node == 0) g.B.block(ci, 0, 2, 2) = Eigen::Matrix2d::Identity() / Cv;
    }
    g.C.block(0, 0, 2, 2).setIdentity();

    g.validate();
    return g;
}

Matrix2c frequency_response(const StateSpaceGrid& model, double omega) {
    Eigen::MatrixXcd M = -model.A.cast<Complex>();
    M.diagonal().array() += Complex(0.0, omega);
    const Eigen::MatrixXcd X = M.partialPivLu().solve(model.B.cast<Complex>());
    return model.C.cast<Complex>() * X + model.D.cast<Complex>();
}

std::vector<Matrix2c> true_frf(const StateSpaceGrid& model, std::span<const double> omegas) {
    std::vector<Matrix2c> out;
    out.reserve(omegas.size());
    for (double w : omegas) out.push_back(frequency_response(model, w));
    return out;
}

DqTimeSeries simulate(const StateSpaceGrid& model, const DqTimeSeries& injected_current,
                      std::span<const double> x0, int oversampling) {
    return simulate_with_source(model, InjectionSource::passthrough(), injected_current, x0, {},
                                oversampling)
        .voltage;
}

InjectionSource InjectionSource::passthrough() {
    InjectionSource s;
    s.A = MatrixXd::Zero(0, 0);
    s.B = MatrixXd::Zero(0, 2);
    s.C = MatrixXd::Zero(2, 0);
    s.D = MatrixXd::Identity(2, 2);
    return s;
}

InjectionSource InjectionSource::butterworth_lowpass(int order, double cutoff_hz) {
    if (order < 1) throw InvalidSpecError("Butterworth order must be >= 1");
    require_positive(cutoff_hz, "Butterworth cutoff");
    const double wc = kTwoPi * cutoff_hz;

    // One channel as a cascade of second-order sections (plus a first-order
    // section for odd orders); state pairs are (y, dy/dt) of each section.
    const int m = order;
    MatrixXd a = MatrixXd::Zero(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(m);
    int s = 0;
    int prev_out = -1;  // state index carrying the previous section's output
    auto feed = [&](int row, double gain) {
        if (prev_out < 0)
            b(row) += gain;
        else
            a(row, prev_out) += gain;
    };
    for (int k = 0; k < order / 2; ++k) {
        const double zeta = std::sin(std::numbers::pi * (2.0 * k + 1.0) / (2.0 * order));
        a(s, s + 1) = 1.0;
        a(s + 1, s) = -wc * wc;
        a(s + 1, s + 1) = -2.0 * zeta * wc;
        feed(s + 1, wc * wc);
        prev_out = s;
        s += 2;
    }
    if (order % 2 == 1) {
        a(s, s) = -wc;
        feed(s, wc);
        prev_out = s;
        ++s;
    }
    c(prev_out) = 1.0;

    InjectionSource src;
    src.A = MatrixXd::Zero(2 * m, 2 * m);
    src.B = MatrixXd::Zero(2 * m, 2);
    src.C = MatrixXd::Zero(2, 2 * m);
    src.D = MatrixXd::Zero(2, 2);
    for (int ch = 0; ch < 2; ++ch) {
        src.A.block(ch * m, ch * m, m, m) = a;
        src.B.block(ch * m, ch, m, 1) = b;
        src.C.block(ch, ch * m, 1, m) = c;
    }
    return src;
}

InjectionSource InjectionSource::tone(double omega) {
    InjectionSource s;
    s.A = MatrixXd::Zero(2, 2);
    s.A(0, 1) = -omega;
    s.A(1, 0) = omega;
    s.B = MatrixXd::Zero(2, 2);
    s.C = MatrixXd::Identity(2, 2);
    s.D = MatrixXd::Zero(2, 2);
    return s;
}

SimulationRecord simulate_with_source(const StateSpaceGrid& model, const InjectionSource& source,
                                      const DqTimeSeries& excitation,
                                      std::span<const double> x0_grid,
                                      std::span<const double> x0_source, int oversampling) {
    check_series(excitation, "simulate");
    if (oversampling < 1) throw InvalidSpecError("oversampling must be >= 1");
    const Eigen::Index n = model.order(), m = source.order();
    const Eigen::Index nt = n + m;

    // Source states first, grid states after; the grid is driven by the source current.
    MatrixXd A = MatrixXd::Zero(nt, nt);
    MatrixXd B = MatrixXd::Zero(nt, 2);
    A.topLeftCorner(m, m) = source.A;
    A.bottomLeftCorner(n, m) = model.B * source.C;
    A.bottomRightCorner(n, n) = model.A;
    B.topRows(m) = source.B;
    B.bottomRows(n) = model.B * source.D;

    Eigen::VectorXd x(nt);
    x.head(m) = to_vector(x0_source, m, "simulate (source)");
    x.tail(n) = to_vector(x0_grid, n, "simulate (grid)");

    const auto d = zoh(A, B, excitation.sample_period / oversampling);
    const std::size_t N = excitation.size();
    SimulationRecord rec;
    rec.current.sample_period = rec.voltage.sample_period = excitation.sample_period;
    rec.current.samples.resize(N);
    rec.voltage.samples.resize(N);

    Eigen::Vector2d u, i, v;
    for (std::size_t k = 0; k < N; ++k) {
        u << excitation.samples[k].real(), excitation.samples[k].imag();
        i = source.C * x.head(m) + source.D * u;
        v = model.C * x.tail(n) + model.D * i;
        rec.current.samples[k] = {i(0), i(1)};
        rec.voltage.samples[k] = {v(0), v(1)};
        for (int s = 0; s < oversampling; ++s) x = d.Ad * x + d.Bd * u;
    }
    return rec;
}

std::vector<double> random_initial_state(const StateSpaceGrid& model, double output_magnitude,
                                         std::uint64_t seed) {
    const Eigen::Index n = model.order();
    if (!(output_magnitude >= 0.0)) throw InvalidSpecError("transient magnitude must be >= 0");
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    if (output_magnitude == 0.0) return x;
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& e : x) e = normal(gen);
    Eigen::Map<Eigen::VectorXd> xv(x.data(), n);
    const double y0 = (model.C * xv).norm();
    if (!(y0 > 0.0)) throw ConstructionError("random initial state is unobservable at the port");
    xv *= output_magnitude / y0;
    return x;
}

DqTimeSeries add_measurement_noise(const DqTimeSeries& series, const NoiseSpec& spec,
                                   MeasuredQuantity quantity) {
    spec.validate();
    const double ref = quantity == MeasuredQuantity::voltage ? spec.reference_magnitude_v
                                                             : spec.reference_magnitude_i;
    const double sigma = spec.accuracy_class * ref;
    if (sigma == 0.0) return series;
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                      static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(quantity)};
    std::mt19937_64 gen(seq);
    std::normal_distribution<double> normal(0.0, sigma);
    DqTimeSeries out = series;
    for (auto& s : out.samples) {
        const double nd = normal(gen);
        const double nq = normal(gen);
        s += Complex(nd, nq);
    }
    return out;
}

Spectrum leakage_oracle(const StateSpaceGrid& model, const SimulationRecord& record) {
    const Spectrum V = dft(record.voltage);
    const Spectrum I = dft(record.current);
    const std::size_t N = V.size();
    if (I.size() != N) throw ShapeError("leakage_oracle: current and voltage lengths differ");
    Spectrum T{std::vector<Complex>(N), V.sample_period};
    for (std::size_t k = 0; k < N; ++k) {
        const double w = signed_bin_frequency(k, N, V.sample_period);
        const auto [gp, gm] = impedance_to_complex_pair(frequency_response(model, w));
        T.values[k] = V.values[k] - gp * I.values[k] - gm * std::conj(I.values[(N - k) % N]);
    }
    return T;
}

Spectrum leakage_oracle(const StateSpaceGrid& model, const DqTimeSeries& injected_current,
                        std::span<const double> x0) {
    SimulationRecord rec{injected_current, simulate(model, injected_current, x0)};
    return leakage_oracle(model, rec);
}

}  // namespace gridscan
