#include "gridscan/errors.hpp"
#include "gridscan/impedance_map.hpp"
#include "gridscan/lpm.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace gridscan;

namespace {

Matrix2c random_matrix(std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    Matrix2c m;
    for (int i = 0; i < 4; ++i) m(i / 2, i % 2) = {nd(gen), nd(gen)};
    return m;
}

// Entrywise conjugate: the value of a real-rational Z at -w given Z(jw).
Matrix2c mirror(const Matrix2c& m) { return m.conjugate(); }

}  // namespace

TEST_CASE("complex pair of simple matrices") {
    Matrix2c z;
    z << 0.3, -2.0, 2.0, 0.3;
    auto [gp, gm] = impedance_to_complex_pair(z);
    CHECK(std::abs(gp - Complex(0.3, 2.0)) < 1e-15);
    CHECK(gm == Complex{});

    z << 1.0, 0.0, 0.0, 0.0;
    std::tie(gp, gm) = impedance_to_complex_pair(z);
    CHECK(gp == Complex(0.5, 0.0));
    CHECK(gm == Complex(0.5, 0.0));
}

TEST_CASE("constant real G+ maps to a diagonal impedance") {
    const std::vector<Complex> gp(16, Complex(0.7, 0.0)), gm(16);
    const auto z = complex_pair_to_impedance(gp, gm, 1e-4);
    REQUIRE(z.size() == 8);
    for (std::size_t k = 0; k < 8; ++k) {
        CHECK(z.z_dd[k] == Complex(0.7, 0.0));
        CHECK(z.z_qq[k] == Complex(0.7, 0.0));
        CHECK(std::abs(z.z_dq[k]) == 0.0);
        CHECK(std::abs(z.z_qd[k]) == 0.0);
    }
}

TEST_CASE("zero G- gives symmetric structure") {
    const auto gp = testsupport::random_complex(64, 9);
    const std::vector<Complex> gm(64);
    const auto z = complex_pair_to_impedance(gp, gm, 1e-4);
    const auto s = symmetric_complex_to_impedance(gp, 1e-4);
    for (std::size_t k = 0; k < 32; ++k) {
        CHECK(std::abs(z.z_dd[k] - z.z_qq[k]) < 1e-14);
        CHECK(std::abs(z.z_dq[k] + z.z_qd[k]) < 1e-14);
        CHECK(std::abs(s.z_dd[k] - z.z_dd[k]) < 1e-14);
        CHECK(std::abs(s.z_qd[k] - z.z_qd[k]) < 1e-14);
        CHECK(std::abs(s.z_dq[k] - z.z_dq[k]) < 1e-14);
        CHECK(std::abs(s.z_qq[k] - z.z_qq[k]) < 1e-14);
    }
}

TEST_CASE("symmetric conversion of constants") {
    const auto zi = symmetric_complex_to_impedance(std::vector<Complex>(8, Complex(0.0, 1.5)), 1e-4);
    const auto zr = symmetric_complex_to_impedance(std::vector<Complex>(8, Complex(2.0, 0.0)), 1e-4);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(std::abs(zi.z_dd[k]) < 1e-15);
        CHECK(std::abs(zi.z_qd[k] - 1.5) < 1e-15);
        CHECK(std::abs(zr.z_dd[k] - 2.0) < 1e-15);
        CHECK(std::abs(zr.z_qd[k]) < 1e-15);
    }
}

TEST_CASE("round trip on frequency-paired random matrices") {
    std::mt19937_64 gen(11);
    const std::size_t n = 2000;
    std::vector<Matrix2c> truth(n / 2);
    std::vector<Complex> gp(n), gm(n);
    for (std::size_t k = 0; k < n / 2; ++k) {
        Matrix2c z = random_matrix(gen);
        if (k == 0) z = z.real().cast<Complex>();
        truth[k] = z;
        std::tie(gp[k], gm[k]) = impedance_to_complex_pair(z);
        if (k > 0) std::tie(gp[n - k], gm[n - k]) = impedance_to_complex_pair(mirror(z));
    }
    std::tie(gp[n / 2], gm[n / 2]) = impedance_to_complex_pair(random_matrix(gen).real().cast<Complex>());
    const auto z = complex_pair_to_impedance(gp, gm, 1e-4);
    for (std::size_t k = 0; k < n / 2; ++k) CHECK((z.at(k) - truth[k]).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(z.z_dd[0].imag()) < 1e-12);
    CHECK(std::abs(z.z_qd[0].imag()) < 1e-12);
}

TEST_CASE("rational truth reconstructs its FRF") {
    const std::size_t n = 512;
    const auto data = testsupport::make_rational_case(n, 3, 5, false);
    const auto z = complex_pair_to_impedance(data.gplus, data.gminus, 1e-4);
    for (std::size_t k = 0; k < n / 2; ++k) {
        CHECK((z.at(k) - data.z[k]).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, data.z[k].norm()));
        if (k > 0) CHECK((data.z[k].conjugate() - data.z[n - k]).cwiseAbs().maxCoeff() < 1e-12);
    }
    for (int c = 0; c < 4; ++c) CHECK(std::abs(z.at(0)(c / 2, c % 2).imag()) < 1e-12);
}

TEST_CASE("estimate overload carries validity from both bins") {
    ComplexTfEstimate est;
    est.n = 8;
    est.sample_period = 1e-4;
    est.gplus.assign(8, Complex(1.0));
    est.gminus.assign(8, Complex{});
    est.flags.assign(8, bin_ok);
    est.flags[6] = bin_rank_deficient;
    const auto z = complex_pair_to_impedance(est);
    CHECK(z.valid == std::vector<std::uint8_t>{1, 1, 0, 1});
    CHECK(z.frequency_hz(3) == 3.0 / (8 * 1e-4));
}

TEST_CASE("odd lengths are rejected") {
    const std::vector<Complex> g(7);
    CHECK_THROWS_AS(complex_pair_to_impedance(g, g, 1e-4), InvalidSpecError);
    CHECK_THROWS_AS(symmetric_complex_to_impedance(g, 1e-4), InvalidSpecError);
    CHECK_THROWS_AS(complex_pair_to_impedance(g, std::vector<Complex>(8), 1e-4), ShapeError);
}
