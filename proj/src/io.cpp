#include "gridscan/io.hpp"

#include "gridscan/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gridscan::io {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + path.string());
    return f;
}

std::vector<std::vector<double>> read_table(const fs::path& path, const std::string& header,
                                            std::size_t columns) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw MissingInputError("cannot open " + path.string());
    std::string line;
    if (!std::getline(f, line)) throw IncompatibleDataError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header)
        throw IncompatibleDataError(path.string() + ": expected header '" + header + "', got '" +
                                    line + "'");
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(columns);
        const char* p = line.c_str();
        while (true) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p)
                throw IncompatibleDataError(path.string() + ":" + std::to_string(lineno) +
                                            ": malformed number");
            row.push_back(v);
            p = end;
            if (*p == ',') {
                ++p;
                continue;
            }
            if (*p != '\0')
                throw IncompatibleDataError(path.string() + ":" + std::to_string(lineno) +
                                            ": unexpected character");
            break;
        }
        if (row.size() != columns)
            throw IncompatibleDataError(path.string() + ":" + std::to_string(lineno) +
                                        ": expected " + std::to_string(columns) + " columns");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IncompatibleDataError(path.string() + ": no data rows");
    return rows;
}

double check_uniform_times(const fs::path& path, const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2)
        throw IncompatibleDataError(path.string() + ": need at least two samples to infer Ts");
    const double t0 = rows.front()[0];
    const double span = rows.back()[0] - t0;
    const double ts = span / static_cast<double>(rows.size() - 1);
    if (!(ts > 0.0)) throw IncompatibleDataError(path.string() + ": times are not increasing");
    const double tol = 1e-9 * span;
    for (std::size_t n = 0; n < rows.size(); ++n)
        if (std::abs(rows[n][0] - t0 - static_cast<double>(n) * ts) > tol)
            throw IncompatibleDataError(path.string() + ": non-uniform sampling at row " +
                                        std::to_string(n + 1));
    return ts;
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_dq_csv(const fs::path& path, const DqTimeSeries& series) {
    auto f = open_out(path);
    f << "t,d,q\n";
    for (std::size_t n = 0; n < series.size(); ++n)
        f << format_double(static_cast<double>(n) * series.sample_period) << ','
          << format_double(series.samples[n].real()) << ','
          << format_double(series.samples[n].imag()) << '\n';
}

void write_real_csv(const fs::path& path, const RealTimeSeries& series) {
    auto f = open_out(path);
    f << "t,val\n";
    for (std::size_t n = 0; n < series.size(); ++n)
        f << format_double(static_cast<double>(n) * series.sample_period) << ','
          << format_double(series.samples[n]) << '\n';
}

DqTimeSeries read_dq_csv(const fs::path& path) {
    const auto rows = read_table(path, "t,d,q", 3);
    DqTimeSeries s;
    s.sample_period = check_uniform_times(path, rows);
    s.samples.reserve(rows.size());
    for (const auto& r : rows) s.samples.emplace_back(r[1], r[2]);
    return s;
}

RealTimeSeries read_real_csv(const fs::path& path) {
    const auto rows = read_table(path, "t,val", 2);
    RealTimeSeries s;
    s.sample_period = check_uniform_times(path, rows);
    s.channel_label = path.stem().string();
    s.samples.reserve(rows.size());
    for (const auto& r : rows) s.samples.push_back(r[1]);
    return s;
}

void write_spectrum_csv(const fs::path& path, const Spectrum& spectrum) {
    auto f = open_out(path);
    f << "k,omega_rad_s,re,im\n";
    const auto w = frequency_grid(spectrum.size(), spectrum.sample_period);
    for (std::size_t k = 0; k < spectrum.size(); ++k)
        f << k << ',' << format_double(w[k]) << ',' << format_double(spectrum.values[k].real())
          << ',' << format_double(spectrum.values[k].imag()) << '\n';
}

void write_frf_csv(const fs::path& path, const ImpedanceFrfEstimate& frf) {
    auto f = open_out(path);
    f << "k,f_hz,z_dd_re,z_dd_im,z_dq_re,z_dq_im,z_qd_re,z_qd_im,z_qq_re,z_qq_im,valid\n";
    for (std::size_t k = 0; k < frf.size(); ++k) {
        f << k << ',' << format_double(frf.frequency_hz(k));
        for (const auto* arr : {&frf.z_dd, &frf.z_dq, &frf.z_qd, &frf.z_qq})
            f << ',' << format_double((*arr)[k].real()) << ',' << format_double((*arr)[k].imag());
        f << ',' << (frf.valid.empty() ? 1 : static_cast<int>(frf.valid[k])) << '\n';
    }
}

ImpedanceFrfEstimate read_frf_csv(const fs::path& path, double sample_period) {
    const auto rows = read_table(
        path, "k,f_hz,z_dd_re,z_dd_im,z_dq_re,z_dq_im,z_qd_re,z_qd_im,z_qq_re,z_qq_im,valid", 11);
    if (rows.size() < 2) throw IncompatibleDataError(path.string() + ": need at least two bins");
    ImpedanceFrfEstimate z;
    z.sample_period = sample_period;
    const double df = rows[1][1] - rows[0][1];
    if (!(df > 0.0)) throw IncompatibleDataError(path.string() + ": frequencies not increasing");
    z.n = static_cast<std::size_t>(std::llround(1.0 / (df * sample_period)));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r[0] != static_cast<double>(i))
            throw IncompatibleDataError(path.string() + ": bins must start at 0 and be contiguous");
        const double expect = static_cast<double>(i) / (static_cast<double>(z.n) * sample_period);
        if (std::abs(r[1] - expect) > 1e-9 * std::max(1.0, expect))
            throw IncompatibleDataError(path.string() + ": frequency column is not a uniform grid");
        z.z_dd.emplace_back(r[2], r[3]);
        z.z_dq.emplace_back(r[4], r[5]);
        z.z_qd.emplace_back(r[6], r[7]);
        z.z_qq.emplace_back(r[8], r[9]);
        z.valid.push_back(r[10] != 0.0 ? 1 : 0);
    }
    return z;
}

void write_complex_tf_csv(const fs::path& path, const ComplexTfEstimate& est) {
    auto f = open_out(path);
    f << "k,omega_rad_s,gplus_re,gplus_im,gminus_re,gminus_im,transient_re,transient_im,"
         "residual,condition,rank,flags\n";
    const auto w = frequency_grid(est.n, est.sample_period);
    for (std::size_t k = 0; k < est.n; ++k) {
        f << k << ',' << format_double(w[k]);
        for (const auto* arr : {&est.gplus, &est.gminus, &est.transient})
            f << ',' << format_double((*arr)[k].real()) << ',' << format_double((*arr)[k].imag());
        f << ',' << format_double(est.residual_norm[k]) << ','
          << format_double(est.condition_number[k]) << ',' << est.effective_rank[k] << ','
          << static_cast<int>(est.flags[k]) << '\n';
    }
}

void write_text(const fs::path& path, const std::string& text) {
    auto f = open_out(path);
    f << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw MissingInputError("cannot open " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace gridscan::io
