#include "gridscan/cli.hpp"

#include "gridscan/baselines.hpp"
#include "gridscan/errors.hpp"
#include "gridscan/grid.hpp"
#include "gridscan/io.hpp"
#include "gridscan/lpm.hpp"
#include "gridscan/metrics.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <sstream>

namespace gridscan::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kManifestFormat = "gridscan-dataset-1";

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// Evaluated method rows and failures, in configuration order.
struct MethodOutcome {
    MethodSpec method;
    std::optional<ImpedanceFrfEstimate> estimate;
    std::string error;
    int code = exit_ok;
};

int code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return exit_config;
    if (dynamic_cast<const MissingInputError*>(&e)) return exit_missing_input;
    if (dynamic_cast<const IncompatibleDataError*>(&e) || dynamic_cast<const ShapeError*>(&e) ||
        dynamic_cast<const RankDeficientError*>(&e) || dynamic_cast<const UnderdeterminedError*>(&e) ||
        dynamic_cast<const InvalidSpecError*>(&e))
        return exit_incompatible;
    return exit_failure;
}

ImpedanceFrfEstimate load_truth(const fs::path& dir, double ts) {
    return io::read_frf_csv(dir / "truth_frf.csv", ts);
}

double manifest_ts(const fs::path& dir) {
    const fs::path p = dir / "manifest.json";
    if (!fs::exists(p)) throw MissingInputError("dataset manifest " + p.string() + " not found");
    json m;
    try {
        m = json::parse(io::read_text(p));
    } catch (const json::parse_error& e) {
        throw IncompatibleDataError(p.string() + ": " + e.what());
    }
    if (!m.contains("format") || m.at("format") != kManifestFormat)
        throw IncompatibleDataError(p.string() + ": not a gridscan dataset manifest");
    return m.at("Ts").get<double>();
}

ordered_json fits_json(const AccuracyReport& r) {
    return {{"dd", r.fit_dd}, {"dq", r.fit_dq}, {"qd", r.fit_qd}, {"qq", r.fit_qq}};
}

ordered_json run_evaluation(const ExperimentConfig& config,
                            const std::vector<MethodOutcome>& outcomes,
                            const ImpedanceFrfEstimate& truth, int& worst, std::ostream& log) {
    ordered_json entries = ordered_json::array();
    for (const auto& o : outcomes) {
        if (!o.estimate) {
            ordered_json e;
            e["method"] = method_name(o.method);
            e["label"] = method_label(o.method);
            e["order"] = method_order(o.method) ? ordered_json(*method_order(o.method)) : ordered_json();
            e["error"] = o.error;
            entries.push_back(e);
            continue;
        }
        for (const auto& band : config.bands) {
            try {
                entries.push_back(evaluate_method(o.method, *o.estimate, truth, band));
            } catch (const Error& ex) {
                log << "gridscan: evaluate " << method_label(o.method) << ": " << ex.what() << "\n";
                worst = std::max(worst, static_cast<int>(exit_incompatible));
                ordered_json e;
                e["method"] = method_name(o.method);
                e["label"] = method_label(o.method);
                e["error"] = ex.what();
                entries.push_back(e);
            }
        }
    }
    return entries;
}

}  // namespace

Dataset simulate_dataset(const ExperimentConfig& config) {
    config.validate();
    const std::size_t n = config.sample_count();
    const double ts = config.sample_period;
    const auto grid = build_ladder_grid(config.grid);

    const auto excitation = generate_dq_rbs(config.excitation(), ts);
    const auto source = config.injection_filter.enabled
                            ? InjectionSource::butterworth_lowpass(config.injection_filter.order,
                                                                   config.injection_filter.cutoff_hz)
                            : InjectionSource::passthrough();

    Dataset d;
    d.grid_symmetric = config.grid.is_symmetric();
    d.x0 = random_initial_state(grid, config.transient_magnitude, config.transient_seed);
    auto rec = simulate_with_source(grid, source, excitation, d.x0);
    d.current_clean = std::move(rec.current);
    d.voltage_clean = std::move(rec.voltage);
    d.current = add_measurement_noise(d.current_clean, config.noise, MeasuredQuantity::current);
    d.voltage = add_measurement_noise(d.voltage_clean, config.noise, MeasuredQuantity::voltage);

    std::vector<Matrix2c> z(n / 2);
    const double step = 2.0 * std::numbers::pi / (static_cast<double>(n) * ts);
    for (std::size_t k = 0; k < n / 2; ++k) z[k] = frequency_response(grid, step * static_cast<double>(k));
    d.truth = impedance_from_matrices(z, n, ts);
    return d;
}

void write_dataset(const fs::path& dir, const ExperimentConfig& config, const Dataset& data) {
    fs::create_directories(dir);
    io::write_dq_csv(dir / "i.csv", data.current);
    io::write_dq_csv(dir / "v.csv", data.voltage);
    io::write_dq_csv(dir / "i_clean.csv", data.current_clean);
    io::write_dq_csv(dir / "v_clean.csv", data.voltage_clean);
    io::write_frf_csv(dir / "truth_frf.csv", data.truth);

    std::string x0 = "index,x0\n";
    for (std::size_t i = 0; i < data.x0.size(); ++i)
        x0 += std::to_string(i) + "," + io::format_double(data.x0[i]) + "\n";
    io::write_text(dir / "x0.csv", x0);

    ordered_json resolved = to_json(config);
    resolved.erase("output_dir");
    resolved.erase("threads");
    const auto seeds = config.excitation().channel_seeds();
    ordered_json m;
    m["format"] = kManifestFormat;
    m["N"] = config.sample_count();
    m["Ts"] = config.sample_period;
    m["grid_order"] = data.x0.size();
    m["grid_symmetric"] = data.grid_symmetric;
    m["seeds"] = {{"excitation_d", seeds.first},
                  {"excitation_q", seeds.second},
                  {"noise", config.noise.seed},
                  {"transient", config.transient_seed}};
    m["files"] = {"i.csv", "v.csv", "i_clean.csv", "v_clean.csv", "truth_frf.csv", "x0.csv"};
    m["config"] = resolved;
    io::write_text(dir / "manifest.json", dump(m));
}

MeasuredRecord load_measurement(const fs::path& dir) {
    const double ts = manifest_ts(dir);
    const json m = json::parse(io::read_text(dir / "manifest.json"));
    MeasuredRecord r;
    r.current = io::read_dq_csv(dir / "i.csv");
    r.voltage = io::read_dq_csv(dir / "v.csv");
    r.grid_symmetric = m.value("grid_symmetric", true);
    const std::size_t n = m.at("N").get<std::size_t>();
    if (r.current.size() != n || r.voltage.size() != n)
        throw IncompatibleDataError("dataset files do not hold the " + std::to_string(n) +
                                    " samples listed in the manifest");
    for (auto* s : {&r.current, &r.voltage}) {
        if (std::abs(s->sample_period - ts) > 1e-9 * ts)
            throw IncompatibleDataError("dataset sample period disagrees with the manifest");
        s->sample_period = ts;
    }
    return r;
}

ImpedanceFrfEstimate identify_method(const fs::path& dir, const MethodSpec& method,
                                     const MeasuredRecord& record, int threads, std::ostream& log) {
    const DqTimeSeries i = remove_mean(record.current);
    const DqTimeSeries v = remove_mean(record.voltage);
    const std::size_t n = i.size();
    const double ts = i.sample_period;
    const fs::path out = dir / method_label(method);
    ImpedanceFrfEstimate z;

    if (const auto* m = std::get_if<LpmMethod>(&method)) {
        LpmConfig c;
        c.order_R = m->R;
        c.half_window_l = m->l;
        c.assume_symmetric = m->assume_symmetric;
        c.assume_periodic = m->assume_periodic;
        if (m->exclude_dc) c.excluded_bins = {0};
        if (2 * static_cast<std::size_t>(m->l) + 1 > n)
            throw IncompatibleDataError("LPM window is wider than the record");
        if (n % 2 != 0) throw IncompatibleDataError("LPM impedance extraction needs an even N");
        const auto est = estimate_frf(dft(v), dft(i), c, threads);
        io::write_complex_tf_csv(out / "gplus_gminus.csv", est);
        z = c.assume_symmetric ? symmetric_complex_to_impedance(est.gplus, ts)
                               : complex_pair_to_impedance(est);
        if (c.assume_symmetric) {
            for (std::size_t k = 0; k < z.size(); ++k)
                z.valid[k] = est.flags[k] == bin_ok && est.flags[(n - k) % n] == bin_ok;
        }
        if (c.assume_symmetric && !record.grid_symmetric)
            log << "gridscan: warning: " << method_label(method)
                << " assumes a dq-symmetric grid but the dataset grid is asymmetric\n";
    } else if (const auto* a = std::get_if<ArxMethod>(&method)) {
        const auto model = arx_fit(i, v, a->order);
        std::vector<double> w(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k)
            w[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / (static_cast<double>(n) * ts);
        const auto frf = arx_frf(model, w);
        z = impedance_from_matrices(frf.values, n, ts);
        z.valid = frf.valid;
        if (!model.is_stable())
            log << "gridscan: note: " << method_label(method) << " model is unstable\n";
    } else if (const auto* s = std::get_if<SeqpertMethod>(&method)) {
        if (n % 4 != 0)
            throw IncompatibleDataError("sequential perturbation needs N divisible by 4 to split into two even halves");
        z = sequential_perturbation_split(v, i, s->window);
    } else {
        if (n % 2 != 0) throw IncompatibleDataError("ETFE impedance extraction needs an even N");
        const auto r = etfe(dft(v), dft(i));
        z = symmetric_complex_to_impedance(r.values, ts);
        for (std::size_t k = 0; k < z.size(); ++k) z.valid[k] = r.valid[k] && r.valid[(n - k) % n];
        if (!record.grid_symmetric)
            log << "gridscan: warning: etfe assumes a dq-symmetric grid; the dataset grid is asymmetric\n";
    }
    io::write_frf_csv(out / "z_frf.csv", z);
    return z;
}

ordered_json evaluate_method(const MethodSpec& method, const ImpedanceFrfEstimate& est,
                             const ImpedanceFrfEstimate& truth, const BandSelection& band) {
    AccuracyReport r;
    try {
        r = evaluate_band(est, truth, band);
    } catch (const ShapeError& e) {
        throw IncompatibleDataError(e.what());
    }
    ordered_json e;
    e["method"] = method_name(method);
    e["label"] = method_label(method);
    const auto order = method_order(method);
    e["order"] = order ? ordered_json(*order) : ordered_json();
    e["band_hz"] = {band.f_min, band.f_max};
    e["fit_pct"] = fits_json(r);
    e["rel_hinf"] = r.rel_hinf;
    return e;
}

std::string render_table(const ordered_json& entries) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-24s %5s %-12s %9s %9s %9s %9s %10s\n", "method", "order",
                  "band_hz", "Fit_dd", "Fit_dq", "Fit_qd", "Fit_qq", "relHinf");
    os << line;
    for (const auto& e : entries) {
        const std::string label = e.at("label").get<std::string>();
        const std::string order = e.contains("order") && !e.at("order").is_null()
                                      ? std::to_string(e.at("order").get<int>())
                                      : "-";
        if (e.contains("error")) {
            std::snprintf(line, sizeof line, "%-24s %5s failed: %s\n", label.c_str(), order.c_str(),
                          e.at("error").get<std::string>().c_str());
            os << line;
            continue;
        }
        char band[32];
        std::snprintf(band, sizeof band, "%g-%g", e.at("band_hz")[0].get<double>(),
                      e.at("band_hz")[1].get<double>());
        const auto& f = e.at("fit_pct");
        std::snprintf(line, sizeof line, "%-24s %5s %-12s %9.1f %9.1f %9.1f %9.1f %10.4g\n",
                      label.c_str(), order.c_str(), band, f.at("dd").get<double>(),
                      f.at("dq").get<double>(), f.at("qd").get<double>(), f.at("qq").get<double>(),
                      e.at("rel_hinf").get<double>());
        os << line;
    }
    return os.str();
}

int cmd_simulate(const ExperimentConfig& config, const fs::path& out, std::ostream& log) {
    write_dataset(out, config, simulate_dataset(config));
    log << "gridscan: wrote dataset (" << config.sample_count() << " samples) to " << out.string()
        << "\n";
    return exit_ok;
}

int cmd_identify(const ExperimentConfig& config, const fs::path& out, std::ostream& log) {
    const auto record = load_measurement(out);
    int worst = exit_ok;
    for (const auto& m : config.methods) {
        try {
            identify_method(out, m, record, config.threads, log);
            log << "gridscan: wrote " << (out / method_label(m)).string() << "\n";
        } catch (const Error& e) {
            log << "gridscan: identify " << method_label(m) << ": " << e.what() << "\n";
            worst = std::max(worst, code_for(e));
        }
    }
    return worst;
}

int cmd_evaluate(const ExperimentConfig& config, const fs::path& out, std::ostream& log) {
    const double ts = manifest_ts(out);
    const auto truth = load_truth(out, ts);
    std::vector<MethodOutcome> outcomes;
    int worst = exit_ok;
    for (const auto& m : config.methods) {
        const fs::path p = out / method_label(m) / "z_frf.csv";
        if (!fs::exists(p)) throw MissingInputError("estimate file " + p.string() + " not found");
        outcomes.push_back({m, io::read_frf_csv(p, ts), {}, exit_ok});
    }
    ordered_json report;
    report["entries"] = run_evaluation(config, outcomes, truth, worst, log);
    io::write_text(out / "report.json", dump(report));
    log << "gridscan: wrote " << (out / "report.json").string() << "\n";
    return worst;
}

int cmd_compare(const ExperimentConfig& config, const fs::path& out, std::ostream& log) {
    const Dataset data = simulate_dataset(config);
    write_dataset(out, config, data);
    MeasuredRecord record{data.current, data.voltage, data.grid_symmetric};

    int worst = exit_ok;
    std::vector<MethodOutcome> outcomes;
    for (const auto& m : config.methods) {
        MethodOutcome o{m, std::nullopt, {}, exit_ok};
        try {
            o.estimate = identify_method(out, m, record, config.threads, log);
        } catch (const Error& e) {
            o.error = e.what();
            o.code = code_for(e);
            worst = std::max(worst, o.code);
            log << "gridscan: identify " << method_label(m) << ": " << e.what() << "\n";
        }
        outcomes.push_back(std::move(o));
    }
    ordered_json report;
    report["N"] = config.sample_count();
    report["Ts"] = config.sample_period;
    report["noise_accuracy_class"] = config.noise.accuracy_class;
    report["entries"] = run_evaluation(config, outcomes, data.truth, worst, log);
    io::write_text(out / "compare.json", dump(report));
    const std::string table = render_table(report["entries"]);
    io::write_text(out / "compare.txt", table);
    log << table;
    return worst;
}

int run(int argc, char** argv) {
    CLI::App app{"dq-frame grid impedance identification from a single transient record", "gridscan"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool no_noise = false, noise = false;
    auto add_common = [&](CLI::App* sub, bool noise_flags) {
        sub->add_option("--config", config_path, "experiment configuration (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
        if (noise_flags) {
            auto* a = sub->add_flag("--no-noise", no_noise, "disable measurement noise");
            auto* b = sub->add_flag("--noise", noise, "force measurement noise (0.5% class if unset)");
            a->excludes(b);
        }
    };
    auto* sim = app.add_subcommand("simulate", "synthesize a measurement dataset");
    auto* ident = app.add_subcommand("identify", "estimate FRFs from a dataset");
    auto* eval = app.add_subcommand("evaluate", "score estimates against the true FRF");
    auto* comp = app.add_subcommand("compare", "simulate, identify and evaluate every method");
    add_common(sim, true);
    add_common(ident, false);
    add_common(eval, false);
    add_common(comp, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        ExperimentConfig config = load_experiment_config(config_path);
        if (no_noise) config.noise.accuracy_class = 0.0;
        if (noise && config.noise.accuracy_class == 0.0) config.noise.accuracy_class = NoiseSpec{}.accuracy_class;
        const fs::path out = out_dir.empty() ? fs::path(config.output_dir) : fs::path(out_dir);
        if (sim->parsed()) return cmd_simulate(config, out, std::cerr);
        if (ident->parsed()) return cmd_identify(config, out, std::cerr);
        if (eval->parsed()) return cmd_evaluate(config, out, std::cerr);
        return cmd_compare(config, out, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "gridscan: error: " << e.what() << "\n";
        return code_for(e);
    }
}

}  // namespace gridscan::cli
