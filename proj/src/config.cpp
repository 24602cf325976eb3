#include "gridscan/config.hpp"

#include "gridscan/errors.hpp"
#include "gridscan/io.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

namespace gridscan {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                    [&](const char* k) { return it.key() == k; });
        if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

std::string field(const std::string& where, const char* key) {
    return where.empty() ? std::string(key) : where + "." + key;
}

double get_number(const json& j, const std::string& where, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(field(where, key) + ": expected a number");
    return v.get<double>();
}

double require_number(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) throw ConfigError(field(where, key) + ": missing");
    return get_number(j, where, key, 0.0);
}

int get_int(const json& j, const std::string& where, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(field(where, key) + ": expected an integer");
    return v.get<int>();
}

std::uint64_t get_seed(const json& j, const std::string& where, const char* key,
                       std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ConfigError(field(where, key) + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& where, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_boolean()) throw ConfigError(field(where, key) + ": expected true or false");
    return v.get<bool>();
}

std::string get_string(const json& j, const std::string& where, const char* key,
                       const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_string()) throw ConfigError(field(where, key) + ": expected a string");
    return v.get<std::string>();
}

std::optional<double> get_optional(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return require_number(j, where, key);
}

json parse_file(const fs::path& path) {
    const std::string text = io::read_text(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

// Re-labels library validation failures as configuration errors.
template <class F>
void validated(const std::string& where, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

MethodSpec parse_method(const json& j, const std::string& where) {
    if (!j.is_object() || j.size() != 1)
        throw ConfigError(where + ": expected an object with one of lpm, arx, seqpert, etfe");
    const std::string name = j.begin().key();
    const json& body = j.begin().value();
    const std::string w = where + "." + name;
    if (name == "lpm") {
        check_keys(body, w, {"R", "l", "assume_symmetric", "assume_periodic", "exclude_dc"});
        LpmMethod m;
        m.R = get_int(body, w, "R", 4);
        m.l = get_int(body, w, "l", LpmConfig::default_half_window(m.R));
        m.assume_symmetric = get_bool(body, w, "assume_symmetric", false);
        m.assume_periodic = get_bool(body, w, "assume_periodic", false);
        m.exclude_dc = get_bool(body, w, "exclude_dc", true);
        return m;
    }
    if (name == "arx") {
        check_keys(body, w, {"order"});
        return ArxMethod{get_int(body, w, "order", 2)};
    }
    if (name == "seqpert") {
        check_keys(body, w, {"window"});
        SeqpertMethod m;
        validated(w + ".window",
                  [&] { m.window = parse_window_kind(get_string(body, w, "window", "hamming")); });
        return m;
    }
    if (name == "etfe") {
        if (!body.is_null()) check_keys(body, w, {});
        return EtfeMethod{};
    }
    throw ConfigError(where + ": unknown method '" + name + "'");
}

ordered_json method_to_json(const MethodSpec& m) {
    return std::visit(
        [](const auto& x) -> ordered_json {
            using T = std::decay_t<decltype(x)>;
            ordered_json o;
            if constexpr (std::is_same_v<T, LpmMethod>) {
                o["lpm"] = {{"R", x.R},
                            {"l", x.l},
                            {"assume_symmetric", x.assume_symmetric},
                            {"assume_periodic", x.assume_periodic},
                            {"exclude_dc", x.exclude_dc}};
            } else if constexpr (std::is_same_v<T, ArxMethod>) {
                o["arx"] = {{"order", x.order}};
            } else if constexpr (std::is_same_v<T, SeqpertMethod>) {
                o["seqpert"] = {{"window", to_string(x.window)}};
            } else {
                o["etfe"] = ordered_json::object();
            }
            return o;
        },
        m);
}

}  // namespace

std::string method_label(const MethodSpec& m) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, LpmMethod>) {
                std::string s = "lpm_R" + std::to_string(x.R) + "_l" + std::to_string(x.l);
                if (x.assume_symmetric) s += "_sym";
                if (x.assume_periodic) s += "_per";
                if (!x.exclude_dc) s += "_dc";
                return s;
            } else if constexpr (std::is_same_v<T, ArxMethod>) {
                return "arx_" + std::to_string(x.order);
            } else if constexpr (std::is_same_v<T, SeqpertMethod>) {
                return std::string("seqpert_") + to_string(x.window);
            } else {
                return "etfe";
            }
        },
        m);
}

std::string method_name(const MethodSpec& m) {
    static const char* names[] = {"lpm", "arx", "seqpert", "etfe"};
    return names[m.index()];
}

std::optional<int> method_order(const MethodSpec& m) {
    if (const auto* l = std::get_if<LpmMethod>(&m)) return l->R;
    if (const auto* a = std::get_if<ArxMethod>(&m)) return a->order;
    return std::nullopt;
}

std::size_t ExperimentConfig::sample_count() const {
    if (!(sample_period > 0.0)) throw ConfigError("Ts: must be > 0");
    if (!(duration_s > 0.0)) throw ConfigError("duration_s: must be > 0");
    const double ratio = duration_s / sample_period;
    const double n = std::nearbyint(ratio);
    if (std::abs(ratio - n) > 1e-9 * n || n < 2)
        throw ConfigError("duration_s / Ts must be an integer >= 2");
    const auto count = static_cast<std::size_t>(n);
    if (count % 2 != 0) throw ConfigError("duration_s / Ts must be even");
    return count;
}

ExcitationSpec ExperimentConfig::excitation() const {
    ExcitationSpec e;
    e.amplitude = amplitude;
    e.duration_samples = sample_count();
    e.seed = excitation_seed;
    if (channel_seeds) {
        e.seed_d = channel_seeds->first;
        e.seed_q = channel_seeds->second;
    }
    return e;
}

void ExperimentConfig::validate() const {
    validated("grid", [&] { grid.validate(); });
    const std::size_t n = sample_count();
    validated("excitation", [&] { excitation().validate(); });
    validated("noise", [&] { noise.validate(); });
    if (!(transient_magnitude >= 0.0)) throw ConfigError("transient_magnitude: must be >= 0");
    if (injection_filter.enabled) {
        if (injection_filter.order < 1) throw ConfigError("injection_filter.order: must be >= 1");
        if (!(injection_filter.cutoff_hz > 0.0))
            throw ConfigError("injection_filter.cutoff_hz: must be > 0");
    }
    if (methods.empty()) throw ConfigError("methods: at least one method is required");
    for (std::size_t i = 0; i < methods.size(); ++i) {
        if (const auto* m = std::get_if<LpmMethod>(&methods[i])) {
            LpmConfig c;
            c.order_R = m->R;
            c.half_window_l = m->l;
            c.assume_symmetric = m->assume_symmetric;
            c.assume_periodic = m->assume_periodic;
            validated("methods[" + std::to_string(i) + "].lpm", [&] { c.validate(); });
            if (2 * static_cast<std::size_t>(m->l) + 1 > n)
                throw ConfigError("methods[" + std::to_string(i) + "].lpm.l: window exceeds record");
        }
        if (const auto* a = std::get_if<ArxMethod>(&methods[i]); a && a->order < 1)
            throw ConfigError("methods[" + std::to_string(i) + "].arx.order: must be >= 1");
    }
    if (bands.empty()) throw ConfigError("bands: at least one band is required");
    for (std::size_t i = 0; i < bands.size(); ++i)
        validated("bands[" + std::to_string(i) + "]",
                  [&] { select_band(n, sample_period, n / 2, bands[i]); });
    if (threads < 1) throw ConfigError("threads: must be >= 1");
}

LadderNetworkConfig parse_network_config(const json& j) {
    check_keys(j, "grid", {"port_shunt_capacitance", "branches", "base_frequency"});
    LadderNetworkConfig c;
    c.port_shunt_capacitance = require_number(j, "grid", "port_shunt_capacitance");
    c.base_frequency = get_number(j, "grid", "base_frequency", 50.0);
    if (!j.contains("branches") || !j.at("branches").is_array())
        throw ConfigError("grid.branches: expected an array");
    const auto& br = j.at("branches");
    for (std::size_t i = 0; i < br.size(); ++i) {
        const std::string w = "grid.branches[" + std::to_string(i) + "]";
        check_keys(br[i], w, {"series_R", "series_L_d", "series_L_q", "shunt_R", "shunt_C"});
        LadderBranch b;
        b.series_R = require_number(br[i], w, "series_R");
        b.series_L_d = require_number(br[i], w, "series_L_d");
        b.series_L_q = get_number(br[i], w, "series_L_q", b.series_L_d);
        b.shunt_R = get_optional(br[i], w, "shunt_R");
        b.shunt_C = get_optional(br[i], w, "shunt_C");
        c.branches.push_back(b);
    }
    validated("grid", [&] { c.validate(); });
    return c;
}

LadderNetworkConfig load_network_config(const fs::path& path) {
    return parse_network_config(parse_file(path));
}

ordered_json to_json(const LadderNetworkConfig& c) {
    ordered_json j;
    j["port_shunt_capacitance"] = c.port_shunt_capacitance;
    j["base_frequency"] = c.base_frequency;
    j["branches"] = ordered_json::array();
    for (const auto& b : c.branches) {
        ordered_json o;
        o["series_R"] = b.series_R;
        o["series_L_d"] = b.series_L_d;
        o["series_L_q"] = b.series_L_q;
        if (b.shunt_R) o["shunt_R"] = *b.shunt_R;
        if (b.shunt_C) o["shunt_C"] = *b.shunt_C;
        j["branches"].push_back(o);
    }
    return j;
}

ExperimentConfig parse_experiment_config(const json& j, const fs::path& base_dir) {
    check_keys(j, "config",
               {"grid", "excitation", "duration_s", "Ts", "noise", "transient_magnitude",
                "transient_seed", "injection_filter", "methods", "bands", "output_dir",
                "threads"});
    ExperimentConfig c;

    if (!j.contains("grid")) throw ConfigError("grid: missing");
    const auto& g = j.at("grid");
    if (g.is_string()) {
        fs::path p = g.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        if (!fs::exists(p)) throw ConfigError("grid: network file " + p.string() + " not found");
        c.grid = load_network_config(p);
    } else {
        c.grid = parse_network_config(g);
    }

    if (j.contains("excitation")) {
        const auto& e = j.at("excitation");
        check_keys(e, "excitation", {"amplitude", "seed", "channel_seeds"});
        c.amplitude = get_number(e, "excitation", "amplitude", c.amplitude);
        c.excitation_seed = get_seed(e, "excitation", "seed", c.excitation_seed);
        if (e.contains("channel_seeds")) {
            const auto& s = e.at("channel_seeds");
            if (!s.is_array() || s.size() != 2 || !s[0].is_number_unsigned() ||
                !s[1].is_number_unsigned())
                throw ConfigError("excitation.channel_seeds: expected [seed_d, seed_q]");
            c.channel_seeds = std::pair{s[0].get<std::uint64_t>(), s[1].get<std::uint64_t>()};
        }
    }
    c.duration_s = get_number(j, "", "duration_s", c.duration_s);
    c.sample_period = get_number(j, "", "Ts", c.sample_period);

    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        check_keys(n, "noise",
                   {"accuracy_class", "reference_magnitude_v", "reference_magnitude_i", "seed"});
        c.noise.accuracy_class = get_number(n, "noise", "accuracy_class", c.noise.accuracy_class);
        c.noise.reference_magnitude_v =
            get_number(n, "noise", "reference_magnitude_v", c.noise.reference_magnitude_v);
        c.noise.reference_magnitude_i =
            get_number(n, "noise", "reference_magnitude_i", c.noise.reference_magnitude_i);
        c.noise.seed = get_seed(n, "noise", "seed", c.noise.seed);
    }
    c.transient_magnitude = get_number(j, "", "transient_magnitude", c.transient_magnitude);
    c.transient_seed = get_seed(j, "", "transient_seed", c.transient_seed);

    if (j.contains("injection_filter")) {
        const auto& f = j.at("injection_filter");
        if (f.is_null()) {
            c.injection_filter.enabled = false;
        } else {
            check_keys(f, "injection_filter", {"order", "cutoff_hz"});
            c.injection_filter.order = get_int(f, "injection_filter", "order", 4);
            c.injection_filter.cutoff_hz = get_number(f, "injection_filter", "cutoff_hz", 2000.0);
        }
    }

    if (!j.contains("methods") || !j.at("methods").is_array())
        throw ConfigError("methods: expected an array");
    for (std::size_t i = 0; i < j.at("methods").size(); ++i)
        c.methods.push_back(parse_method(j.at("methods")[i], "methods[" + std::to_string(i) + "]"));

    if (j.contains("bands")) {
        const auto& b = j.at("bands");
        if (!b.is_array()) throw ConfigError("bands: expected an array");
        for (std::size_t i = 0; i < b.size(); ++i) {
            const std::string w = "bands[" + std::to_string(i) + "]";
            check_keys(b[i], w, {"f_min", "f_max"});
            c.bands.push_back({get_number(b[i], w, "f_min", 0.0), require_number(b[i], w, "f_max")});
        }
    } else {
        c.bands.push_back({0.0, 2000.0});
    }
    c.output_dir = get_string(j, "", "output_dir", c.output_dir);
    c.threads = get_int(j, "", "threads", c.threads);
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
    if (!fs::exists(path)) throw MissingInputError("config file " + path.string() + " not found");
    return parse_experiment_config(parse_file(path), path.parent_path());
}

ordered_json to_json(const ExperimentConfig& c) {
    ordered_json j;
    j["grid"] = to_json(c.grid);
    const auto seeds = c.excitation().channel_seeds();
    j["excitation"] = {{"amplitude", c.amplitude},
                       {"seed", c.excitation_seed},
                       {"channel_seeds", {seeds.first, seeds.second}}};
    j["duration_s"] = c.duration_s;
    j["Ts"] = c.sample_period;
    j["noise"] = {{"accuracy_class", c.noise.accuracy_class},
                  {"reference_magnitude_v", c.noise.reference_magnitude_v},
                  {"reference_magnitude_i", c.noise.reference_magnitude_i},
                  {"seed", c.noise.seed}};
    j["transient_magnitude"] = c.transient_magnitude;
    j["transient_seed"] = c.transient_seed;
    if (c.injection_filter.enabled)
        j["injection_filter"] = {{"order", c.injection_filter.order},
                                 {"cutoff_hz", c.injection_filter.cutoff_hz}};
    else
        j["injection_filter"] = nullptr;
    j["methods"] = ordered_json::array();
    for (const auto& m : c.methods) j["methods"].push_back(method_to_json(m));
    j["bands"] = ordered_json::array();
    for (const auto& b : c.bands) j["bands"].push_back({{"f_min", b.f_min}, {"f_max", b.f_max}});
    j["output_dir"] = c.output_dir;
    j["threads"] = c.threads;
    return j;
}

}  // namespace gridscan
