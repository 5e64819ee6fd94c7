#include "imtosc/cli.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <type_traits>

#ifndef IMTOSC_VERSION
#define IMTOSC_VERSION "0.0.0"
#endif

namespace imtosc::cli {

using nlohmann::json;

namespace {

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    [[nodiscard]] std::string field(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    const json* find(const char* key) {
        used_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    template <class T>
    void get(const char* key, T& out) {
        const json* v = find(key);
        if (v) out = convert<T>(*v, field(key));
    }

    std::optional<Reader> child(const char* key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        return Reader(*v, field(key));
    }

    /// Rejects keys that were never looked up.
    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!used_.count(k)) throw ConfigError(field(k), "unknown field");
        }
    }

    template <class T>
    static T convert(const json& v, const std::string& where) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(where, "expected true or false");
            return v.get<bool>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
                throw ConfigError(where, "expected a non-negative integer");
            }
            return v.get<T>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(where, "expected a number");
            return v.get<T>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(where, "expected a string");
            return v.get<std::string>();
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
            if (!v.is_array()) throw ConfigError(where, "expected an array of numbers");
            std::vector<double> out;
            for (std::size_t k = 0; k < v.size(); ++k) out.push_back(convert<double>(v[k], where + "." + std::to_string(k)));
            return out;
        } else {
            static_assert(sizeof(T) == 0, "unsupported config type");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

/// Runs a module validate() and reports its message against `field`.
template <class F>
void checked(const std::string& field, F&& fn) {
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    } catch (const std::domain_error& e) {
        throw ConfigError(field, e.what());
    }
}

DeviceParams read_device(Reader r, DeviceParams d) {
    r.get("v_h", d.v_h);
    r.get("v_l", d.v_l);
    r.get("g_dm", d.g_dm);
    r.get("g_di", d.g_di);
    r.get("c_int", d.c_int);
    r.finish();
    return d;
}

json device_json(const DeviceParams& d) {
    return {{"v_h", d.v_h}, {"v_l", d.v_l}, {"g_dm", d.g_dm}, {"g_di", d.g_di}, {"c_int", d.c_int}};
}

OscillatorConfig read_oscillator(Reader r, OscillatorConfig o) {
    std::string kind = o.kind == OscillatorKind::DD ? "dd" : "dr";
    r.get("kind", kind);
    if (kind == "dr") {
        o.kind = OscillatorKind::DR;
        if (auto c = r.child("device")) o.device = read_device(*c, o.device);
        r.get("g_s", o.g_s);
    } else if (kind == "dd") {
        o.kind = OscillatorKind::DD;
        if (auto c = r.child("top")) o.device = read_device(*c, o.device);
        if (auto c = r.child("bottom")) o.bottom = read_device(*c, o.bottom);
    } else {
        throw ConfigError(r.field("kind"), "expected \"dr\" or \"dd\"");
    }
    r.get("c_lump", o.c_lump);
    r.finish();
    return o;
}

json oscillator_json(const OscillatorConfig& o) {
    if (o.kind == OscillatorKind::DR) {
        return {{"kind", "dr"}, {"device", device_json(o.device)}, {"g_s", o.g_s}, {"c_lump", o.c_lump}};
    }
    return {{"kind", "dd"}, {"top", device_json(o.device)}, {"bottom", device_json(o.bottom)}, {"c_lump", o.c_lump}};
}

GridAxis read_axis(Reader r, GridAxis a) {
    r.get("lo", a.lo);
    r.get("hi", a.hi);
    r.get("n", a.n);
    r.finish();
    if (a.n == 0) throw ConfigError(r.field("n"), "must be >= 1");
    if (a.n > 1 && !(a.lo < a.hi)) throw ConfigError(r.field("hi"), "must exceed lo when n > 1");
    return a;
}

json axis_json(const GridAxis& a) { return {{"lo", a.lo}, {"hi", a.hi}, {"n", a.n}}; }

std::vector<json> array_of(Reader& r, const char* key) {
    const json* v = r.find(key);
    if (!v) return {};
    if (!v->is_array()) throw ConfigError(r.field(key), "expected an array");
    return std::vector<json>(v->begin(), v->end());
}

ConductionState read_state(const json& v, const std::string& where) {
    if (v.is_string()) {
        if (v == "metallic") return ConductionState::Metallic;
        if (v == "insulating") return ConductionState::Insulating;
    } else if (v.is_number_integer() && (v == 0 || v == 1)) {
        return state_from_bit(v.get<int>());
    }
    throw ConfigError(where, "expected \"metallic\" or \"insulating\"");
}

void read_network(Reader r, ExperimentConfig& cfg) {
    if (r.find("oscillators")) {
        cfg.network.oscillators.clear();
        std::size_t k = 0;
        for (const auto& o : array_of(r, "oscillators")) {
            cfg.network.oscillators.push_back(
                read_oscillator(Reader(o, r.field("oscillators." + std::to_string(k++))), OscillatorConfig{}));
        }
    }
    std::size_t k = 0;
    for (const auto& c : array_of(r, "couplings")) {
        Reader cr(c, r.field("couplings." + std::to_string(k++)));
        CouplingSpec cs;
        cr.get("i", cs.i);
        cr.get("j", cs.j);
        cr.get("c_c", cs.c_c);
        cr.get("g_c", cs.g_c);
        cr.finish();
        cfg.network.couplings.push_back(cs);
    }
    r.finish();
    checked(r.field("oscillators"), [&] { (void)cfg.network.build(); });
}

void read_sim(Reader r, SimConfig& s) {
    r.get("t_end", s.t_end);
    r.get("event_tol", s.event_tol);
    r.get("sample_dt", s.sample_dt);
    r.get("max_events", s.max_events);
    std::string integ = s.integrator == Integrator::ExactExp ? "exact" : "rk";
    r.get("integrator", integ);
    if (integ == "exact") {
        s.integrator = Integrator::ExactExp;
    } else if (integ == "rk") {
        s.integrator = Integrator::AdaptiveRK;
    } else {
        throw ConfigError(r.field("integrator"), "expected \"exact\" or \"rk\"");
    }
    r.get("rk_rtol", s.rk_rtol);
    r.get("rk_atol", s.rk_atol);
    r.finish();
}

ComparatorConfig read_comparator(Reader r, ComparatorConfig c) {
    if (auto d = r.child("device")) c.device = read_device(*d, c.device);
    r.get("c_lump", c.c_lump);
    r.get("c_c", c.c_c);
    r.get("k", c.k);
    r.get("v_t", c.v_t);
    r.get("v_gs_min", c.v_gs_min);
    r.get("v_gs_max", c.v_gs_max);
    r.get("t_end", c.t_end);
    r.get("event_tol", c.event_tol);
    r.get("window_periods", c.window_periods);
    r.get("complement", c.complement);
    std::string rule = c.thresholds == ThresholdRule::HalfDuty ? "half_duty" : "band_midpoint";
    r.get("thresholds", rule);
    if (rule == "half_duty") {
        c.thresholds = ThresholdRule::HalfDuty;
    } else if (rule == "band_midpoint") {
        c.thresholds = ThresholdRule::BandMidpoint;
    } else {
        throw ConfigError(r.field("thresholds"), "expected \"half_duty\" or \"band_midpoint\"");
    }
    r.finish();
    return c;
}

json comparator_json(const ComparatorConfig& c) {
    return {{"device", device_json(c.device)},
            {"c_lump", c.c_lump},
            {"c_c", c.c_c},
            {"k", c.k},
            {"v_t", c.v_t},
            {"v_gs_min", c.v_gs_min},
            {"v_gs_max", c.v_gs_max},
            {"t_end", c.t_end},
            {"event_tol", c.event_tol},
            {"window_periods", c.window_periods},
            {"complement", c.complement},
            {"thresholds", c.thresholds == ThresholdRule::HalfDuty ? "half_duty" : "band_midpoint"}};
}

void read_image(Reader r, ImageCompareConfig& im) {
    r.get("v_gs_lo", im.v_gs_lo);
    r.get("v_gs_hi", im.v_gs_hi);
    r.get("use_lookup", im.use_lookup);
    r.get("lookup_resolution", im.lookup_resolution);
    r.finish();
}

const std::set<std::string>& blocks_for(const std::string& command) {
    static const std::map<std::string, std::set<std::string>> table{
        {"simulate", {"network", "sim", "initial"}},
        {"lock-sweep", {"lock_sweep"}},
        {"xor-surface", {"comparator", "grid"}},
        {"saliency", {"comparator", "image", "saliency"}},
        {"match", {"comparator", "image", "match"}},
        {"color", {"graph", "coloring"}},
        {"kuramoto", {"kuramoto"}},
    };
    const auto it = table.find(command);
    if (it == table.end()) throw ConfigError("command", "unknown command '" + command + "'");
    return it->second;
}

}  // namespace

const std::vector<std::string>& experiment_commands() {
    static const std::vector<std::string> cmds{"simulate", "lock-sweep", "xor-surface", "saliency",
                                               "match",    "color",      "kuramoto"};
    return cmds;
}

OscillatorSpec OscillatorConfig::build() const {
    return kind == OscillatorKind::DR ? OscillatorSpec::dr(device, g_s, c_lump)
                                      : OscillatorSpec::dd(device, bottom, c_lump);
}

NetworkSpec NetworkConfig::build() const {
    std::vector<OscillatorSpec> oscs;
    for (const auto& o : oscillators) oscs.push_back(o.build());
    return NetworkSpec(std::move(oscs), couplings);
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError(assignment, "override must have the form key=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string seg = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (seg.empty()) throw ConfigError(path, "empty path segment");
        json* next = nullptr;
        if (node->is_array()) {
            std::size_t idx = 0;
            const auto [p, ec] = std::from_chars(seg.data(), seg.data() + seg.size(), idx);
            if (ec != std::errc() || p != seg.data() + seg.size() || idx >= node->size()) {
                throw ConfigError(path, "'" + seg + "' is not a valid index");
            }
            next = &(*node)[idx];
        } else {
            if (node->is_null()) *node = json::object();
            if (!node->is_object()) throw ConfigError(path, "cannot descend into a scalar at '" + seg + "'");
            next = &(*node)[seg];
        }
        if (dot == std::string::npos) {
            *next = std::move(value);
            return;
        }
        node = next;
        start = dot + 1;
    }
}

ExperimentConfig parse_config(const std::string& command, const json& doc) {
    const auto& allowed = blocks_for(command);
    ExperimentConfig cfg;
    cfg.command = command;
    Reader root(doc, "");
    std::string declared = command;
    root.get("command", declared);
    if (declared != command) throw ConfigError("command", "config is for '" + declared + "', not '" + command + "'");
    root.get("seed", cfg.seed);
    root.get("out", cfg.out);
    root.get("plots", cfg.plots);
    const auto block = [&](const char* name) -> std::optional<Reader> {
        if (!allowed.count(name)) return std::nullopt;
        return root.child(name);
    };

    if (command == "simulate") {
        if (auto r = block("network")) read_network(*r, cfg);
        if (auto r = block("sim")) read_sim(*r, cfg.sim);
        cfg.sim.seed = cfg.seed;
        checked("sim", [&] { cfg.sim.validate(cfg.network.oscillators.size()); });
        if (auto r = block("initial")) {
            InitialConfig ic;
            r->get("x0", ic.x0);
            std::size_t k = 0;
            for (const auto& s : array_of(*r, "s0")) ic.s0.push_back(read_state(s, r->field("s0." + std::to_string(k++))));
            r->finish();
            const std::size_t n = cfg.network.oscillators.size();
            if (ic.x0.size() != n) throw ConfigError("initial.x0", "needs one voltage per oscillator");
            if (ic.s0.size() != n) throw ConfigError("initial.s0", "needs one state per oscillator");
            cfg.initial = std::move(ic);
        }
    } else if (command == "lock-sweep") {
        if (auto r = block("lock_sweep")) {
            auto& ls = cfg.lock_sweep;
            if (auto c = r->child("oscillator")) ls.oscillator = read_oscillator(*c, ls.oscillator);
            if (auto c = r->child("r_c")) ls.r_c = read_axis(*c, ls.r_c);
            if (auto c = r->child("c_c")) ls.c_c = read_axis(*c, ls.c_c);
            r->get("trials", ls.trials);
            r->get("t_end", ls.t_end);
            r->get("event_tol", ls.event_tol);
            r->get("eps_phase", ls.eps_phase);
            r->get("orbit_tol", ls.orbit_tol);
            r->finish();
        }
        const auto& ls = cfg.lock_sweep;
        if (ls.r_c.lo <= 0.0) throw ConfigError("lock_sweep.r_c.lo", "coupling resistance must be > 0");
        if (ls.c_c.lo < 0.0) throw ConfigError("lock_sweep.c_c.lo", "coupling capacitance must be >= 0");
        if (ls.trials == 0) throw ConfigError("lock_sweep.trials", "must be >= 1");
        if (!(ls.t_end > 0.0)) throw ConfigError("lock_sweep.t_end", "must be > 0");
        if (!(ls.eps_phase > 0.0)) throw ConfigError("lock_sweep.eps_phase", "must be > 0");
        checked("lock_sweep.oscillator", [&] {
            const auto check = validate_oscillation(ls.oscillator.build());
            if (!check.ok) throw std::invalid_argument(check.diagnostic);
        });
    } else if (command == "xor-surface" || command == "saliency" || command == "match") {
        if (auto r = block("comparator")) cfg.comparator = read_comparator(*r, cfg.comparator);
        checked("comparator", [&] { cfg.comparator.validate(); });
        if (auto r = block("grid")) {
            if (auto c = r->child("vgs1")) cfg.vgs1 = read_axis(*c, cfg.vgs1);
            if (auto c = r->child("vgs2")) cfg.vgs2 = read_axis(*c, cfg.vgs2);
            r->finish();
        }
        if (command == "xor-surface") {
            for (const auto* a : {&cfg.vgs1, &cfg.vgs2}) {
                const std::string name = a == &cfg.vgs1 ? "grid.vgs1" : "grid.vgs2";
                if (a->lo < cfg.comparator.v_gs_min || a->hi > cfg.comparator.v_gs_max) {
                    throw ConfigError(name, "must lie inside [comparator.v_gs_min, comparator.v_gs_max]");
                }
            }
        } else {
            if (auto r = block("image")) read_image(*r, cfg.image);
            cfg.image.comparator = cfg.comparator;
            checked("image", [&] { cfg.image.validate(); });
        }
        if (auto r = block("saliency")) {
            r->get("input", cfg.saliency_input);
            r->finish();
        }
        if (auto r = block("match")) {
            r->get("input", cfg.match.input);
            r->get("template", cfg.match.templ);
            r->get("theta_xor", cfg.match.theta_xor);
            r->get("theta_wta", cfg.match.theta_wta);
            r->finish();
        }
        if (command == "saliency" && cfg.saliency_input.empty()) throw ConfigError("saliency.input", "required");
        if (command == "match") {
            if (cfg.match.input.empty()) throw ConfigError("match.input", "required");
            if (cfg.match.templ.empty()) throw ConfigError("match.template", "required");
            if (!(cfg.match.theta_xor >= 0.0 && cfg.match.theta_xor <= 1.0)) {
                throw ConfigError("match.theta_xor", "must lie in [0, 1]");
            }
            if (!(cfg.match.theta_wta >= 0.0 && cfg.match.theta_wta <= 1.0)) {
                throw ConfigError("match.theta_wta", "must lie in [0, 1]");
            }
        }
    } else if (command == "color") {
        if (auto r = block("graph")) {
            r->get("dimacs", cfg.graph.dimacs);
            r->get("family", cfg.graph.family);
            r->get("n", cfg.graph.n);
            r->finish();
        }
        if (cfg.graph.dimacs.empty() && cfg.graph.family != "complete" && cfg.graph.family != "cycle" &&
            cfg.graph.family != "petersen") {
            throw ConfigError("graph.family", "expected \"complete\", \"cycle\" or \"petersen\"");
        }
        if (auto r = block("coloring")) {
            auto& c = cfg.coloring;
            if (auto d = r->child("device")) c.device = read_device(*d, c.device);
            r->get("g_s", c.g_s);
            r->get("c_lump", c.c_lump);
            r->get("c_c", c.c_c);
            r->get("t_end", c.t_end);
            r->get("event_tol", c.event_tol);
            r->get("gap_ratio", c.gap_ratio);
            r->get("merge_tol", c.merge_tol);
            r->get("restarts", c.restarts);
            r->finish();
        }
        cfg.coloring.seed = cfg.seed;
        checked("coloring", [&] { cfg.coloring.validate(); });
    } else if (command == "kuramoto") {
        if (auto r = block("kuramoto")) {
            auto& k = cfg.kuramoto;
            r->get("omegas", k.omegas);
            r->get("K", k.K);
            r->get("theta0", k.theta0);
            r->get("t_end", k.sim.t_end);
            r->get("sample_dt", k.sim.sample_dt);
            r->get("rtol", k.sim.rtol);
            r->get("atol", k.sim.atol);
            r->finish();
        }
        const auto& k = cfg.kuramoto;
        if (k.omegas.empty()) throw ConfigError("kuramoto.omegas", "needs at least one oscillator");
        if (!(k.K >= 0.0)) throw ConfigError("kuramoto.K", "must be >= 0");
        if (!k.theta0.empty() && k.theta0.size() != k.omegas.size()) {
            throw ConfigError("kuramoto.theta0", "needs one phase per oscillator");
        }
        checked("kuramoto", [&] { k.sim.validate(); });
    }
    root.finish();
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json j{{"command", cfg.command}, {"seed", cfg.seed}, {"out", cfg.out}, {"plots", cfg.plots}};
    const auto& c = cfg.command;
    if (c == "simulate") {
        json oscs = json::array();
        for (const auto& o : cfg.network.oscillators) oscs.push_back(oscillator_json(o));
        json cps = json::array();
        for (const auto& cp : cfg.network.couplings) cps.push_back({{"i", cp.i}, {"j", cp.j}, {"c_c", cp.c_c}, {"g_c", cp.g_c}});
        j["network"] = {{"oscillators", oscs}, {"couplings", cps}};
        const auto& s = cfg.sim;
        j["sim"] = {{"t_end", s.t_end},
                    {"event_tol", s.event_tol},
                    {"sample_dt", s.sample_dt},
                    {"max_events", s.max_events},
                    {"integrator", s.integrator == Integrator::ExactExp ? "exact" : "rk"},
                    {"rk_rtol", s.rk_rtol},
                    {"rk_atol", s.rk_atol}};
        if (cfg.initial) {
            json s0 = json::array();
            for (auto st : cfg.initial->s0) s0.push_back(st == ConductionState::Metallic ? "metallic" : "insulating");
            j["initial"] = {{"x0", cfg.initial->x0}, {"s0", s0}};
        }
    } else if (c == "lock-sweep") {
        const auto& ls = cfg.lock_sweep;
        j["lock_sweep"] = {{"oscillator", oscillator_json(ls.oscillator)},
                           {"r_c", axis_json(ls.r_c)},
                           {"c_c", axis_json(ls.c_c)},
                           {"trials", ls.trials},
                           {"t_end", ls.t_end},
                           {"event_tol", ls.event_tol},
                           {"eps_phase", ls.eps_phase},
                           {"orbit_tol", ls.orbit_tol}};
    } else if (c == "xor-surface" || c == "saliency" || c == "match") {
        j["comparator"] = comparator_json(cfg.comparator);
        if (c == "xor-surface") {
            j["grid"] = {{"vgs1", axis_json(cfg.vgs1)}, {"vgs2", axis_json(cfg.vgs2)}};
        } else {
            j["image"] = {{"v_gs_lo", cfg.image.v_gs_lo},
                          {"v_gs_hi", cfg.image.v_gs_hi},
                          {"use_lookup", cfg.image.use_lookup},
                          {"lookup_resolution", cfg.image.lookup_resolution}};
        }
        if (c == "saliency") j["saliency"] = {{"input", cfg.saliency_input}};
        if (c == "match") {
            j["match"] = {{"input", cfg.match.input},
                          {"template", cfg.match.templ},
                          {"theta_xor", cfg.match.theta_xor},
                          {"theta_wta", cfg.match.theta_wta}};
        }
    } else if (c == "color") {
        j["graph"] = {{"dimacs", cfg.graph.dimacs}, {"family", cfg.graph.family}, {"n", cfg.graph.n}};
        const auto& k = cfg.coloring;
        j["coloring"] = {{"device", device_json(k.device)},
                         {"g_s", k.g_s},
                         {"c_lump", k.c_lump},
                         {"c_c", k.c_c},
                         {"t_end", k.t_end},
                         {"event_tol", k.event_tol},
                         {"gap_ratio", k.gap_ratio},
                         {"merge_tol", k.merge_tol},
                         {"restarts", k.restarts}};
    } else if (c == "kuramoto") {
        const auto& k = cfg.kuramoto;
        j["kuramoto"] = {{"omegas", k.omegas},       {"K", k.K},           {"theta0", k.theta0},
                         {"t_end", k.sim.t_end},     {"sample_dt", k.sim.sample_dt},
                         {"rtol", k.sim.rtol},       {"atol", k.sim.atol}};
    }
    return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string config_hash(const ExperimentConfig& cfg) { return "fnv1a64:" + hex64(fnv1a64(to_json(cfg).dump())); }

json versions() {
    return {{"imtosc", IMTOSC_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"boost", BOOST_LIB_VERSION},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"cli11", CLI11_VERSION},
            {"compiler", __VERSION__}};
}

}  // namespace imtosc::cli
