#include "imtosc/cli.hpp"

#include "imtosc/io.hpp"
#include "imtosc/parallel.hpp"
#include "imtosc/plot.hpp"
#include "imtosc/rng.hpp"

#include <cmath>
#include <numbers>

namespace imtosc::cli {

using nlohmann::json;

namespace {

std::filesystem::path resolve_input(const std::filesystem::path& base, const std::string& rel, const std::string& field) {
    const std::filesystem::path p = std::filesystem::path(rel).is_absolute() ? std::filesystem::path(rel) : base / rel;
    if (!std::filesystem::is_regular_file(p)) throw ConfigError(field, "file not found: " + p.string());
    return p;
}

std::vector<double> index_axis(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = static_cast<double>(k);
    return v;
}

Matrix image_matrix(const GrayImage& img) {
    Matrix m(static_cast<Eigen::Index>(img.height), static_cast<Eigen::Index>(img.width));
    for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x) m(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = img.at(x, y);
    return m;
}

void add_plot(CommandResult& r, bool enabled, const std::string& name, const std::string& csv, PlotKind kind,
              const PlotOptions& opts = {}) {
    if (enabled) r.artifacts.push_back({name, emit_plot(csv, kind, opts)});
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

CommandResult run_simulate(const ExperimentConfig& cfg) {
    const NetworkSpec net = cfg.network.build();
    InitialCondition ic;
    if (cfg.initial) {
        ic.x0 = Eigen::Map<const Vector>(cfg.initial->x0.data(), static_cast<Eigen::Index>(cfg.initial->x0.size()));
        ic.s0 = cfg.initial->s0;
    } else {
        ic = random_initial_condition(net, cfg.seed);
    }
    const Trajectory traj = run(net, ic.x0, ic.s0, cfg.sim);

    CommandResult r;
    const std::string tcsv = trajectory_csv(traj);
    r.artifacts.push_back({"trajectory.csv", tcsv});
    r.artifacts.push_back({"events.csv", events_csv(traj)});
    add_plot(r, cfg.plots, "trajectory.svg", tcsv, PlotKind::Timeseries, {"node voltages", "v1", "v2"});

    r.results["events"] = traj.events.size();
    r.results["final_t"] = traj.final_t;
    r.results["warnings"] = traj.warnings;
    json periods = json::array();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        try {
            periods.push_back(switching_phases(traj, i).periods.back());
        } catch (const TooFewEvents&) {
            periods.push_back(nullptr);
        }
    }
    r.results["last_periods"] = periods;
    if (const auto orbit = detect_periodic_orbit(traj)) {
        r.results["orbit_period"] = orbit->period;
        std::string ocsv = "time";
        for (std::size_t i = 1; i <= traj.size(); ++i) ocsv += ",v" + std::to_string(i);
        ocsv += '\n';
        for (std::size_t k = 0; k < orbit->times.size(); ++k) {
            ocsv += format_double(orbit->times[k]);
            for (Eigen::Index i = 0; i < orbit->states[k].size(); ++i) ocsv += "," + format_double(orbit->states[k](i));
            ocsv += '\n';
        }
        r.artifacts.push_back({"orbit.csv", ocsv});
        if (traj.size() >= 2) add_plot(r, cfg.plots, "orbit.svg", ocsv, PlotKind::Scatter, {"steady-state orbit", "v1", "v2"});
        r.summary.push_back("period=" + format_double(orbit->period));
    } else {
        r.results["orbit_period"] = nullptr;
    }
    if (traj.size() >= 2) {
        const auto lock = classify_locking(traj);
        r.results["locking"] = to_string(lock.kind);
        r.results["delta_phi"] = lock.delta_phi;
        r.summary.push_back(std::string("locking=") + to_string(lock.kind));
    }
    r.summary.push_back("events=" + std::to_string(traj.events.size()));
    return r;
}

CommandResult run_lock_sweep(const ExperimentConfig& cfg, std::size_t jobs) {
    const auto& ls = cfg.lock_sweep;
    const auto r_c = ls.r_c.values();
    const auto c_c = ls.c_c.values();
    const OscillatorSpec osc = ls.oscillator.build();
    const std::size_t cells = r_c.size() * c_c.size();
    std::vector<LockingResult> outcomes(cells * ls.trials);
    parallel_for(outcomes.size(), jobs, [&](std::size_t item) {
        const std::size_t cell = item / ls.trials;
        const std::size_t trial = item % ls.trials;
        const NetworkSpec net({osc, osc}, {{0, 1, c_c[cell % c_c.size()], 1.0 / r_c[cell / c_c.size()]}});
        const auto ic = random_initial_condition(net, derive_seed(cfg.seed, trial));
        SimConfig sc;
        sc.t_end = ls.t_end;
        sc.event_tol = ls.event_tol;
        sc.sample_dt = 0.0;
        sc.seed = cfg.seed;
        outcomes[item] = classify_locking(simulate(net, ic.x0, ic.s0, sc), ls.eps_phase, ls.orbit_tol);
    });

    const auto rows = static_cast<Eigen::Index>(r_c.size());
    const auto cols = static_cast<Eigen::Index>(c_c.size());
    Matrix code(rows, cols), in_frac(rows, cols), anti_frac(rows, cols);
    std::string trials_csv = "r_c,c_c,trial,seed,kind,delta_phi\n";
    json bistable = json::array();
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const auto ri = static_cast<Eigen::Index>(cell / c_c.size());
        const auto ci = static_cast<Eigen::Index>(cell % c_c.size());
        std::size_t n_in = 0, n_anti = 0;
        for (std::size_t t = 0; t < ls.trials; ++t) {
            const auto& o = outcomes[cell * ls.trials + t];
            n_in += o.kind == LockingKind::InPhase;
            n_anti += o.kind == LockingKind::AntiPhase;
            trials_csv += format_double(r_c[static_cast<std::size_t>(ri)]) + "," + format_double(c_c[static_cast<std::size_t>(ci)]) +
                          "," + std::to_string(t) + "," + std::to_string(derive_seed(cfg.seed, t)) + "," +
                          to_string(o.kind) + "," + format_double(o.delta_phi) + "\n";
        }
        code(ri, ci) = (n_in > 0 ? 1.0 : 0.0) + (n_anti > 0 ? 2.0 : 0.0);
        in_frac(ri, ci) = static_cast<double>(n_in) / static_cast<double>(ls.trials);
        anti_frac(ri, ci) = static_cast<double>(n_anti) / static_cast<double>(ls.trials);
        if (n_in > 0 && n_anti > 0) {
            bistable.push_back({{"r_c", r_c[static_cast<std::size_t>(ri)]},
                                {"c_c", c_c[static_cast<std::size_t>(ci)]},
                                {"in_phase", n_in},
                                {"anti_phase", n_anti}});
        }
    }
    CommandResult r;
    const std::string map_csv = matrix_csv("r_c", "c_c", r_c, c_c, code);
    r.artifacts.push_back({"lock_map.csv", map_csv});
    r.artifacts.push_back({"inphase_fraction.csv", matrix_csv("r_c", "c_c", r_c, c_c, in_frac)});
    r.artifacts.push_back({"antiphase_fraction.csv", matrix_csv("r_c", "c_c", r_c, c_c, anti_frac)});
    r.artifacts.push_back({"lock_trials.csv", trials_csv});
    add_plot(r, cfg.plots, "lock_map.svg", map_csv, PlotKind::Heatmap,
             {"locking class (0 none, 1 in-phase, 2 anti-phase, 3 both)", "", ""});
    r.results["legend"] = "0 = neither, 1 = in-phase only, 2 = anti-phase only, 3 = bistable";
    r.results["bistable_cells"] = bistable;
    r.summary.push_back("bistable_cells=" + std::to_string(bistable.size()));
    return r;
}

CommandResult run_xor_surface(const ExperimentConfig& cfg, std::size_t jobs) {
    const auto g1 = cfg.vgs1.values();
    const auto g2 = cfg.vgs2.values();
    const XorSurface s = g1 == g2 ? xor_surface_square(g1, cfg.comparator, jobs)
                                  : xor_surface(g1, g2, cfg.comparator, jobs);
    Matrix locked(s.values.rows(), s.values.cols());
    for (Eigen::Index i = 0; i < locked.rows(); ++i)
        for (Eigen::Index j = 0; j < locked.cols(); ++j)
            locked(i, j) = s.locked[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ? 1.0 : 0.0;
    CommandResult r;
    const std::string csv = matrix_csv("vgs1", "vgs2", g1, g2, s.values);
    r.artifacts.push_back({"xor_surface.csv", csv});
    r.artifacts.push_back({"xor_locked.csv", matrix_csv("vgs1", "vgs2", g1, g2, locked)});
    add_plot(r, cfg.plots, "xor_surface.svg", csv, PlotKind::Heatmap, {"averaged XOR", "", ""});
    r.results["errors"] = s.errors;
    r.results["cells"] = static_cast<std::size_t>(s.values.size());
    r.results["min"] = number_or_null(s.values.minCoeff());
    r.results["max"] = number_or_null(s.values.maxCoeff());
    r.summary.push_back("cells=" + std::to_string(s.values.size()) + " failed=" + std::to_string(s.errors.size()));
    return r;
}

std::shared_ptr<const XorLookup> image_lookup(const ExperimentConfig& cfg, std::size_t jobs, CommandResult& r) {
    if (!cfg.image.use_lookup) return nullptr;
    auto lut = std::make_shared<const XorLookup>(cfg.image.v_gs_lo, cfg.image.v_gs_hi, cfg.image.lookup_resolution,
                                                 cfg.comparator, jobs);
    const auto& s = lut->surface();
    r.artifacts.push_back({"xor_lookup.csv", matrix_csv("vgs1", "vgs2", s.vgs1_grid, s.vgs2_grid, s.values)});
    r.results["lookup_errors"] = s.errors;
    return lut;
}

CommandResult run_saliency(const ExperimentConfig& cfg, const std::filesystem::path& base, std::size_t jobs) {
    const GrayImage img = read_pgm(resolve_input(base, cfg.saliency_input, "saliency.input"));
    if (img.width < 3 || img.height < 3) throw ConfigError("saliency.input", "image must be at least 3x3");
    CommandResult r;
    ImageCompareConfig ic = cfg.image;
    ic.jobs = jobs;
    const auto lut = image_lookup(cfg, jobs, r);
    const GrayImage map = saliency(img, ic, lut);
    const std::string csv = matrix_csv("y", "x", index_axis(map.height), index_axis(map.width), image_matrix(map));
    r.artifacts.push_back({"saliency.csv", csv});
    // The PGM is rescaled to full range; the CSV keeps raw XOR values.
    GrayImage shown = map;
    const auto [lo, hi] = std::minmax_element(map.pixels.begin(), map.pixels.end());
    for (auto& p : shown.pixels) p = *hi > *lo ? (p - *lo) / (*hi - *lo) : 0.0;
    r.artifacts.push_back({"saliency.pgm", format_pgm(shown)});
    add_plot(r, cfg.plots, "saliency.svg", csv, PlotKind::Heatmap, {"saliency", "", ""});
    r.results["min"] = *lo;
    r.results["max"] = *hi;
    r.summary.push_back("saliency min=" + format_double(*lo) + " max=" + format_double(*hi));
    return r;
}

CommandResult run_match(const ExperimentConfig& cfg, const std::filesystem::path& base, std::size_t jobs) {
    const GrayImage input = read_pgm(resolve_input(base, cfg.match.input, "match.input"));
    const GrayImage templ = read_pgm(resolve_input(base, cfg.match.templ, "match.template"));
    if (input.width != templ.width || input.height != templ.height) {
        throw ConfigError("match.template", "dimensions differ from match.input");
    }
    CommandResult r;
    ImageCompareConfig ic = cfg.image;
    ic.jobs = jobs;
    const auto lut = image_lookup(cfg, jobs, r);
    const MatchResult m = template_match(input, templ, ic, cfg.match.theta_xor, cfg.match.theta_wta, lut);
    const std::string csv =
        matrix_csv("y", "x", index_axis(input.height), index_axis(input.width), image_matrix(m.xor_map));
    r.artifacts.push_back({"match_xor.csv", csv});
    const std::string line = "fraction=" + format_double(m.fraction) + " decision=" + (m.decision ? "match" : "no-match");
    r.artifacts.push_back({"match.txt", line + "\n"});
    add_plot(r, cfg.plots, "match_xor.svg", csv, PlotKind::Heatmap, {"per-pixel XOR", "", ""});
    r.results["fraction"] = m.fraction;
    r.results["decision"] = m.decision;
    r.summary.push_back(line);
    return r;
}

CommandResult run_color(const ExperimentConfig& cfg, const std::filesystem::path& base, std::size_t jobs) {
    Graph g;
    if (!cfg.graph.dimacs.empty()) {
        g = read_dimacs(resolve_input(base, cfg.graph.dimacs, "graph.dimacs"));
    } else if (cfg.graph.family == "complete") {
        g = Graph::complete(cfg.graph.n);
    } else if (cfg.graph.family == "cycle") {
        g = Graph::cycle(cfg.graph.n);
    } else {
        g = Graph::petersen();
    }
    try {
        g.validate();
        if (g.n < 2 || !g.connected()) throw std::invalid_argument("graph must be connected with at least 2 vertices");
    } catch (const std::invalid_argument& e) {
        throw ConfigError("graph", e.what());
    }
    const auto runs = color_graph_all(g, cfg.coloring, jobs);
    const Coloring best = best_coloring(runs);
    CommandResult r;
    r.artifacts.push_back({"coloring.csv", coloring_csv(best)});
    std::string phases = "vertex,phase\n";
    for (std::size_t v = 0; v < best.phases.size(); ++v) phases += std::to_string(v + 1) + "," + format_double(best.phases[v]) + "\n";
    r.artifacts.push_back({"phases.csv", phases});
    std::string restarts = "restart,seed,colors,proper,conflicts\n";
    for (const auto& c : runs) {
        restarts += std::to_string(c.restart) + "," + std::to_string(c.seed) + "," + std::to_string(c.num_colors) + "," +
                    (c.proper ? "true" : "false") + "," + std::to_string(c.conflicts.size()) + "\n";
    }
    r.artifacts.push_back({"restarts.csv", restarts});
    const std::string summary = coloring_summary(best);
    r.artifacts.push_back({"coloring_report.txt", summary + "\n"});
    r.results["colors"] = best.num_colors;
    r.results["proper"] = best.proper;
    r.results["restart"] = best.restart;
    r.results["restart_seed"] = best.seed;
    r.summary.push_back(summary);
    return r;
}

CommandResult run_kuramoto(const ExperimentConfig& cfg) {
    const auto& k = cfg.kuramoto;
    std::vector<double> theta0 = k.theta0;
    if (theta0.empty()) {
        CounterRng rng(cfg.seed, 0);
        for (std::size_t i = 0; i < k.omegas.size(); ++i) theta0.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    }
    const auto traj = kuramoto_simulate(k.omegas, k.K, theta0, k.sim);
    CommandResult r;
    const std::string csv = kuramoto_csv(traj);
    r.artifacts.push_back({"kuramoto.csv", csv});
    add_plot(r, cfg.plots, "kuramoto.svg", csv, PlotKind::Timeseries, {"phases", "", ""});
    const double r_final = order_parameter(traj.phases.back());
    r.results["theta0"] = theta0;
    r.results["order_parameter"] = r_final;
    if (k.omegas.size() == 2 && traj.times.size() >= 2) {
        const std::size_t mid = traj.times.size() / 2;
        const double drift = (traj.unwrapped.back()[1] - traj.unwrapped.back()[0]) -
                             (traj.unwrapped[mid][1] - traj.unwrapped[mid][0]);
        r.results["phase_difference_drift"] = drift;
        r.results["locked"] = std::abs(drift) < std::numbers::pi;
    }
    r.summary.push_back("order_parameter=" + format_double(r_final));
    return r;
}

}  // namespace

CommandResult execute(const ExperimentConfig& cfg, const std::filesystem::path& base_dir, std::size_t jobs) {
    const auto& c = cfg.command;
    if (c == "simulate") return run_simulate(cfg);
    if (c == "lock-sweep") return run_lock_sweep(cfg, jobs);
    if (c == "xor-surface") return run_xor_surface(cfg, jobs);
    if (c == "saliency") return run_saliency(cfg, base_dir, jobs);
    if (c == "match") return run_match(cfg, base_dir, jobs);
    if (c == "color") return run_color(cfg, base_dir, jobs);
    if (c == "kuramoto") return run_kuramoto(cfg);
    throw ConfigError("command", "unknown command '" + c + "'");
}

}  // namespace imtosc::cli
