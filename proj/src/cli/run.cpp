#include "imtosc/cli.hpp"

#include "imtosc/io.hpp"
#include "imtosc/plot.hpp"
#include "imtosc/rng.hpp"

#include <CLI11.hpp>

#include <ostream>
#include <thread>

namespace imtosc::cli {

using nlohmann::json;

namespace {

struct Options {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
};

int run_experiment(const std::string& command, const Options& opt, std::ostream& out) {
    const std::filesystem::path config_path(opt.config);
    json doc;
    {
        const std::string text = read_text_file(config_path);
        doc = json::parse(text, nullptr, false);
        if (doc.is_discarded()) throw ConfigError("config", "'" + opt.config + "' is not valid JSON");
    }
    for (const auto& s : opt.sets) apply_override(doc, s);
    if (opt.seed) doc["seed"] = *opt.seed;
    if (!opt.out.empty()) doc["out"] = opt.out;
    const ExperimentConfig cfg = parse_config(command, doc);
    const std::filesystem::path base = config_path.has_parent_path() ? config_path.parent_path() : ".";
    const std::size_t jobs = opt.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.jobs;

    const CommandResult result = execute(cfg, base, jobs);

    const std::filesystem::path out_dir(cfg.out);
    json artifacts = json::array();
    for (const auto& a : result.artifacts) {
        write_text_file(out_dir / a.name, a.content);
        artifacts.push_back({{"file", a.name}, {"fnv1a64", hex64(fnv1a64(a.content))}});
    }
    const json manifest{{"command", command},
                        {"config", to_json(cfg)},
                        {"config_hash", config_hash(cfg)},
                        {"seed", cfg.seed},
                        {"rng", CounterRng::kName},
                        {"versions", versions()},
                        {"artifacts", artifacts},
                        {"results", result.results}};
    write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    for (const auto& line : result.summary) out << line << "\n";
    out << "wrote " << result.artifacts.size() + 1 << " files to " << out_dir.string() << "\n";
    return kExitOk;
}

int run_plot(const std::string& input, const std::string& kind, const std::string& output, const PlotOptions& popts,
             std::ostream& out) {
    PlotKind k;
    try {
        k = plot_kind_from_string(kind);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("--kind", e.what());
    }
    const std::string svg = emit_plot(read_text_file(input), k, popts);
    const std::string target = output.empty() ? std::filesystem::path(input).replace_extension(".svg").string() : output;
    write_text_file(target, svg);
    out << "wrote " << target << "\n";
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulator and experiments for coupled insulator-metal-transition oscillators", "imtosc"};
    app.require_subcommand(1);
    app.set_version_flag("--version", IMTOSC_VERSION);

    Options opt;
    const std::map<std::string, std::string> descriptions{
        {"simulate", "simulate a network and export its trajectory"},
        {"lock-sweep", "map in-phase/anti-phase locking over coupling resistance and capacitance"},
        {"xor-surface", "evaluate the comparator XOR measure on a v_gs grid"},
        {"saliency", "compute a saliency map of a PGM image"},
        {"match", "compare a PGM image with a template"},
        {"color", "color a graph with an oscillator network"},
        {"kuramoto", "integrate the Kuramoto phase model"},
    };
    for (const auto& name : experiment_commands()) {
        auto* sub = app.add_subcommand(name, descriptions.at(name));
        sub->add_option("--config", opt.config, "JSON experiment config")->required();
        sub->add_option("--set", opt.sets, "override a dotted config path, e.g. sim.t_end=20");
        sub->add_option("--out", opt.out, "output directory (overrides config 'out')");
        sub->add_option("--seed", opt.seed, "base seed (overrides config 'seed')");
        sub->add_option("--jobs", opt.jobs, "worker threads, 0 = all cores")->envname("IMTOSC_JOBS");
    }
    std::string plot_input, plot_kind, plot_output;
    PlotOptions popts;
    auto* plot = app.add_subcommand("plot", "render an artifact CSV as SVG");
    plot->add_option("--input", plot_input, "artifact CSV")->required();
    plot->add_option("--kind", plot_kind, "heatmap, timeseries or scatter")->required();
    plot->add_option("--output", plot_output, "SVG path (default: input with .svg)");
    plot->add_option("--title", popts.title, "plot title");
    plot->add_option("--x", popts.x_column, "scatter x column")->capture_default_str();
    plot->add_option("--y", popts.y_column, "scatter y column")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << IMTOSC_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (plot->parsed()) return run_plot(plot_input, plot_kind, plot_output, popts, out);
        for (const auto& name : experiment_commands()) {
            if (app.got_subcommand(name)) return run_experiment(name, opt, out);
        }
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "simulation error: " << e.what() << "\n";
        return kExitSimulation;
    }
}

}  // namespace imtosc::cli
