// dpsim: command-line front end for sweeps, simulations and trace validation.

#include "dps/simulator.hpp"
#include "dps/sweep.hpp"
#include "dps/table.hpp"
#include "dps/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using json = nlohmann::json;

struct OutputOptions {
    std::string format = "csv";
    std::string path; // empty: stdout
};

void emit(const dps::Table& table, const OutputOptions& out)
{
    const auto format = dps::parse_table_format(out.format);
    if (out.path.empty()) {
        dps::write_table(std::cout, table, format);
        return;
    }
    std::ofstream file(out.path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot write " + out.path);
    }
    dps::write_table(file, table, format);
}

json load_config(const std::string& path)
{
    if (path.empty()) {
        return json::object();
    }
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config file " + path + ": " + e.what());
    }
}

// Config values fill in whatever was not given on the command line.
template <class T>
void from_config(const json& cfg, const char* key, const CLI::Option* flag, T& target)
{
    if (flag->count() == 0 && cfg.contains(key)) {
        target = cfg.at(key).get<T>();
    }
}

void apply_energy(const json& cfg, dps::EnergyParams& e, const std::map<std::string, CLI::Option*>& flags)
{
    const json energy = cfg.value("energy", json::object());
    from_config(energy, "en_tx_J", flags.at("en-tx"), e.en_tx);
    from_config(energy, "en_rx_J", flags.at("en-rx"), e.en_rx);
    from_config(energy, "en_min_J", flags.at("en-min"), e.en_min);
    from_config(energy, "payload_scale", flags.at("payload-scale"), e.payload_scale);
}

std::vector<dps::Scheme> parse_schemes(const std::vector<std::string>& names)
{
    std::vector<dps::Scheme> out;
    for (const auto& n : names) {
        out.push_back(dps::parse_scheme(n));
    }
    return out;
}

struct Common {
    double rate = 1.0 / 60.0;
    double period = 3.0 * 86400.0;
    std::string mode = "gw-unicast-aggregated";
    std::uint64_t seed = dps::kDefaultSeed;
    std::uint64_t samples = 1'000'000;
    unsigned threads = 0;
    std::string config;
    OutputOptions out;
    dps::EnergyParams energy;
    std::map<std::string, CLI::Option*> flags;
};

void add_common(CLI::App* cmd, Common& c, bool with_energy)
{
    c.flags["rate"] = cmd->add_option("--rate", c.rate, "measurements per second (f)")->check(CLI::PositiveNumber);
    c.flags["period"] = cmd->add_option("--period", c.period, "seconds between model choices (T)")->check(CLI::PositiveNumber);
    c.flags["mode"] = cmd->add_option("--mode", c.mode,
                                      "model dissemination: independent, gw-unicast, sensor-chosen, "
                                      "gw-unicast-aggregated or gw-broadcast");
    c.flags["seed"] = cmd->add_option("--seed", c.seed, "master random seed");
    c.flags["samples"] = cmd->add_option("--samples", c.samples, "Monte Carlo samples per MVN probability");
    c.flags["threads"] = cmd->add_option("--threads", c.threads, "worker threads (0: all cores)");
    cmd->add_option("--config", c.config, "JSON file with defaults for any option");
    c.flags["format"] = cmd->add_option("--format", c.out.format, "output format: csv or json");
    cmd->add_option("--out", c.out.path, "output file (default: stdout)");
    if (with_energy) {
        c.flags["en-tx"] = cmd->add_option("--en-tx", c.energy.en_tx, "energy per transmitted packet [J]");
        c.flags["en-rx"] = cmd->add_option("--en-rx", c.energy.en_rx, "energy per received packet [J]");
        c.flags["en-min"] = cmd->add_option("--en-min", c.energy.en_min, "fixed energy per period [J]");
        c.flags["payload-scale"] = cmd->add_option("--payload-scale", c.energy.payload_scale,
                                                   "cost multiplier of aggregated packets");
    }
}

json resolve_common(Common& c, bool with_energy)
{
    json cfg = load_config(c.config);
    from_config(cfg, "rate", c.flags["rate"], c.rate);
    from_config(cfg, "period", c.flags["period"], c.period);
    from_config(cfg, "mode", c.flags["mode"], c.mode);
    from_config(cfg, "seed", c.flags["seed"], c.seed);
    from_config(cfg, "samples", c.flags["samples"], c.samples);
    from_config(cfg, "threads", c.flags["threads"], c.threads);
    from_config(cfg, "format", c.flags["format"], c.out.format);
    if (with_energy) {
        apply_energy(cfg, c.energy, c.flags);
    }
    dps::parse_table_format(c.out.format); // fail before any computation
    return cfg;
}

dps::Table simulation_table(const dps::TreeInstance& tree, const dps::SimResult& r,
                            const dps::ModelComparison& cmp)
{
    dps::Table t;
    t.columns = {"node", "ring", "parent", "scheme", "slots", "tx_packets", "rx_packets", "data_tx_packets",
                 "data_rx_packets", "model_tx_packets", "model_rx_packets", "expected_tx_packets",
                 "expected_rx_packets", "sigma_tx_packets", "sigma_rx_packets", "within_3sigma"};
    for (std::size_t id = 1; id < tree.nodes.size(); ++id) {
        const auto& c = r.nodes[id];
        const auto& ctx = cmp.nodes[2 * (id - 1)];
        const auto& crx = cmp.nodes[2 * (id - 1) + 1];
        t.add_row({static_cast<std::int64_t>(id), static_cast<std::int64_t>(tree.nodes[id].ring),
                   static_cast<std::int64_t>(tree.nodes[id].parent), std::string(dps::to_string(r.scheme)),
                   static_cast<std::int64_t>(r.slots), c.tx(), c.rx(), c.data_tx, c.data_rx, c.model_tx,
                   c.model_rx, ctx.expected, crx.expected, ctx.sigma, crx.sigma, ctx.within && crx.within});
    }
    return t;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Traffic and energy model of dual prediction and aggregation in ring-shaped sensor networks"};
    app.require_subcommand(1);
    // stdout carries the tables; diagnostics go to stderr
    spdlog::set_default_logger(spdlog::stderr_color_mt("dpsim"));
    spdlog::set_pattern("dpsim: %l: %v");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "evaluate the analytical model over a parameter grid");
    Common sc;
    dps::SweepSpec spec;
    std::vector<std::string> sweep_schemes{"none", "prediction-only", "aggregation-only", "combined"};
    add_common(sweep, sc, true);
    auto* f_c = sweep->add_option("--C", spec.neighbors, "neighbors per node (list)");
    auto* f_d = sweep->add_option("--D", spec.rings, "ring counts (list)");
    auto* f_alpha = sweep->add_option("--alpha", spec.accuracy, "prediction accuracies (list)");
    auto* f_rho = sweep->add_option("--rho", spec.correlation, "correlation coefficients (list)");
    auto* f_schemes = sweep->add_option("--schemes", sweep_schemes, "schemes to report (list)");
    auto* f_ring = sweep->add_option("--ring", spec.ring, "ring of the reported node");
    auto* f_sim = sweep->add_flag("--simulate", spec.simulate, "add simulator columns and 3-sigma flags");
    auto* f_slots = sweep->add_option("--slots", spec.simulate_slots, "simulated slots per point (0: f T)");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "simulate one configuration on an explicit tree");
    Common mc;
    int sim_c = 3;
    int sim_d = 5;
    double sim_alpha = 0.9;
    double sim_rho = 0.5;
    std::size_t sim_slots = 0;
    std::vector<std::string> sim_schemes{"none", "prediction-only", "aggregation-only", "combined"};
    add_common(simulate, mc, false);
    auto* s_c = simulate->add_option("--C", sim_c, "neighbors per node");
    auto* s_d = simulate->add_option("--D", sim_d, "rings");
    auto* s_alpha = simulate->add_option("--alpha", sim_alpha, "prediction accuracy");
    auto* s_rho = simulate->add_option("--rho", sim_rho, "correlation coefficient");
    auto* s_schemes = simulate->add_option("--schemes", sim_schemes, "schemes to run (list)");
    auto* s_slots = simulate->add_option("--slots", sim_slots, "slots to simulate (0: f T)");

    // validate
    auto* validate = app.add_subcommand("validate", "run the trace validation pipeline");
    Common vc;
    std::string trace_path;
    std::string field = "temperature";
    std::string input_format = "auto";
    std::vector<int> nodes;
    int days = 8;
    double window = 300.0;
    std::string start;
    std::vector<double> grid = dps::kDefaultAccuracyGrid;
    std::vector<double> value_range;
    add_common(validate, vc, false);
    validate->add_option("--trace", trace_path, "trace file (Intel Lab text or CSV)")->required();
    auto* v_field = validate->add_option("--field", field, "Intel Lab column: temperature, humidity, light, voltage");
    auto* v_informat = validate->add_option("--input-format", input_format, "auto, intel or csv");
    auto* v_nodes = validate->add_option("--nodes", nodes, "node ids to keep (list; default all)");
    auto* v_days = validate->add_option("--days", days, "days to resample");
    auto* v_window = validate->add_option("--window", window, "resampling window [s]");
    auto* v_start = validate->add_option("--start", start, "slice start, YYYY-MM-DD[ HH:MM:SS] (default: first midnight)");
    auto* v_alpha = validate->add_option("--alpha", grid, "accuracy levels (list)");
    auto* v_range = validate->add_option("--value-range", value_range, "drop readings outside MIN MAX")->expected(2);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            const json cfg = resolve_common(sc, true);
            from_config(cfg, "C", f_c, spec.neighbors);
            from_config(cfg, "D", f_d, spec.rings);
            from_config(cfg, "alpha", f_alpha, spec.accuracy);
            from_config(cfg, "rho", f_rho, spec.correlation);
            from_config(cfg, "schemes", f_schemes, sweep_schemes);
            from_config(cfg, "ring", f_ring, spec.ring);
            from_config(cfg, "simulate", f_sim, spec.simulate);
            from_config(cfg, "slots", f_slots, spec.simulate_slots);
            spec.rate = sc.rate;
            spec.period = sc.period;
            spec.mode = dps::parse_dissemination_mode(sc.mode);
            spec.schemes = parse_schemes(sweep_schemes);
            spec.seed = sc.seed;
            spec.samples = sc.samples;
            spec.threads = sc.threads;
            spec.energy = sc.energy;
            spec.validate();
            emit(dps::run_sweep(spec), sc.out);
        } else if (simulate->parsed()) {
            const json cfg = resolve_common(mc, false);
            from_config(cfg, "C", s_c, sim_c);
            from_config(cfg, "D", s_d, sim_d);
            from_config(cfg, "alpha", s_alpha, sim_alpha);
            from_config(cfg, "rho", s_rho, sim_rho);
            from_config(cfg, "schemes", s_schemes, sim_schemes);
            from_config(cfg, "slots", s_slots, sim_slots);
            dps::DpsConfig dcfg;
            dcfg.accuracy = sim_alpha;
            dcfg.rate = mc.rate;
            dcfg.period = mc.period;
            dcfg.mode = dps::parse_dissemination_mode(mc.mode);
            dcfg.validate();
            const auto schemes = parse_schemes(sim_schemes);
            const std::size_t slots = sim_slots ? sim_slots : static_cast<std::size_t>(mc.rate * mc.period);

            const dps::TreeInstance tree = dps::build_tree(sim_c, sim_d, mc.seed);
            const auto n = static_cast<std::size_t>(tree.sensor_count());
            const std::vector<double> means(n, 0.0);
            const std::vector<double> stds(n, 1.0);
            const auto trace = dps::generate_measurements(dps::CorrelationSpec::equicorrelated(sim_rho), means,
                                                          stds, mc.rate, static_cast<double>(slots) / mc.rate,
                                                          mc.seed);
            dps::MvnOptions mvn;
            mvn.samples = mc.samples;
            mvn.seed = mc.seed;
            mvn.threads = mc.threads;
            dps::NoTransmissionCache cache(mvn);
            dps::Table all;
            std::size_t flagged = 0;
            for (dps::Scheme s : schemes) {
                const auto result = dps::run(s, tree, trace, dcfg, mc.seed);
                const auto expected = dps::expected_slot_traffic(tree, s, sim_alpha, sim_rho, cache);
                const auto cmp = dps::compare_with_model(result, tree, expected, dcfg.mode);
                flagged += cmp.flagged;
                dps::Table part = simulation_table(tree, result, cmp);
                if (all.columns.empty()) {
                    all.columns = part.columns;
                }
                for (auto& row : part.rows) {
                    all.add_row(std::move(row));
                }
            }
            emit(all, mc.out);
            spdlog::info("{} counter(s) outside 3 sigma of the model", flagged);
        } else if (validate->parsed()) {
            const json cfg = resolve_common(vc, false);
            from_config(cfg, "field", v_field, field);
            from_config(cfg, "input_format", v_informat, input_format);
            from_config(cfg, "nodes", v_nodes, nodes);
            from_config(cfg, "days", v_days, days);
            from_config(cfg, "window", v_window, window);
            from_config(cfg, "start", v_start, start);
            from_config(cfg, "alpha", v_alpha, grid);
            from_config(cfg, "value_range", v_range, value_range);

            dps::ParseOptions popts;
            popts.field = field;
            popts.nodes = std::set<int>(nodes.begin(), nodes.end());
            if (input_format == "intel") {
                popts.format = dps::TraceFormat::intel_lab;
            } else if (input_format == "csv") {
                popts.format = dps::TraceFormat::csv;
            } else if (input_format != "auto") {
                throw std::invalid_argument("unknown input format '" + input_format + "' (auto, intel or csv)");
            }
            if (value_range.size() == 2) {
                popts.value_range = std::make_pair(value_range[0], value_range[1]);
            }
            dps::ValidationOptions vopts;
            vopts.resample.days = days;
            vopts.resample.window = window;
            vopts.resample.seed = vc.seed;
            if (!start.empty()) {
                vopts.resample.start = dps::parse_timestamp(start);
            }
            vopts.accuracy_levels = grid;
            vopts.mvn.samples = vc.samples;
            vopts.mvn.seed = vc.seed;
            vopts.mvn.threads = vc.threads;

            const auto trace = dps::parse_trace(trace_path, popts);
            const auto rep = dps::validate_trace(trace, vopts);
            dps::Table t;
            t.columns = {"accuracy", "real_percent", "model_percent", "model_std_error_percent",
                         "difference_percent", "transmissions_packets", "aggregation_baseline_packets",
                         "no_dps_baseline_packets", "excluded_windows", "nodes", "average_correlation"};
            for (std::size_t i = 0; i < rep.rows.size(); ++i) {
                const auto& row = rep.rows[i];
                t.add_row({row.alpha, row.real_percent, row.model_percent, row.model_std_error, row.difference,
                           rep.counts.levels[i].transmissions, rep.counts.aggregation_baseline,
                           rep.counts.no_dps_baseline, rep.counts.excluded_windows,
                           static_cast<std::int64_t>(rep.nodes), rep.average_correlation});
            }
            emit(t, vc.out);
            spdlog::info("{} nodes, {} windows, coverage {:.1f}%, average correlation {:.6f}", rep.nodes,
                         rep.windows, 100.0 * rep.coverage, rep.average_correlation);
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
