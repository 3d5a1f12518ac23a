// smart-overlay: trace generation, ping-log import, experiment runs and
// report extraction for the overlay routing engine.
//
//   smart-overlay generate --spec spec.json --seed 7 --out trace.csv
//   smart-overlay import   --log pings.csv --topology topo.json --out trace.csv
//   smart-overlay run      --config run.json [--out-dir DIR]
//   smart-overlay report   --reports out/reports.ndjson --figure hops
//
// Exit codes: 0 success, 2 usage or input error, 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "smart/errors.hpp"
#include "smart/ingest.hpp"
#include "smart/metrics.hpp"
#include "smart/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw smart::ConfigError("cannot open " + path);
    }
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw smart::ConfigError("bad JSON in " + path + ": " + e.what());
    }
}

int cmd_generate(const std::string& spec_path, std::uint64_t seed, const std::string& out_path) {
    const smart::GeneratorSpec spec = smart::generator_spec_from_json(load_json_file(spec_path));
    const smart::LinkTrace trace = smart::generate_trace(spec, seed);

    std::ofstream out(out_path);
    if (!out) {
        throw smart::ConfigError("cannot write " + out_path);
    }
    smart::export_trace(trace, out);

    std::uint64_t lost = 0;
    for (std::size_t t = 0; t < trace.rounds(); ++t) {
        for (smart::NodeId a = 0; a < trace.node_count(); ++a) {
            for (smart::NodeId b = 0; b < trace.node_count(); ++b) {
                if (a != b && trace.at(t, a, b).lost) ++lost;
            }
        }
    }
    const std::uint64_t samples =
        trace.rounds() * trace.node_count() * (trace.node_count() - 1);
    std::cout << "wrote " << out_path << ": " << trace.node_count() << " nodes, "
              << trace.rounds() << " rounds, " << samples << " samples, " << lost
              << " lost\n";
    return kExitOk;
}

int cmd_import(const std::string& log_path, const std::string& topo_path,
               const std::string& out_path, std::uint64_t round_seconds) {
    std::ifstream topo_in(topo_path);
    if (!topo_in) {
        throw smart::ConfigError("cannot open " + topo_path);
    }
    const smart::OverlayTopology topo = smart::load_topology(topo_in);

    std::ifstream log_in(log_path);
    if (!log_in) {
        throw smart::ConfigError("cannot open " + log_path);
    }
    smart::ImportReport report;
    const smart::LinkTrace trace = smart::import_ping_log(log_in, topo, round_seconds, &report);

    std::ofstream out(out_path);
    if (!out) {
        throw smart::ConfigError("cannot write " + out_path);
    }
    smart::export_trace(trace, out);

    char cov[32];
    std::snprintf(cov, sizeof(cov), "%.2f", report.coverage_pct);
    std::cout << "wrote " << out_path << ": " << report.records << " records into "
              << report.rounds << " rounds, coverage " << cov << "%, " << report.gap_count
              << " gaps\n";
    return kExitOk;
}

struct RunConfig {
    smart::OverlayTopology topology;
    smart::LinkTrace trace;
    smart::ExperimentConfig experiment;
    std::string out_dir;
    bool verbose = false;
};

RunConfig parse_run_config(const std::string& config_path,
                           const std::optional<std::string>& out_dir_flag,
                           const std::optional<std::uint64_t>& rounds_flag,
                           const std::optional<std::uint64_t>& seed_flag) {
    const json j = load_json_file(config_path);
    const fs::path base = fs::path(config_path).parent_path();
    auto resolve = [&](const std::string& p) {
        return fs::path(p).is_absolute() ? p : (base / p).string();
    };
    RunConfig rc;

    try {
        const bool has_trace = j.contains("trace");
        const bool has_generator = j.contains("generator");
        if (has_trace == has_generator) {
            throw smart::ConfigError("config needs exactly one of 'trace' or 'generator'");
        }

        std::optional<smart::GeneratorSpec> gen_spec;
        if (has_generator) {
            gen_spec = smart::generator_spec_from_json(j.at("generator"));
        }

        if (j.contains("topology")) {
            const auto& t = j.at("topology");
            if (t.is_number_unsigned()) {
                rc.topology = smart::make_topology(t.get<std::size_t>());
            } else if (t.is_string()) {
                std::ifstream in(resolve(t.get<std::string>()));
                if (!in) {
                    throw smart::ConfigError("cannot open topology " + t.get<std::string>());
                }
                rc.topology = smart::load_topology(in);
            } else {
                rc.topology = smart::topology_from_json(t);
            }
        } else if (gen_spec) {
            rc.topology = smart::make_topology(gen_spec->nodes);
        } else {
            throw smart::ConfigError("config needs a topology");
        }

        if (gen_spec) {
            if (gen_spec->nodes != rc.topology.size()) {
                throw smart::ConfigError("generator node count disagrees with topology");
            }
            const auto gen_seed = j.value("generator_seed", std::uint64_t{1});
            rc.trace = smart::generate_trace(*gen_spec, gen_seed);
        } else {
            std::ifstream in(resolve(j.at("trace").get<std::string>()));
            if (!in) {
                throw smart::ConfigError("cannot open trace " + j.at("trace").get<std::string>());
            }
            rc.trace = smart::load_trace(in);
            if (rc.trace.node_count() != rc.topology.size()) {
                throw smart::ConfigError("trace node count disagrees with topology");
            }
        }

        for (const auto& p : j.at("pairs")) {
            rc.experiment.pairs.push_back(
                smart::PairSpec{p.at(0).get<smart::NodeId>(), p.at(1).get<smart::NodeId>()});
        }
        rc.experiment.rounds = j.value("rounds", static_cast<std::uint64_t>(rc.trace.rounds()));
        rc.experiment.max_hops = j.value("max_hops", std::size_t{2});
        rc.experiment.oracle_max_hops = j.value("oracle_max_hops", std::size_t{2});
        rc.experiment.probing_budget = j.value("probing_budget", std::size_t{4});
        if (j.contains("agent")) {
            rc.experiment.agent = j.at("agent").get<smart::AgentConfig>();
        }
        rc.out_dir = j.value("out_dir", std::string{});
        if (!rc.out_dir.empty()) {
            rc.out_dir = resolve(rc.out_dir);  // config paths resolve against the config file
        }
        rc.verbose = j.value("verbose", false);
    } catch (const json::exception& e) {
        throw smart::ConfigError(std::string("bad run config: ") + e.what());
    }

    if (rounds_flag) rc.experiment.rounds = *rounds_flag;
    if (seed_flag) rc.experiment.agent.seed = *seed_flag;
    if (out_dir_flag) {
        rc.out_dir = *out_dir_flag;
    } else if (rc.out_dir.empty()) {
        if (const char* env = std::getenv("SMART_OVERLAY_OUTDIR")) {
            rc.out_dir = env;
        } else {
            rc.out_dir = "out";
        }
    }
    return rc;
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& out_dir_flag,
            const std::optional<std::uint64_t>& rounds_flag,
            const std::optional<std::uint64_t>& seed_flag, bool verbose_flag) {
    RunConfig rc = parse_run_config(config_path, out_dir_flag, rounds_flag, seed_flag);
    rc.verbose = rc.verbose || verbose_flag;
    fs::create_directories(rc.out_dir);
    const fs::path out_dir(rc.out_dir);

    std::ofstream reports_out(out_dir / "reports.ndjson");
    std::ofstream outcomes_out(out_dir / "outcomes.ndjson");
    if (!reports_out || !outcomes_out) {
        throw smart::ConfigError("cannot write into " + rc.out_dir);
    }

    std::vector<smart::RoundReport> reports;
    std::optional<smart::PairSpec> last_pair;
    smart::run_experiment(
        rc.experiment, rc.trace,
        [&](const smart::RoundReport& r) {
            reports.push_back(r);
            reports_out << smart::report_to_json(r).dump() << "\n";
        },
        [&](const smart::PairSpec& pair, const smart::RoundOutcome& outcome) {
            json line = smart::outcome_to_json(outcome);
            line["src"] = pair.src;
            line["dst"] = pair.dst;
            outcomes_out << line.dump() << "\n";
            if (rc.verbose && (!last_pair || !(*last_pair == pair))) {
                std::cerr << "pair " << pair.src << "->" << pair.dst << "\n";
                last_pair = pair;
            }
        });

    const smart::AggregateStats stats = smart::aggregate(reports);
    {
        std::ofstream agg_out(out_dir / "aggregate.json");
        agg_out << smart::aggregate_to_json(stats).dump(2) << "\n";
    }
    {
        std::ofstream hist_out(out_dir / "hop_histogram.csv");
        smart::write_hop_histogram_csv(stats, rc.experiment.oracle_max_hops, hist_out);
    }
    {
        std::ofstream gap_out(out_dir / "gap_cdf.csv");
        smart::write_gap_cdf_csv(reports, gap_out);
    }
    for (const smart::PairSpec& pair : rc.experiment.pairs) {
        const std::string name =
            "rtd_timeseries_" + std::to_string(pair.src) + "-" + std::to_string(pair.dst) + ".csv";
        std::ofstream ts_out(out_dir / name);
        smart::write_timeseries_csv(reports, pair.src, pair.dst, ts_out);
    }

    std::cout << "ran " << rc.experiment.pairs.size() << " pair(s) over "
              << rc.experiment.rounds << " rounds into " << rc.out_dir << "\n";
    return kExitOk;
}

int cmd_report(const std::string& reports_path, const std::string& figure) {
    std::ifstream in(reports_path);
    if (!in) {
        throw smart::ConfigError("cannot open " + reports_path);
    }
    std::vector<smart::RoundReport> reports;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            reports.push_back(smart::report_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw smart::ParseError(std::string("bad report line: ") + e.what(), lineno);
        }
    }
    if (reports.empty()) {
        throw smart::InvalidInputError("no reports in " + reports_path);
    }

    if (figure == "hops") {
        const smart::AggregateStats stats = smart::aggregate(reports);
        std::size_t max_hops = 1;
        for (const auto& r : reports) {
            max_hops = std::max(max_hops, r.class_min_rtt_us.size());
        }
        smart::write_hop_histogram_csv(stats, max_hops, std::cout);
    } else if (figure == "gap") {
        smart::write_gap_cdf_csv(reports, std::cout);
    } else if (figure.rfind("timeseries:", 0) == 0) {
        const std::string pair = figure.substr(11);
        const auto dash = pair.find('-');
        if (dash == std::string::npos) {
            throw smart::ConfigError("timeseries pair must look like SRC-DST");
        }
        smart::NodeId src, dst;
        try {
            src = static_cast<smart::NodeId>(std::stoul(pair.substr(0, dash)));
            dst = static_cast<smart::NodeId>(std::stoul(pair.substr(dash + 1)));
        } catch (const std::exception&) {
            throw smart::ConfigError("timeseries pair must look like SRC-DST");
        }
        smart::write_timeseries_csv(reports, src, dst, std::cout);
    } else {
        throw smart::ConfigError("unknown figure '" + figure + "'");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"overlay routing engine and trace-driven simulator"};
    app.require_subcommand(1);

    std::string spec_path, out_path, log_path, topo_path, config_path, reports_path, figure;
    std::uint64_t seed = 1;
    std::uint64_t round_seconds = 120;
    std::optional<std::string> out_dir_flag;
    std::optional<std::uint64_t> rounds_flag, seed_flag;

    auto* generate = app.add_subcommand("generate", "synthesize a link trace from a spec");
    generate->add_option("--spec", spec_path, "generator spec JSON")->required();
    generate->add_option("--seed", seed, "generator seed");
    generate->add_option("--out", out_path, "output trace CSV")->required();

    auto* import = app.add_subcommand("import", "bucket a raw ping log into a trace");
    import->add_option("--log", log_path, "ping log CSV")->required();
    import->add_option("--topology", topo_path, "topology JSON")->required();
    import->add_option("--out", out_path, "output trace CSV")->required();
    import->add_option("--round-seconds", round_seconds, "bucket width in seconds");

    bool verbose = false;
    auto* run = app.add_subcommand("run", "run the routing experiment");
    run->add_option("--config", config_path, "experiment config JSON")->required();
    run->add_option("--out-dir", out_dir_flag, "output directory (overrides config)");
    run->add_option("--rounds", rounds_flag, "round count (overrides config)");
    run->add_option("--seed", seed_flag, "agent base seed (overrides config)");
    run->add_flag("-v,--verbose", verbose, "per-pair progress on stderr");

    auto* report = app.add_subcommand("report", "extract plot-ready CSV from reports");
    report->add_option("--reports", reports_path, "reports.ndjson from a run")->required();
    report->add_option("--figure", figure, "hops | gap | timeseries:SRC-DST")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (generate->parsed()) {
            return cmd_generate(spec_path, seed, out_path);
        }
        if (import->parsed()) {
            return cmd_import(log_path, topo_path, out_path, round_seconds);
        }
        if (run->parsed()) {
            return cmd_run(config_path, out_dir_flag, rounds_flag, seed_flag, verbose);
        }
        if (report->parsed()) {
            return cmd_report(reports_path, figure);
        }
    } catch (const smart::ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual << " after "
                  << e.iterations << " iterations)\n";
        return kExitNumeric;
    } catch (const smart::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
