#include "smart/sim.hpp"

#include <algorithm>

#include "smart/probe.hpp"
#include "smart/random.hpp"

namespace smart {

void validate(const ExperimentConfig& cfg, const LinkTrace& trace) {
    if (trace.node_count() < 2) {
        throw ConfigError("trace covers fewer than 2 nodes");
    }
    if (cfg.pairs.empty()) {
        throw ConfigError("no pairs to route");
    }
    for (const PairSpec& p : cfg.pairs) {
        if (p.src == p.dst) {
            throw InvalidPairError("routed pair with src == dst");
        }
        if (p.src >= trace.node_count() || p.dst >= trace.node_count()) {
            throw ConfigError("routed pair outside the trace topology");
        }
    }
    if (cfg.max_hops < 1 || cfg.oracle_max_hops < 1) {
        throw ConfigError("hop limits must be at least 1");
    }
    if (cfg.rounds > trace.rounds()) {
        throw ConfigError("config asks for more rounds than the trace has");
    }
    // Hard config-time rule: a full selection of k max-hop paths must fit.
    if (cfg.agent.k_select * cfg.max_hops > cfg.probing_budget) {
        throw BudgetViolationError(
            "probing budget " + std::to_string(cfg.probing_budget) + " cannot fit " +
            std::to_string(cfg.agent.k_select) + " paths of up to " +
            std::to_string(cfg.max_hops) + " hops");
    }
}

void run_experiment(const ExperimentConfig& cfg, const LinkTrace& trace, const ReportSink& sink,
                    const OutcomeSink& outcome_sink) {
    validate(cfg, trace);
    const OverlayTopology topo = make_topology(trace.node_count());

    for (const PairSpec& pair : cfg.pairs) {
        auto candidates = enumerate_paths(topo, pair.src, pair.dst, cfg.max_hops);
        const auto oracle_candidates =
            enumerate_paths(topo, pair.src, pair.dst, cfg.oracle_max_hops);

        AgentConfig agent_cfg = cfg.agent;
        agent_cfg.seed = mix_seed(cfg.agent.seed, pair.src, pair.dst);
        RoutingAgent agent = make_agent(candidates, agent_cfg);

        for (std::uint64_t round = 0; round < cfg.rounds; ++round) {
            const std::vector<std::size_t> picks = select_paths(agent);

            std::size_t links = 0;
            for (std::size_t idx : picks) {
                links += agent.paths[idx].hop_count();
            }
            if (links > cfg.probing_budget) {
                throw BudgetViolationError("round " + std::to_string(round) + " would charge " +
                                           std::to_string(links) + " links");
            }

            std::vector<IndexedProbe> probes;
            probes.reserve(picks.size());
            for (std::size_t idx : picks) {
                probes.push_back(IndexedProbe{idx, probe_path(trace, round, agent.paths[idx])});
            }

            const RoundOutcome outcome = learning_round(agent, probes);
            if (outcome_sink) {
                outcome_sink(pair, outcome);
            }

            RoundReport report;
            report.round = round;
            report.src = pair.src;
            report.dst = pair.dst;
            report.chosen = outcome.chosen_path;
            report.links_charged = links;
            report.all_lost = outcome.all_lost;

            const LinkSample& direct = trace.at(round, pair.src, pair.dst);
            if (!direct.lost) {
                report.direct_rtt_us = direct.rtt_us;
            }
            {
                const ProbeRecord chosen_probe = probe_path(trace, round, outcome.chosen_path);
                if (!chosen_probe.lost) {
                    report.chosen_rtt_us = chosen_probe.total_rtt_us;
                }
            }
            const PathScan scan =
                scan_paths(trace, round, oracle_candidates, cfg.oracle_max_hops);
            if (scan.best) {
                report.oracle = scan.best;
                report.oracle_rtt_us = scan.best_rtt_us;
            }
            report.class_min_rtt_us = scan.class_min_rtt_us;

            sink(report);
        }
    }
}

std::vector<RoundReport> run_experiment(const ExperimentConfig& cfg, const LinkTrace& trace) {
    std::vector<RoundReport> reports;
    reports.reserve(cfg.pairs.size() * cfg.rounds);
    run_experiment(cfg, trace, [&](const RoundReport& r) { reports.push_back(r); });
    return reports;
}

}  // namespace smart
