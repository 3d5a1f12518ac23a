// Experiment orchestration: per routed pair, the round loop of select ->
// budget check -> probe -> learn -> oracle -> report, fully deterministic
// for a given config and trace.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "smart/agent.hpp"
#include "smart/metrics.hpp"
#include "smart/overlay.hpp"
#include "smart/trace.hpp"

namespace smart {

struct PairSpec {
    NodeId src = 0;
    NodeId dst = 0;

    bool operator==(const PairSpec&) const = default;
};

struct ExperimentConfig {
    std::vector<PairSpec> pairs;
    std::size_t max_hops = 2;         // candidate paths the agent may use
    std::size_t oracle_max_hops = 2;  // oracle search depth
    std::uint64_t rounds = 0;
    std::size_t probing_budget = 4;   // link measurements per source pair per round
    AgentConfig agent;
};

// Throws BudgetViolationError when a worst-case selection could not fit the
// budget, ConfigError on anything else inconsistent.
void validate(const ExperimentConfig& cfg, const LinkTrace& trace);

struct PairResult {
    PairSpec pair;
    std::vector<RoundOutcome> outcomes;
};

using ReportSink = std::function<void(const RoundReport&)>;
using OutcomeSink = std::function<void(const PairSpec&, const RoundOutcome&)>;

// Runs every configured pair over `rounds` rounds, emitting one RoundReport
// per (pair, round) in pair order then round order. Each pair's agent gets
// its own rng stream derived from the config seed.
void run_experiment(const ExperimentConfig& cfg, const LinkTrace& trace, const ReportSink& sink,
                    const OutcomeSink& outcome_sink = nullptr);

std::vector<RoundReport> run_experiment(const ExperimentConfig& cfg, const LinkTrace& trace);

}  // namespace smart
