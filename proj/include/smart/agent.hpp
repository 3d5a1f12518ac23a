// Reinforcement-learning routing agent of a source proxy. One RNN neuron per
// candidate path; each measurement round the agent probes the top-K paths by
// excitation probability, rewards or punishes their neurons against the
// exponential-average threshold, and installs the best-performing path.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "smart/overlay.hpp"
#include "smart/probe.hpp"
#include "smart/rnn.hpp"

#include "json.hpp"

namespace smart {

struct AgentConfig {
    double beta = 0.8;          // threshold memory factor
    std::size_t k_select = 2;   // paths probed per round
    double explore_prob = 0.05; // chance of swapping the lowest-ranked pick
    double init_weight = 1.0;
    double tol = 1e-9;
    std::size_t max_iter = 10000;
    std::uint64_t seed = 1;
};

void to_json(nlohmann::json& j, const AgentConfig& cfg);
void from_json(const nlohmann::json& j, AgentConfig& cfg);

struct RoutingAgent {
    RnnState rnn;
    std::vector<OverlayPath> paths;  // candidate set, index-aligned with neurons
    double threshold = 0.0;          // T, in 1/seconds
    bool threshold_set = false;
    double beta = 0.8;
    std::size_t k_select = 2;
    double explore_prob = 0.05;
    double tol = 1e-9;
    std::size_t max_iter = 10000;
    std::mt19937_64 rng;
    std::uint64_t rounds_done = 0;
};

// Builds the agent with a symmetric RNN (all paths equally likely at first)
// and a converged initial solve.
RoutingAgent make_agent(std::vector<OverlayPath> paths, const AgentConfig& cfg);

struct IndexedProbe {
    std::size_t path_index = 0;
    ProbeRecord probe;
};

struct RoundOutcome {
    std::uint64_t round_index = 0;
    std::vector<IndexedProbe> probed;
    std::vector<std::pair<std::size_t, double>> rewards;  // (path index, R = 1/RTD)
    std::optional<std::size_t> winner;                    // unset when all probes lost
    OverlayPath chosen_path;
    bool all_lost = false;
};

nlohmann::json outcome_to_json(const RoundOutcome& outcome);

// The K indices with highest q, ties to the lowest index, best first. With
// probability explore_prob the last pick is swapped for a uniformly random
// non-selected path so no candidate starves.
std::vector<std::size_t> select_paths(RoutingAgent& agent);

// R = 1/RTD in 1/seconds for a successful probe, 0 for a lost one.
double reward_from_probe(const ProbeRecord& probe);

// Raw weight update for neuron j at reinforcement ratio nu = R/T, before
// renormalization. Exposed separately so the update algebra is testable on
// its own. Spillover skips the diagonal, which is exactly the N-2 other
// columns; with N == 2 there is no spillover target at all.
void reinforcement_update(RnnState& rnn, std::size_t j, double nu, bool reward_branch);

// Full per-path update: branch on reward >= T, apply reinforcement_update,
// renormalize rows and re-solve the fixed point.
void apply_reinforcement(RoutingAgent& agent, std::size_t j, double reward);

// T <- beta*T + (1-beta)*reward. Returns the new threshold.
double update_threshold(RoutingAgent& agent, double reward);

// One full measurement round over the given probes (they must match this
// round's selection). Processes paths in ascending index order; each
// successful probe updates weights and then the threshold, a lost probe is
// punished at nu = 0 and leaves the threshold alone. If every probe was
// lost, falls back to the direct path and changes nothing.
RoundOutcome learning_round(RoutingAgent& agent, const std::vector<IndexedProbe>& probes);

}  // namespace smart
