#include "smart/agent.hpp"

#include <algorithm>
#include <numeric>

#include "smart/random.hpp"

namespace smart {

void to_json(nlohmann::json& j, const AgentConfig& cfg) {
    j = nlohmann::json{{"beta", cfg.beta},
                       {"k_select", cfg.k_select},
                       {"explore_prob", cfg.explore_prob},
                       {"init_weight", cfg.init_weight},
                       {"tol", cfg.tol},
                       {"max_iter", cfg.max_iter},
                       {"seed", cfg.seed}};
}

void from_json(const nlohmann::json& j, AgentConfig& cfg) {
    cfg.beta = j.value("beta", 0.8);
    cfg.k_select = j.value("k_select", std::size_t{2});
    cfg.explore_prob = j.value("explore_prob", 0.05);
    cfg.init_weight = j.value("init_weight", 1.0);
    cfg.tol = j.value("tol", 1e-9);
    cfg.max_iter = j.value("max_iter", std::size_t{10000});
    cfg.seed = j.value("seed", std::uint64_t{1});
}

RoutingAgent make_agent(std::vector<OverlayPath> paths, const AgentConfig& cfg) {
    if (paths.size() < 2) {
        throw InvalidDimensionError("agent needs at least 2 candidate paths");
    }
    if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) {
        throw ConfigError("beta must be in (0,1)");
    }
    if (cfg.k_select < 1 || cfg.k_select > paths.size()) {
        throw ConfigError("k_select must be in 1..|paths|");
    }
    if (cfg.explore_prob < 0.0 || cfg.explore_prob > 1.0) {
        throw ConfigError("explore_prob must be in [0,1]");
    }
    RoutingAgent agent;
    agent.rnn = make_rnn(paths.size(), cfg.init_weight);
    agent.paths = std::move(paths);
    agent.beta = cfg.beta;
    agent.k_select = cfg.k_select;
    agent.explore_prob = cfg.explore_prob;
    agent.tol = cfg.tol;
    agent.max_iter = cfg.max_iter;
    agent.rng.seed(splitmix64(cfg.seed));
    solve_fixed_point(agent.rnn, agent.tol, agent.max_iter);
    return agent;
}

std::vector<std::size_t> select_paths(RoutingAgent& agent) {
    const std::size_t n = agent.rnn.n;
    const std::size_t k = agent.k_select;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return agent.rnn.q[a] > agent.rnn.q[b];  // stable keeps lowest index on ties
    });
    std::vector<std::size_t> picks(order.begin(), order.begin() + k);

    if (agent.explore_prob > 0.0 && k < n) {
        if (rand_unit(agent.rng) < agent.explore_prob) {
            std::vector<std::size_t> rest(order.begin() + k, order.end());
            std::sort(rest.begin(), rest.end());
            picks[k - 1] = rest[rand_below(agent.rng, rest.size())];
        }
    }
    return picks;
}

double reward_from_probe(const ProbeRecord& probe) {
    if (probe.lost) {
        return 0.0;
    }
    if (!probe.total_rtt_us.has_value() || *probe.total_rtt_us == 0) {
        throw InvalidMeasurementError("successful probe with zero round-trip delay");
    }
    return 1e6 / static_cast<double>(*probe.total_rtt_us);
}

void reinforcement_update(RnnState& rnn, std::size_t j, double nu, bool reward_branch) {
    const std::size_t n = rnn.n;
    const double factor = reward_branch ? nu - 1.0 : 1.0 - nu;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == j) continue;  // zero diagonal means row j never moves
        if (reward_branch) {
            const double delta = factor * rnn.w_plus(i, j);
            rnn.w_plus(i, j) += delta;
            if (n > 2) {
                const double spill = delta / static_cast<double>(n - 2);
                for (std::size_t col = 0; col < n; ++col) {
                    if (col == j || col == i) continue;
                    rnn.w_minus(i, col) += spill;
                }
            }
        } else {
            const double delta = factor * rnn.w_minus(i, j);
            rnn.w_minus(i, j) += delta;
            if (n > 2) {
                const double spill = delta / static_cast<double>(n - 2);
                for (std::size_t col = 0; col < n; ++col) {
                    if (col == j || col == i) continue;
                    rnn.w_plus(i, col) += spill;
                }
            }
        }
    }
}

void apply_reinforcement(RoutingAgent& agent, std::size_t j, double reward) {
    if (!agent.threshold_set || !(agent.threshold > 0.0)) {
        throw ThresholdUninitializedError("reinforcement before any observed reward");
    }
    if (j >= agent.paths.size()) {
        throw InvalidInputError("path index out of range");
    }
    const double nu = reward / agent.threshold;
    reinforcement_update(agent.rnn, j, nu, reward >= agent.threshold);
    renormalize(agent.rnn);
    solve_fixed_point(agent.rnn, agent.tol, agent.max_iter);
}

double update_threshold(RoutingAgent& agent, double reward) {
    agent.threshold = agent.beta * agent.threshold + (1.0 - agent.beta) * reward;
    return agent.threshold;
}

namespace {

std::size_t direct_path_index(const RoutingAgent& agent) {
    for (std::size_t i = 0; i < agent.paths.size(); ++i) {
        if (agent.paths[i].direct()) {
            return i;
        }
    }
    return 0;  // candidate sets normally lead with the direct route
}

}  // namespace

RoundOutcome learning_round(RoutingAgent& agent, const std::vector<IndexedProbe>& probes) {
    if (probes.empty()) {
        throw InvalidRoundError("round with no probes");
    }
    RoundOutcome outcome;
    outcome.round_index = agent.rounds_done;
    outcome.probed = probes;

    // Process in ascending path index for reproducible update order.
    std::vector<std::size_t> order(probes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return probes[a].path_index < probes[b].path_index;
    });

    bool any_success = false;
    for (std::size_t oi : order) {
        const auto& p = probes[oi];
        const double r = reward_from_probe(p.probe);
        outcome.rewards.emplace_back(p.path_index, r);
        if (!p.probe.lost) {
            any_success = true;
        }
    }

    if (!any_success) {
        outcome.all_lost = true;
        outcome.chosen_path = agent.paths[direct_path_index(agent)];
        ++agent.rounds_done;
        return outcome;
    }

    // First reward ever seen becomes the threshold, so that update is a no-op.
    if (!agent.threshold_set) {
        for (const auto& [idx, r] : outcome.rewards) {
            if (r > 0.0) {
                agent.threshold = r;
                agent.threshold_set = true;
                break;
            }
        }
    }

    for (const auto& [idx, r] : outcome.rewards) {
        apply_reinforcement(agent, idx, r);
        if (r > 0.0) {
            update_threshold(agent, r);  // lost probes must not drag T to zero
        }
    }

    // Winner: highest reward, lowest index on ties.
    std::size_t best = outcome.rewards.front().first;
    double best_r = outcome.rewards.front().second;
    for (const auto& [idx, r] : outcome.rewards) {
        if (r > best_r) {
            best = idx;
            best_r = r;
        }
    }
    outcome.winner = best;
    outcome.chosen_path = agent.paths[best];
    ++agent.rounds_done;
    return outcome;
}

nlohmann::json outcome_to_json(const RoundOutcome& outcome) {
    nlohmann::json probed = nlohmann::json::array();
    for (const auto& p : outcome.probed) {
        nlohmann::json rec{{"path_index", p.path_index},
                           {"lost", p.probe.lost},
                           {"links_charged", p.probe.links_charged}};
        if (p.probe.total_rtt_us) {
            rec["total_rtt_us"] = *p.probe.total_rtt_us;
        } else {
            rec["total_rtt_us"] = nullptr;
        }
        probed.push_back(std::move(rec));
    }
    nlohmann::json rewards = nlohmann::json::array();
    for (const auto& [idx, r] : outcome.rewards) {
        rewards.push_back({{"path_index", idx}, {"reward", r}});
    }
    nlohmann::json j{{"round", outcome.round_index},
                     {"probed", std::move(probed)},
                     {"rewards", std::move(rewards)},
                     {"chosen_vias", outcome.chosen_path.vias},
                     {"all_lost", outcome.all_lost}};
    if (outcome.winner) {
        j["winner"] = *outcome.winner;
    } else {
        j["winner"] = nullptr;
    }
    return j;
}

}  // namespace smart
