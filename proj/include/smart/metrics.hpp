// Brute-force optimal-path oracle and the aggregate QoS statistics the
// experiment reports: non-optimality percentages, gaps above the minimum,
// hop-count distribution of the optima and convergence diagnostics.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smart/overlay.hpp"
#include "smart/probe.hpp"
#include "smart/trace.hpp"

#include "json.hpp"

namespace smart {

struct PathScan {
    std::optional<OverlayPath> best;
    std::optional<std::uint64_t> best_rtt_us;
    // index h-1 = best RTD among exactly h-hop paths, absent when all lost
    std::vector<std::optional<std::uint64_t>> class_min_rtt_us;
};

// Evaluates every candidate path at one round. Ties resolve to fewer hops,
// then lexicographic vias. The span overload lets round loops reuse one
// enumeration.
PathScan scan_paths(const LinkTrace& trace, std::uint64_t round,
                    std::span<const OverlayPath> candidates, std::size_t max_hops);
PathScan scan_paths(const LinkTrace& trace, std::uint64_t round, NodeId src, NodeId dst,
                    std::size_t max_hops);

// The oracle: exhaustive minimum-RTD path. Throws NoPathError when every
// candidate is lost at that round.
std::pair<OverlayPath, std::uint64_t> optimal_path(const LinkTrace& trace, std::uint64_t round,
                                                   NodeId src, NodeId dst, std::size_t max_hops);

struct RoundReport {
    std::uint64_t round = 0;
    NodeId src = 0;
    NodeId dst = 0;
    OverlayPath chosen;
    std::optional<std::uint64_t> chosen_rtt_us;
    std::optional<std::uint64_t> direct_rtt_us;
    std::optional<OverlayPath> oracle;
    std::optional<std::uint64_t> oracle_rtt_us;
    std::vector<std::optional<std::uint64_t>> class_min_rtt_us;
    std::size_t links_charged = 0;
    bool all_lost = false;
};

nlohmann::json report_to_json(const RoundReport& r);
RoundReport report_from_json(const nlohmann::json& j);

struct AggregateStats {
    double pct_nonoptimal_direct = 0.0;
    double pct_nonoptimal_chosen = 0.0;
    double avg_gap_direct = 0.0;   // percent above oracle
    double avg_gap_chosen = 0.0;
    std::map<std::size_t, double> hop_histogram;  // oracle hop count -> percent
    double avg_gap_best2hop = 0.0;
    std::map<std::string, std::int64_t> convergence_round;  // "src-dst" -> round, -1 = never
    std::uint64_t counted_rounds = 0;
    std::uint64_t excluded_no_oracle = 0;  // all-lost or oracle absent
    std::uint64_t excluded_direct_lost = 0;
    std::uint64_t excluded_chosen_lost = 0;
};

nlohmann::json aggregate_to_json(const AggregateStats& s);

// Non-optimal = RTD above oracle beyond a 0.1% relative band; a lost RTD
// counts as non-optimal but is excluded from gap means. Convergence round =
// first round of a 10-round window where the chosen RTD stays within 5% of
// the oracle. Throws InvalidInputError on an empty stream.
AggregateStats aggregate(std::span<const RoundReport> reports);

// Plot-ready CSV surfaces.
void write_hop_histogram_csv(const AggregateStats& stats, std::size_t max_hops, std::ostream& out);
void write_gap_cdf_csv(std::span<const RoundReport> reports, std::ostream& out);
void write_timeseries_csv(std::span<const RoundReport> reports, NodeId src, NodeId dst,
                          std::ostream& out);

}  // namespace smart
