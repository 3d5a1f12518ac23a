// Link-level ground truth for the simulator: one RTD/loss sample per ordered
// node pair per 2-minute round, plus the deterministic synthetic generator.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "smart/errors.hpp"
#include "smart/overlay.hpp"

#include "json.hpp"

namespace smart {

struct LinkSample {
    std::uint64_t rtt_us = 0;  // valid only when !lost
    bool lost = false;

    bool operator==(const LinkSample&) const = default;
};

// Dense, round-major store over all ordered pairs. A pair is disconnected at
// round t when the five samples t-4..t are all lost; any success clears it.
class LinkTrace {
public:
    LinkTrace() = default;
    LinkTrace(std::size_t node_count, std::size_t rounds);

    std::size_t node_count() const { return n_; }
    std::size_t rounds() const { return rounds_; }

    const LinkSample& at(std::size_t round, NodeId src, NodeId dst) const;
    LinkSample& at(std::size_t round, NodeId src, NodeId dst);

    bool disconnected(std::size_t round, NodeId src, NodeId dst) const;

    bool operator==(const LinkTrace&) const = default;

private:
    std::size_t index(std::size_t round, NodeId src, NodeId dst) const;

    std::size_t n_ = 0;
    std::size_t rounds_ = 0;
    std::vector<LinkSample> samples_;
};

// --- synthetic generation ---------------------------------------------------

struct LinkOverride {
    NodeId src = 0;
    NodeId dst = 0;
    double rtt_ms = 0.0;
};

// From `round` on, the listed links take new base values.
struct TraceShift {
    std::uint64_t round = 0;
    std::vector<LinkOverride> links;
};

// Samples for the ordered pair in rounds [start, start+duration) are lost.
struct OutageSpec {
    NodeId src = 0;
    NodeId dst = 0;
    std::uint64_t start = 0;
    std::uint64_t duration = 0;
};

// Base RTT matrix (default + per-link overrides), multiplicative uniform
// jitter of +-jitter_pct percent, optional base shifts at change points and
// forced outage windows. Composition order: base -> shifts -> jitter -> outage.
struct GeneratorSpec {
    std::size_t nodes = 0;
    std::uint64_t rounds = 0;
    double default_rtt_ms = 300.0;
    bool symmetric = true;  // overrides apply to both directions
    std::vector<LinkOverride> links;
    double jitter_pct = 0.0;
    std::vector<TraceShift> shifts;
    std::vector<OutageSpec> outages;
};

void validate(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_json(const nlohmann::json& j);
nlohmann::json generator_spec_to_json(const GeneratorSpec& spec);

// Deterministic for (spec, seed): jitter draws happen in canonical
// (round, src, dst) order regardless of outages.
LinkTrace generate_trace(const GeneratorSpec& spec, std::uint64_t seed);

}  // namespace smart
