// Probe execution against a link trace: each segment sample is the full
// round trip on that segment, so a path's RTD is the sum over its segments.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "smart/header.hpp"
#include "smart/overlay.hpp"
#include "smart/trace.hpp"

namespace smart {

struct ProbeRecord {
    std::uint64_t round = 0;
    OverlayPath path;
    std::vector<std::uint64_t> segment_rtts_us;  // empty when lost
    std::optional<std::uint64_t> total_rtt_us;   // absent when lost
    bool lost = false;
    std::size_t links_charged = 0;  // link measurements consumed = hop count
};

// One probe of `path` at `round`. Lost if any segment is lost that round;
// the budget is charged either way.
ProbeRecord probe_path(const LinkTrace& trace, std::uint64_t round, const OverlayPath& path);

// Fully stamped probe header as it would come back to the source: forward
// stamps walk the segment RTTs out (ceil halves), return stamps walk back
// (floor halves), so path_rtd_from_segments recovers the segments exactly.
SmartHeader stamped_probe_header(const OverlayPath& path,
                                 std::span<const std::uint64_t> segment_rtts_us,
                                 std::uint64_t base_us, std::uint64_t flow_id = 0);

}  // namespace smart
