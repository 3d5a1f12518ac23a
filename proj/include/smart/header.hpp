// SMART source-routing header: the source proxy writes the full proxy
// sequence into the packet, intermediate proxies forward from it and stamp
// probe timestamps on the way. Wire layout (big-endian):
//
//   offset  size  field
//   0       2     magic 0x53 0x4D ("SM")
//   2       1     version = 1
//   3       8     flow_id
//   11      1     hop_index
//   12      1     hop_count
//   13      4*H   node addresses, the proxies after the source
//   13+4H   16*H  per-hop timestamp pairs (forward us, return us), 0 = unset
//
// Total 13 + 20*H bytes. Timestamp pair k belongs to the node that sends
// segment k, i.e. the source for k = 0 and hops[k-1] for k > 0; the final
// proxy only turns the probe around.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "smart/errors.hpp"
#include "smart/overlay.hpp"

namespace smart {

struct HopStamp {
    std::uint64_t forward_us = 0;
    std::uint64_t return_us = 0;

    bool operator==(const HopStamp&) const = default;
};

struct SmartHeader {
    static constexpr std::array<std::uint8_t, 2> kMagic{0x53, 0x4D};
    static constexpr std::uint8_t kVersion = 1;

    std::uint64_t flow_id = 0;
    std::uint8_t hop_index = 0;
    std::vector<std::uint32_t> hops;   // addresses of vias..., destination
    std::vector<HopStamp> timestamps;  // one pair per hop

    std::size_t hop_count() const { return hops.size(); }

    bool operator==(const SmartHeader&) const = default;
};

constexpr std::size_t header_size(std::size_t hop_count) { return 13 + hop_count * 20; }

// Simulator address plan: NodeId <-> 10.0.0.{id+1}.
std::uint32_t node_address(NodeId id);
NodeId node_from_address(std::uint32_t addr);

std::vector<std::uint8_t> encode_header(const SmartHeader& h);

// Accepts a buffer that starts with a header (trailing payload bytes are
// ignored). Throws HeaderTruncatedError, HeaderFormatError or
// HeaderCorruptError.
SmartHeader decode_header(std::span<const std::uint8_t> bytes);

// Header for a fresh probe along the path: hops = vias + destination,
// hop_index = 0, source forward stamp set to send_time_us.
SmartHeader make_probe_header(const OverlayPath& path, std::uint64_t flow_id,
                              std::uint64_t send_time_us);

enum class ForwardKind { SendTo, DeliverToRA, Drop };
enum class DropReason { None, Misrouted, Corrupt };

struct ForwardAction {
    ForwardKind kind = ForwardKind::Drop;
    NodeId next = 0;  // valid for SendTo
    DropReason reason = DropReason::None;
};

// One forwarding step at `current`. Intermediate proxies stamp the forward
// slot of the segment they send and advance hop_index; the final proxy
// hands the packet to the reception agent.
ForwardAction forward(NodeId current, SmartHeader& h, std::uint64_t now_us);

struct PathTiming {
    std::uint64_t total_us = 0;
    std::vector<std::uint64_t> segment_us;
};

// Recovers total and per-segment round-trip delays from a fully stamped
// returned probe. Slot 0's forward stamp is the time origin and may be 0;
// every other slot must be set. Throws IncompleteProbeError on unset or
// inconsistent stamps.
PathTiming path_rtd_from_segments(const SmartHeader& h);

}  // namespace smart
