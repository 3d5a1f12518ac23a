#include "smart/header.hpp"

namespace smart {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

std::uint64_t get_u64(std::span<const std::uint8_t> b, std::size_t off) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        v = (v << 8) | b[off + i];
    }
    return v;
}

}  // namespace

std::uint32_t node_address(NodeId id) { return 0x0A000000u | (id + 1); }

NodeId node_from_address(std::uint32_t addr) { return (addr & 0x00FFFFFFu) - 1; }

std::vector<std::uint8_t> encode_header(const SmartHeader& h) {
    const std::size_t hc = h.hop_count();
    if (hc < 1 || hc > 255) {
        throw HeaderCorruptError("hop_count must be in 1..255");
    }
    if (h.timestamps.size() != hc) {
        throw HeaderCorruptError("timestamp slots must match hop_count");
    }
    if (h.hop_index > hc) {
        throw HeaderCorruptError("hop_index exceeds hop_count");
    }
    std::vector<std::uint8_t> out;
    out.reserve(header_size(hc));
    put_u16(out, (std::uint16_t(SmartHeader::kMagic[0]) << 8) | SmartHeader::kMagic[1]);
    out.push_back(SmartHeader::kVersion);
    put_u64(out, h.flow_id);
    out.push_back(h.hop_index);
    out.push_back(static_cast<std::uint8_t>(hc));
    for (std::uint32_t addr : h.hops) {
        put_u32(out, addr);
    }
    for (const HopStamp& ts : h.timestamps) {
        put_u64(out, ts.forward_us);
        put_u64(out, ts.return_us);
    }
    return out;
}

SmartHeader decode_header(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 13) {
        throw HeaderTruncatedError("buffer shorter than fixed header");
    }
    if (bytes[0] != SmartHeader::kMagic[0] || bytes[1] != SmartHeader::kMagic[1]) {
        throw HeaderFormatError("bad magic");
    }
    if (bytes[2] != SmartHeader::kVersion) {
        throw HeaderFormatError("unsupported version " + std::to_string(bytes[2]));
    }
    SmartHeader h;
    h.flow_id = get_u64(bytes, 3);
    h.hop_index = bytes[11];
    const std::size_t hc = bytes[12];
    if (hc < 1) {
        throw HeaderCorruptError("hop_count must be at least 1");
    }
    if (bytes.size() < header_size(hc)) {
        throw HeaderTruncatedError("buffer shorter than declared hop_count needs");
    }
    if (h.hop_index > hc) {
        throw HeaderCorruptError("hop_index exceeds hop_count");
    }
    h.hops.resize(hc);
    std::size_t off = 13;
    for (std::size_t i = 0; i < hc; ++i, off += 4) {
        h.hops[i] = get_u32(bytes, off);
    }
    h.timestamps.resize(hc);
    for (std::size_t i = 0; i < hc; ++i, off += 16) {
        h.timestamps[i].forward_us = get_u64(bytes, off);
        h.timestamps[i].return_us = get_u64(bytes, off + 8);
    }
    return h;
}

SmartHeader make_probe_header(const OverlayPath& path, std::uint64_t flow_id,
                              std::uint64_t send_time_us) {
    SmartHeader h;
    h.flow_id = flow_id;
    h.hop_index = 0;
    h.hops.reserve(path.hop_count());
    for (NodeId v : path.vias) {
        h.hops.push_back(node_address(v));
    }
    h.hops.push_back(node_address(path.dst));
    h.timestamps.assign(h.hops.size(), HopStamp{});
    h.timestamps[0].forward_us = send_time_us;
    return h;
}

ForwardAction forward(NodeId current, SmartHeader& h, std::uint64_t now_us) {
    const std::size_t hc = h.hop_count();
    if (hc < 1 || h.timestamps.size() != hc || h.hop_index >= hc) {
        return ForwardAction{ForwardKind::Drop, 0, DropReason::Corrupt};
    }
    if (node_from_address(h.hops[h.hop_index]) != current) {
        return ForwardAction{ForwardKind::Drop, 0, DropReason::Misrouted};
    }
    if (h.hop_index == hc - 1) {
        return ForwardAction{ForwardKind::DeliverToRA, current, DropReason::None};
    }
    // This node sends segment hop_index+1; stamp its forward slot.
    h.timestamps[h.hop_index + 1].forward_us = now_us;
    ++h.hop_index;
    return ForwardAction{ForwardKind::SendTo, node_from_address(h.hops[h.hop_index]),
                         DropReason::None};
}

PathTiming path_rtd_from_segments(const SmartHeader& h) {
    const std::size_t hc = h.hop_count();
    if (hc < 1 || h.timestamps.size() != hc) {
        throw IncompleteProbeError("probe header has no timestamp slots");
    }
    for (std::size_t k = 0; k < hc; ++k) {
        if (h.timestamps[k].return_us == 0 || (k > 0 && h.timestamps[k].forward_us == 0)) {
            throw IncompleteProbeError("timestamp slot " + std::to_string(k) + " unset");
        }
    }
    PathTiming t;
    t.segment_us.resize(hc);
    for (std::size_t k = 0; k + 1 < hc; ++k) {
        const auto& a = h.timestamps[k];
        const auto& b = h.timestamps[k + 1];
        if (b.forward_us < a.forward_us || a.return_us < b.return_us) {
            throw IncompleteProbeError("timestamps not monotone at slot " + std::to_string(k));
        }
        t.segment_us[k] = (b.forward_us - a.forward_us) + (a.return_us - b.return_us);
    }
    const auto& last = h.timestamps[hc - 1];
    if (last.return_us < last.forward_us) {
        throw IncompleteProbeError("return stamp precedes forward stamp on final segment");
    }
    t.segment_us[hc - 1] = last.return_us - last.forward_us;
    t.total_us = h.timestamps[0].return_us - h.timestamps[0].forward_us;
    return t;
}

}  // namespace smart
