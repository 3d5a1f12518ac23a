#include "smart/probe.hpp"

namespace smart {

ProbeRecord probe_path(const LinkTrace& trace, std::uint64_t round, const OverlayPath& path) {
    validate_path(path, 255, trace.node_count());
    ProbeRecord rec;
    rec.round = round;
    rec.path = path;
    rec.links_charged = path.hop_count();

    const auto seq = path.node_sequence();
    std::uint64_t total = 0;
    std::vector<std::uint64_t> segments;
    segments.reserve(seq.size() - 1);
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        const LinkSample& s = trace.at(round, seq[i], seq[i + 1]);
        if (s.lost) {
            rec.lost = true;
            rec.segment_rtts_us.clear();
            rec.total_rtt_us.reset();
            return rec;
        }
        segments.push_back(s.rtt_us);
        total += s.rtt_us;
    }
    rec.segment_rtts_us = std::move(segments);
    rec.total_rtt_us = total;
    return rec;
}

SmartHeader stamped_probe_header(const OverlayPath& path,
                                 std::span<const std::uint64_t> segment_rtts_us,
                                 std::uint64_t base_us, std::uint64_t flow_id) {
    if (segment_rtts_us.size() != path.hop_count()) {
        throw InvalidInputError("segment count does not match path hop count");
    }
    SmartHeader h = make_probe_header(path, flow_id, base_us);
    const std::size_t hc = h.hop_count();

    // Outbound: node k sends segment k at forward[k].
    for (std::size_t k = 0; k + 1 < hc; ++k) {
        const std::uint64_t out_leg = segment_rtts_us[k] - segment_rtts_us[k] / 2;
        h.timestamps[k + 1].forward_us = h.timestamps[k].forward_us + out_leg;
    }
    // The destination turns the probe around instantly; the last sender sees
    // the full segment round trip.
    h.timestamps[hc - 1].return_us = h.timestamps[hc - 1].forward_us + segment_rtts_us[hc - 1];
    for (std::size_t k = hc - 1; k-- > 0;) {
        h.timestamps[k].return_us = h.timestamps[k + 1].return_us + segment_rtts_us[k] / 2;
    }
    h.hop_index = static_cast<std::uint8_t>(hc - 1);  // as delivered back
    return h;
}

}  // namespace smart
