// Trace ingestion and persistence. Raw ping logs (timestamp,src,dst,rtt_ms,
// success) are bucketed into 2-minute rounds; the canonical on-disk trace is
// a CSV of one row per (round, src, dst).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "smart/overlay.hpp"
#include "smart/trace.hpp"

namespace smart {

struct RawPingRecord {
    std::int64_t timestamp_s = 0;
    std::string src;
    std::string dst;
    std::optional<double> rtt_ms;  // absent when the ping failed
    bool success = false;
};

std::vector<RawPingRecord> parse_ping_log(std::istream& in);

struct ImportReport {
    std::uint64_t rounds = 0;
    std::uint64_t records = 0;
    double coverage_pct = 0.0;   // buckets backed by at least one record
    std::uint64_t gap_count = 0; // missing buckets synthesized as lost
};

// Buckets records into rounds of round_seconds starting at the earliest
// timestamp. Within a bucket the latest record wins (stable on equal
// timestamps); missing buckets become lost samples. Node names must resolve
// in the topology.
LinkTrace import_ping_log(std::istream& in, const OverlayTopology& topo,
                          std::uint64_t round_seconds = 120, ImportReport* report = nullptr);

// Canonical trace CSV: header then `round,src,dst,rtt_us,lost` rows in
// (round, src, dst) order, rtt_us empty when lost=1. load(export(t)) == t
// and re-exporting a loaded file is byte-identical.
void export_trace(const LinkTrace& trace, std::ostream& out);
LinkTrace load_trace(std::istream& in);

}  // namespace smart
