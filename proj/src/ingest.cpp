#include "smart/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace smart {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::int64_t parse_int(const std::string& s, std::size_t line) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("expected integer, got '" + s + "'", line);
    }
    return v;
}

std::uint64_t parse_u64(const std::string& s, std::size_t line) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("expected unsigned integer, got '" + s + "'", line);
    }
    return v;
}

double parse_double(const std::string& s, std::size_t line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected number, got '" + s + "'", line);
    }
}

}  // namespace

std::vector<RawPingRecord> parse_ping_log(std::istream& in) {
    std::vector<RawPingRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        if (lineno == 1 && line.rfind("timestamp", 0) == 0) continue;  // optional header
        const auto fields = split_csv(line);
        if (fields.size() != 5) {
            throw ParseError("expected 5 fields", lineno);
        }
        RawPingRecord rec;
        rec.timestamp_s = parse_int(fields[0], lineno);
        rec.src = fields[1];
        rec.dst = fields[2];
        const std::int64_t success = parse_int(fields[4], lineno);
        if (success != 0 && success != 1) {
            throw ParseError("success must be 0 or 1", lineno);
        }
        rec.success = success == 1;
        if (rec.success) {
            if (fields[3].empty()) {
                throw ParseError("successful ping without rtt_ms", lineno);
            }
            rec.rtt_ms = parse_double(fields[3], lineno);
            if (!(*rec.rtt_ms > 0.0)) {
                throw ParseError("rtt_ms must be positive", lineno);
            }
        } else if (!fields[3].empty()) {
            throw ParseError("failed ping with rtt_ms set", lineno);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

LinkTrace import_ping_log(std::istream& in, const OverlayTopology& topo,
                          std::uint64_t round_seconds, ImportReport* report) {
    if (round_seconds == 0) {
        throw ConfigError("round_seconds must be positive");
    }
    auto records = parse_ping_log(in);
    if (records.empty()) {
        throw ConfigError("ping log is empty");
    }

    std::map<std::string, NodeId> by_name;
    for (const auto& node : topo.nodes) {
        by_name[node.name] = node.id;
    }
    auto resolve = [&](const std::string& name) {
        const auto it = by_name.find(name);
        if (it == by_name.end()) {
            throw ConfigError("unknown node name '" + name + "'");
        }
        return it->second;
    };

    std::int64_t t0 = std::numeric_limits<std::int64_t>::max();
    std::int64_t t1 = std::numeric_limits<std::int64_t>::min();
    for (const auto& rec : records) {
        resolve(rec.src);
        resolve(rec.dst);
        t0 = std::min(t0, rec.timestamp_s);
        t1 = std::max(t1, rec.timestamp_s);
    }
    const std::uint64_t rounds =
        static_cast<std::uint64_t>(t1 - t0) / round_seconds + 1;

    // Stable sort by timestamp, then write in order: the latest record for a
    // bucket wins, and equal timestamps fall back to file order.
    std::stable_sort(records.begin(), records.end(),
                     [](const RawPingRecord& a, const RawPingRecord& b) {
                         return a.timestamp_s < b.timestamp_s;
                     });

    const std::size_t n = topo.size();
    LinkTrace trace(n, rounds);
    std::vector<char> seen(n * n * rounds, 0);
    for (std::size_t t = 0; t < rounds; ++t) {
        for (NodeId src = 0; src < n; ++src) {
            for (NodeId dst = 0; dst < n; ++dst) {
                if (src == dst) continue;
                trace.at(t, src, dst).lost = true;  // until a record says otherwise
            }
        }
    }
    for (const auto& rec : records) {
        const NodeId src = resolve(rec.src);
        const NodeId dst = resolve(rec.dst);
        if (src == dst) {
            throw ConfigError("ping record with src == dst: " + rec.src);
        }
        const std::uint64_t round = static_cast<std::uint64_t>(rec.timestamp_s - t0) / round_seconds;
        LinkSample& s = trace.at(round, src, dst);
        if (rec.success) {
            s.lost = false;
            s.rtt_us = std::max<std::uint64_t>(
                1, static_cast<std::uint64_t>(std::llround(*rec.rtt_ms * 1000.0)));
        } else {
            s.lost = true;
            s.rtt_us = 0;
        }
        seen[(round * n + src) * n + dst] = 1;
    }

    if (report) {
        const std::uint64_t buckets = rounds * n * (n - 1);
        std::uint64_t covered = 0;
        for (std::size_t t = 0; t < rounds; ++t) {
            for (NodeId src = 0; src < n; ++src) {
                for (NodeId dst = 0; dst < n; ++dst) {
                    if (src != dst && seen[(t * n + src) * n + dst]) ++covered;
                }
            }
        }
        report->rounds = rounds;
        report->records = records.size();
        report->coverage_pct = 100.0 * static_cast<double>(covered) / static_cast<double>(buckets);
        report->gap_count = buckets - covered;
    }
    return trace;
}

void export_trace(const LinkTrace& trace, std::ostream& out) {
    out << "round,src,dst,rtt_us,lost\n";
    const std::size_t n = trace.node_count();
    for (std::size_t t = 0; t < trace.rounds(); ++t) {
        for (NodeId src = 0; src < n; ++src) {
            for (NodeId dst = 0; dst < n; ++dst) {
                if (src == dst) continue;
                const LinkSample& s = trace.at(t, src, dst);
                out << t << ',' << src << ',' << dst << ',';
                if (!s.lost) {
                    out << s.rtt_us;
                }
                out << ',' << (s.lost ? 1 : 0) << '\n';
            }
        }
    }
}

LinkTrace load_trace(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) {
        throw ConfigError("trace file is empty");
    }
    ++lineno;
    if (line != "round,src,dst,rtt_us,lost" && line != "round,src,dst,rtt_us,lost\r") {
        throw ParseError("missing canonical trace header", lineno);
    }

    struct Row {
        std::uint64_t round;
        NodeId src, dst;
        LinkSample sample;
    };
    std::vector<Row> rows;
    std::uint64_t max_round = 0;
    NodeId max_node = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv(line);
        if (fields.size() != 5) {
            throw ParseError("expected 5 fields", lineno);
        }
        Row row;
        row.round = parse_u64(fields[0], lineno);
        row.src = static_cast<NodeId>(parse_u64(fields[1], lineno));
        row.dst = static_cast<NodeId>(parse_u64(fields[2], lineno));
        const std::uint64_t lost = parse_u64(fields[4], lineno);
        if (lost != 0 && lost != 1) {
            throw ParseError("lost must be 0 or 1", lineno);
        }
        row.sample.lost = lost == 1;
        if (row.sample.lost) {
            if (!fields[3].empty()) {
                throw ParseError("lost sample with rtt_us set", lineno);
            }
        } else {
            if (fields[3].empty()) {
                throw ParseError("sample without rtt_us", lineno);
            }
            row.sample.rtt_us = parse_u64(fields[3], lineno);
            if (row.sample.rtt_us == 0) {
                throw ParseError("rtt_us must be positive", lineno);
            }
        }
        if (row.src == row.dst) {
            throw ParseError("src equals dst", lineno);
        }
        max_round = std::max(max_round, row.round);
        max_node = std::max({max_node, row.src, row.dst});
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw ConfigError("trace file has no samples");
    }

    const std::size_t n = max_node + 1;
    const std::size_t rounds = max_round + 1;
    if (n < 2) {
        throw ConfigError("trace covers fewer than 2 nodes");
    }
    if (rows.size() != rounds * n * (n - 1)) {
        throw ConfigError("trace is not complete over all pairs and rounds");
    }
    // Rows must already be canonical; completeness plus order check makes
    // duplicate detection free.
    LinkTrace trace(n, rounds);
    std::size_t i = 0;
    for (std::size_t t = 0; t < rounds; ++t) {
        for (NodeId src = 0; src < n; ++src) {
            for (NodeId dst = 0; dst < n; ++dst) {
                if (src == dst) continue;
                const Row& row = rows[i++];
                if (row.round != t || row.src != src || row.dst != dst) {
                    throw ConfigError("trace rows not in canonical (round,src,dst) order near row " +
                                      std::to_string(i));
                }
                trace.at(t, src, dst) = row.sample;
            }
        }
    }
    return trace;
}

}  // namespace smart
