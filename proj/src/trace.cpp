#include "smart/trace.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "smart/random.hpp"

namespace smart {

LinkTrace::LinkTrace(std::size_t node_count, std::size_t rounds)
    : n_(node_count), rounds_(rounds), samples_(node_count * node_count * rounds) {}

std::size_t LinkTrace::index(std::size_t round, NodeId src, NodeId dst) const {
    return (round * n_ + src) * n_ + dst;
}

const LinkSample& LinkTrace::at(std::size_t round, NodeId src, NodeId dst) const {
    if (round >= rounds_ || src >= n_ || dst >= n_ || src == dst) {
        throw InvalidInputError("trace lookup out of range");
    }
    return samples_[index(round, src, dst)];
}

LinkSample& LinkTrace::at(std::size_t round, NodeId src, NodeId dst) {
    if (round >= rounds_ || src >= n_ || dst >= n_ || src == dst) {
        throw InvalidInputError("trace lookup out of range");
    }
    return samples_[index(round, src, dst)];
}

bool LinkTrace::disconnected(std::size_t round, NodeId src, NodeId dst) const {
    if (round + 1 < 5) {
        return false;  // fewer than five samples exist yet
    }
    for (std::size_t t = round - 4; t <= round; ++t) {
        if (!at(t, src, dst).lost) {
            return false;
        }
    }
    return true;
}

void validate(const GeneratorSpec& spec) {
    if (spec.nodes < 2) {
        throw ConfigError("generator spec needs at least 2 nodes");
    }
    if (!(spec.default_rtt_ms > 0.0)) {
        throw ConfigError("default_rtt_ms must be positive");
    }
    if (spec.jitter_pct < 0.0 || spec.jitter_pct >= 100.0) {
        throw ConfigError("jitter_pct must be in [0, 100)");
    }
    auto check_link = [&](const LinkOverride& l) {
        if (l.src >= spec.nodes || l.dst >= spec.nodes || l.src == l.dst) {
            throw ConfigError("link override names an invalid pair");
        }
        if (!(l.rtt_ms > 0.0)) {
            throw ConfigError("link override rtt_ms must be positive");
        }
    };
    for (const auto& l : spec.links) check_link(l);
    for (const auto& s : spec.shifts) {
        for (const auto& l : s.links) check_link(l);
    }
    for (const auto& o : spec.outages) {
        if (o.src >= spec.nodes || o.dst >= spec.nodes || o.src == o.dst) {
            throw ConfigError("outage names an invalid pair");
        }
    }
}

namespace {

std::vector<LinkOverride> parse_links(const nlohmann::json& j) {
    std::vector<LinkOverride> out;
    for (const auto& e : j) {
        out.push_back(LinkOverride{e.at("src").get<NodeId>(), e.at("dst").get<NodeId>(),
                                   e.at("rtt_ms").get<double>()});
    }
    return out;
}

}  // namespace

GeneratorSpec generator_spec_from_json(const nlohmann::json& j) {
    GeneratorSpec spec;
    try {
        spec.nodes = j.at("nodes").get<std::size_t>();
        spec.rounds = j.at("rounds").get<std::uint64_t>();
        spec.default_rtt_ms = j.value("default_rtt_ms", 300.0);
        spec.symmetric = j.value("symmetric", true);
        spec.jitter_pct = j.value("jitter_pct", 0.0);
        if (j.contains("links")) {
            spec.links = parse_links(j.at("links"));
        }
        if (j.contains("shifts")) {
            for (const auto& e : j.at("shifts")) {
                TraceShift shift;
                shift.round = e.at("round").get<std::uint64_t>();
                shift.links = parse_links(e.at("links"));
                spec.shifts.push_back(std::move(shift));
            }
        }
        if (j.contains("outages")) {
            for (const auto& e : j.at("outages")) {
                spec.outages.push_back(OutageSpec{
                    e.at("src").get<NodeId>(), e.at("dst").get<NodeId>(),
                    e.at("start").get<std::uint64_t>(), e.at("duration").get<std::uint64_t>()});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad generator spec: ") + e.what());
    }
    validate(spec);
    return spec;
}

nlohmann::json generator_spec_to_json(const GeneratorSpec& spec) {
    nlohmann::json j{{"nodes", spec.nodes},
                     {"rounds", spec.rounds},
                     {"default_rtt_ms", spec.default_rtt_ms},
                     {"symmetric", spec.symmetric},
                     {"jitter_pct", spec.jitter_pct}};
    auto links_json = [](const std::vector<LinkOverride>& links) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& l : links) {
            arr.push_back({{"src", l.src}, {"dst", l.dst}, {"rtt_ms", l.rtt_ms}});
        }
        return arr;
    };
    if (!spec.links.empty()) j["links"] = links_json(spec.links);
    if (!spec.shifts.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& s : spec.shifts) {
            arr.push_back({{"round", s.round}, {"links", links_json(s.links)}});
        }
        j["shifts"] = arr;
    }
    if (!spec.outages.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& o : spec.outages) {
            arr.push_back(
                {{"src", o.src}, {"dst", o.dst}, {"start", o.start}, {"duration", o.duration}});
        }
        j["outages"] = arr;
    }
    return j;
}

LinkTrace generate_trace(const GeneratorSpec& spec, std::uint64_t seed) {
    validate(spec);
    const std::size_t n = spec.nodes;

    std::vector<double> base(n * n, spec.default_rtt_ms);
    auto apply_links = [&](const std::vector<LinkOverride>& links) {
        for (const auto& l : links) {
            base[l.src * n + l.dst] = l.rtt_ms;
            if (spec.symmetric) {
                base[l.dst * n + l.src] = l.rtt_ms;
            }
        }
    };
    apply_links(spec.links);

    std::vector<TraceShift> shifts = spec.shifts;
    std::stable_sort(shifts.begin(), shifts.end(),
                     [](const TraceShift& a, const TraceShift& b) { return a.round < b.round; });
    std::size_t next_shift = 0;

    std::vector<char> outage(n * n * static_cast<std::size_t>(spec.rounds), 0);
    for (const auto& o : spec.outages) {
        for (std::uint64_t t = o.start; t < o.start + o.duration && t < spec.rounds; ++t) {
            outage[(t * n + o.src) * n + o.dst] = 1;
        }
    }

    LinkTrace trace(n, spec.rounds);
    std::mt19937_64 gen(splitmix64(seed));
    const double jitter = spec.jitter_pct / 100.0;

    for (std::uint64_t t = 0; t < spec.rounds; ++t) {
        while (next_shift < shifts.size() && shifts[next_shift].round <= t) {
            apply_links(shifts[next_shift].links);
            ++next_shift;
        }
        for (NodeId src = 0; src < n; ++src) {
            for (NodeId dst = 0; dst < n; ++dst) {
                if (src == dst) continue;
                // Always draw, so jittered values do not depend on outages.
                const double u = rand_unit(gen);
                LinkSample& s = trace.at(t, src, dst);
                if (outage[(t * n + src) * n + dst]) {
                    s.lost = true;
                    s.rtt_us = 0;
                    continue;
                }
                const double factor = 1.0 + jitter * (2.0 * u - 1.0);
                const double us = base[src * n + dst] * 1000.0 * factor;
                s.lost = false;
                s.rtt_us = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(us)));
            }
        }
    }
    return trace;
}

}  // namespace smart
