#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "smart/metrics.hpp"
#include "smart/probe.hpp"
#include "smart/trace.hpp"

using namespace smart;

namespace {

GeneratorSpec flat_spec(std::size_t nodes, std::uint64_t rounds, double rtt_ms) {
    GeneratorSpec spec;
    spec.nodes = nodes;
    spec.rounds = rounds;
    spec.default_rtt_ms = rtt_ms;
    return spec;
}

}  // namespace

TEST_CASE("stationary spec without jitter is exact") {
    GeneratorSpec spec = flat_spec(3, 5, 300.0);
    spec.links = {{0, 1, 200.0}};
    LinkTrace trace = generate_trace(spec, 42);
    for (std::uint64_t t = 0; t < 5; ++t) {
        CHECK(trace.at(t, 0, 1).rtt_us == 200000);
        CHECK(trace.at(t, 1, 0).rtt_us == 200000);  // symmetric override
        CHECK(trace.at(t, 0, 2).rtt_us == 300000);
    }
}

TEST_CASE("jitter stays inside its band and is seed-deterministic") {
    GeneratorSpec spec = flat_spec(4, 50, 100.0);
    spec.jitter_pct = 10.0;
    LinkTrace a = generate_trace(spec, 7);
    LinkTrace b = generate_trace(spec, 7);
    LinkTrace c = generate_trace(spec, 8);
    CHECK(a == b);
    CHECK(!(a == c));
    bool moved = false;
    for (std::uint64_t t = 0; t < 50; ++t) {
        const auto& s = a.at(t, 0, 1);
        CHECK(s.rtt_us >= 90000);
        CHECK(s.rtt_us <= 110000);
        if (s.rtt_us != 100000) moved = true;
    }
    CHECK(moved);
}

TEST_CASE("outage window marks losses and the five-loss rule fires") {
    GeneratorSpec spec = flat_spec(3, 25, 250.0);
    spec.outages = {{0, 1, 10, 7}};
    LinkTrace trace = generate_trace(spec, 1);

    for (std::uint64_t t = 0; t < 25; ++t) {
        const bool lost = t >= 10 && t <= 16;
        CHECK(trace.at(t, 0, 1).lost == lost);
    }
    // disconnected exactly at the fifth consecutive loss...
    for (std::uint64_t t = 0; t < 14; ++t) {
        CHECK(!trace.disconnected(t, 0, 1));
    }
    CHECK(trace.disconnected(14, 0, 1));
    CHECK(trace.disconnected(15, 0, 1));
    CHECK(trace.disconnected(16, 0, 1));
    // ...and cleared at the first success.
    CHECK(!trace.disconnected(17, 0, 1));
    // the reverse direction never lost a packet
    CHECK(!trace.disconnected(14, 1, 0));
}

TEST_CASE("losses at the trace start need five samples to disconnect") {
    GeneratorSpec spec = flat_spec(2, 8, 100.0);
    spec.outages = {{0, 1, 0, 8}};
    LinkTrace trace = generate_trace(spec, 3);
    CHECK(!trace.disconnected(3, 0, 1));
    CHECK(trace.disconnected(4, 0, 1));
}

TEST_CASE("a shift swaps which path the oracle prefers") {
    GeneratorSpec spec = flat_spec(4, 200, 500.0);
    spec.links = {{0, 2, 100.0}, {2, 1, 100.0}, {0, 3, 150.0}, {3, 1, 150.0}};
    spec.shifts = {{100, {{0, 2, 400.0}, {2, 1, 400.0}}}};
    LinkTrace trace = generate_trace(spec, 9);

    auto [before, before_rtt] = optimal_path(trace, 99, 0, 1, 2);
    CHECK(before.vias == std::vector<NodeId>{2});
    CHECK(before_rtt == 200000);
    auto [after, after_rtt] = optimal_path(trace, 100, 0, 1, 2);
    CHECK(after.vias == std::vector<NodeId>{3});
    CHECK(after_rtt == 300000);
}

TEST_CASE("generator rejects malformed specs") {
    CHECK_THROWS_AS(generate_trace(flat_spec(1, 5, 100.0), 0), ConfigError);
    GeneratorSpec bad = flat_spec(3, 5, 100.0);
    bad.jitter_pct = -1.0;
    CHECK_THROWS_AS(generate_trace(bad, 0), ConfigError);
    bad = flat_spec(3, 5, 100.0);
    bad.links = {{0, 0, 50.0}};
    CHECK_THROWS_AS(generate_trace(bad, 0), ConfigError);
    bad = flat_spec(3, 5, 100.0);
    bad.links = {{0, 1, 0.0}};
    CHECK_THROWS_AS(generate_trace(bad, 0), ConfigError);
}

TEST_CASE("generator spec json round trip") {
    GeneratorSpec spec = flat_spec(5, 30, 280.0);
    spec.jitter_pct = 2.0;
    spec.links = {{0, 1, 400.0}, {0, 2, 100.0}};
    spec.shifts = {{10, {{0, 1, 250.0}}}};
    spec.outages = {{1, 2, 5, 6}};
    auto j = generator_spec_to_json(spec);
    GeneratorSpec back = generator_spec_from_json(j);
    CHECK(generate_trace(back, 4) == generate_trace(spec, 4));
}

TEST_CASE("probing a path sums its segments") {
    GeneratorSpec spec = flat_spec(4, 10, 400.0);
    spec.links = {{0, 2, 100.0}, {2, 1, 150.0}};
    LinkTrace trace = generate_trace(spec, 0);

    SUBCASE("direct route charges one link") {
        ProbeRecord rec = probe_path(trace, 0, OverlayPath{0, 1, {}});
        CHECK(!rec.lost);
        CHECK(*rec.total_rtt_us == 400000);
        CHECK(rec.links_charged == 1);
        CHECK(rec.segment_rtts_us == std::vector<std::uint64_t>{400000});
    }
    SUBCASE("two-hop route adds segments and charges two links") {
        ProbeRecord rec = probe_path(trace, 0, OverlayPath{0, 1, {2}});
        CHECK(!rec.lost);
        CHECK(*rec.total_rtt_us == 250000);
        CHECK(rec.links_charged == 2);
    }
    SUBCASE("a lost segment loses the probe but still charges") {
        GeneratorSpec lossy = spec;
        lossy.outages = {{2, 1, 0, 1}};
        LinkTrace lt = generate_trace(lossy, 0);
        ProbeRecord rec = probe_path(lt, 0, OverlayPath{0, 1, {2}});
        CHECK(rec.lost);
        CHECK(!rec.total_rtt_us.has_value());
        CHECK(rec.links_charged == 2);
    }
}

TEST_CASE("probe totals equal stamped-header timing") {
    GeneratorSpec spec = flat_spec(5, 20, 320.0);
    spec.jitter_pct = 5.0;
    LinkTrace trace = generate_trace(spec, 77);
    for (std::uint64_t t = 0; t < 20; ++t) {
        const OverlayPath path{0, 4, {1, 3}};
        ProbeRecord rec = probe_path(trace, t, path);
        REQUIRE(!rec.lost);
        SmartHeader h = stamped_probe_header(path, rec.segment_rtts_us, t * 120000000ull);
        auto timing = path_rtd_from_segments(h);
        CHECK(timing.total_us == *rec.total_rtt_us);
        CHECK(timing.segment_us == rec.segment_rtts_us);
    }
}
