#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "smart/header.hpp"
#include "smart/probe.hpp"
#include "smart/random.hpp"

using namespace smart;

namespace {

SmartHeader random_header(std::mt19937_64& gen) {
    SmartHeader h;
    h.flow_id = gen();
    const std::size_t hc = 1 + rand_below(gen, 8);
    h.hops.resize(hc);
    h.timestamps.resize(hc);
    for (std::size_t i = 0; i < hc; ++i) {
        h.hops[i] = static_cast<std::uint32_t>(gen());
        h.timestamps[i].forward_us = gen();
        h.timestamps[i].return_us = gen();
    }
    h.hop_index = static_cast<std::uint8_t>(rand_below(gen, hc + 1));
    return h;
}

}  // namespace

TEST_CASE("one-hop header is 33 bytes and round-trips") {
    SmartHeader h;
    h.flow_id = 0;
    h.hops = {node_address(5)};
    h.timestamps = {HopStamp{}};
    auto bytes = encode_header(h);
    CHECK(bytes.size() == 33);
    CHECK(bytes.size() == header_size(1));
    CHECK(bytes[0] == 0x53);
    CHECK(bytes[1] == 0x4D);
    CHECK(decode_header(bytes) == h);
}

TEST_CASE("bad magic and version are unsupported") {
    SmartHeader h;
    h.hops = {node_address(1)};
    h.timestamps = {HopStamp{}};
    auto bytes = encode_header(h);
    auto corrupt = bytes;
    corrupt[0] = 0x00;
    corrupt[1] = 0x00;
    CHECK_THROWS_AS(decode_header(corrupt), HeaderFormatError);
    corrupt = bytes;
    corrupt[2] = 9;
    CHECK_THROWS_AS(decode_header(corrupt), HeaderFormatError);
}

TEST_CASE("truncated buffers and inconsistent fields are rejected") {
    SmartHeader h;
    h.hops = {node_address(1), node_address(2)};
    h.timestamps = {HopStamp{}, HopStamp{}};
    auto bytes = encode_header(h);
    CHECK_THROWS_AS(decode_header(std::span(bytes).first(10)), HeaderTruncatedError);
    CHECK_THROWS_AS(decode_header(std::span(bytes).first(bytes.size() - 1)),
                    HeaderTruncatedError);
    auto corrupt = bytes;
    corrupt[11] = 3;  // hop_index beyond hop_count
    CHECK_THROWS_AS(decode_header(corrupt), HeaderCorruptError);
    CHECK_THROWS_AS(encode_header(SmartHeader{}), HeaderCorruptError);
}

TEST_CASE("random headers round-trip exactly") {
    std::mt19937_64 gen(99);
    for (int i = 0; i < 1000; ++i) {
        SmartHeader h = random_header(gen);
        auto bytes = encode_header(h);
        CHECK(bytes.size() == header_size(h.hop_count()));
        SmartHeader back = decode_header(bytes);
        CHECK(back == h);
    }
}

TEST_CASE("trailing payload after the header is ignored") {
    std::mt19937_64 gen(5);
    SmartHeader h = random_header(gen);
    auto bytes = encode_header(h);
    bytes.push_back(0xAB);
    bytes.push_back(0xCD);
    CHECK(decode_header(bytes) == h);
}

TEST_CASE("forwarding walks the proxy chain") {
    // A=0 -> B=1 -> C=2, header lists [B, C]
    const OverlayPath path{0, 2, {1}};
    SmartHeader h = make_probe_header(path, 7, 1000);
    CHECK(h.hop_count() == 2);
    CHECK(h.timestamps[0].forward_us == 1000);

    auto act = forward(1, h, 51000);
    CHECK(act.kind == ForwardKind::SendTo);
    CHECK(act.next == 2);
    CHECK(h.hop_index == 1);
    CHECK(h.timestamps[1].forward_us == 51000);

    auto deliver = forward(2, h, 126000);
    CHECK(deliver.kind == ForwardKind::DeliverToRA);
    CHECK(h.hop_index == 1);

    SUBCASE("a node not named in the header drops the packet") {
        SmartHeader h2 = make_probe_header(path, 7, 0);
        auto drop = forward(3, h2, 10);
        CHECK(drop.kind == ForwardKind::Drop);
        CHECK(drop.reason == DropReason::Misrouted);
    }
    SUBCASE("hop_index past the end is corrupt") {
        SmartHeader h2 = make_probe_header(path, 7, 0);
        h2.hop_index = 2;
        auto drop = forward(1, h2, 10);
        CHECK(drop.kind == ForwardKind::Drop);
        CHECK(drop.reason == DropReason::Corrupt);
    }
}

TEST_CASE("forwarding liveness: hop_count steps to delivery") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 4 + rand_below(gen, 4);
        OverlayPath path{0, static_cast<NodeId>(n - 1), {}};
        for (std::size_t v = 1; v + 1 < n && rand_below(gen, 2); ++v) {
            path.vias.push_back(static_cast<NodeId>(v));
        }
        SmartHeader h = make_probe_header(path, trial, 0);
        std::size_t steps = 0;
        NodeId at = path.vias.empty() ? path.dst : path.vias.front();
        for (;;) {
            ++steps;
            auto act = forward(at, h, steps * 1000);
            if (act.kind == ForwardKind::DeliverToRA) break;
            REQUIRE(act.kind == ForwardKind::SendTo);
            at = act.next;
        }
        CHECK(steps == path.hop_count());
    }
}

TEST_CASE("segment timing recovers from stamps") {
    SUBCASE("one hop, forward 0, return 400 ms") {
        SmartHeader h;
        h.hops = {node_address(1)};
        h.timestamps = {HopStamp{0, 400000}};
        auto t = path_rtd_from_segments(h);
        CHECK(t.total_us == 400000);
        REQUIRE(t.segment_us.size() == 1);
        CHECK(t.segment_us[0] == 400000);
    }
    SUBCASE("two hops, 100 ms + 150 ms") {
        SmartHeader h;
        h.hops = {node_address(1), node_address(2)};
        h.timestamps = {HopStamp{0, 250000}, HopStamp{50000, 200000}};
        auto t = path_rtd_from_segments(h);
        CHECK(t.total_us == 250000);
        REQUIRE(t.segment_us.size() == 2);
        CHECK(t.segment_us[0] == 100000);
        CHECK(t.segment_us[1] == 150000);
    }
    SUBCASE("missing return stamp is an incomplete probe") {
        SmartHeader h;
        h.hops = {node_address(1), node_address(2)};
        h.timestamps = {HopStamp{0, 250000}, HopStamp{50000, 0}};
        CHECK_THROWS_AS(path_rtd_from_segments(h), IncompleteProbeError);
    }
    SUBCASE("non-monotone stamps are rejected") {
        SmartHeader h;
        h.hops = {node_address(1), node_address(2)};
        h.timestamps = {HopStamp{60000, 250000}, HopStamp{50000, 200000}};
        CHECK_THROWS_AS(path_rtd_from_segments(h), IncompleteProbeError);
    }
}

TEST_CASE("stamped probes reproduce their segments") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 200; ++trial) {
        OverlayPath path{0, 9, {}};
        const std::size_t hops = 1 + rand_below(gen, 4);
        for (std::size_t v = 0; v + 1 < hops; ++v) {
            path.vias.push_back(static_cast<NodeId>(v + 1));
        }
        std::vector<std::uint64_t> segs(hops);
        for (auto& s : segs) s = 1 + rand_below(gen, 500000);
        const std::uint64_t base = rand_below(gen, 1u << 30);
        SmartHeader h = stamped_probe_header(path, segs, base, trial);
        auto t = path_rtd_from_segments(h);
        CHECK(t.segment_us == segs);
        std::uint64_t total = 0;
        for (auto s : segs) total += s;
        CHECK(t.total_us == total);
    }
}
