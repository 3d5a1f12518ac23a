// Overlay topology and source-routed paths. The overlay is a complete graph:
// any proxy reaches any other over plain IP, so a path is just the ordered
// list of intermediate proxies between source and destination.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "smart/errors.hpp"

#include "json.hpp"

namespace smart {

using NodeId = std::uint32_t;

struct OverlayNode {
    NodeId id = 0;
    std::string name;
    double lat = 0.0;
    double lon = 0.0;
};

struct OverlayTopology {
    std::vector<OverlayNode> nodes;  // ids dense 0..n-1

    std::size_t size() const { return nodes.size(); }
};

// Synthesized topology with generated names, for simulations and tests.
OverlayTopology make_topology(std::size_t n);

// Topology file is a JSON array of {id, name, lat, lon}. Validates density
// and uniqueness of ids.
OverlayTopology load_topology(std::istream& in);
void save_topology(const OverlayTopology& topo, std::ostream& out);
OverlayTopology topology_from_json(const nlohmann::json& j);

struct OverlayPath {
    NodeId src = 0;
    NodeId dst = 0;
    std::vector<NodeId> vias;  // empty = direct IP route

    std::size_t hop_count() const { return vias.size() + 1; }
    bool direct() const { return vias.empty(); }

    // src, vias..., dst
    std::vector<NodeId> node_sequence() const;

    bool operator==(const OverlayPath&) const = default;
};

std::string to_string(const OverlayPath& path);

// Throws InvalidPairError / InvalidInputError when the path breaks its
// structural rules (src != dst, vias disjoint from endpoints, no duplicate
// vias, hop_count <= max_hops).
void validate_path(const OverlayPath& path, std::size_t max_hops, std::size_t node_count);

// All simple paths with at most max_hops overlay hops, direct route first,
// then lexicographic by via sequence. The order is what gives candidate
// paths a stable neuron index across runs.
std::vector<OverlayPath> enumerate_paths(const OverlayTopology& topo, NodeId src, NodeId dst,
                                         std::size_t max_hops);

}  // namespace smart
