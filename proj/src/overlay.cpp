#include "smart/overlay.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

namespace smart {

OverlayTopology make_topology(std::size_t n) {
    if (n < 2) {
        throw ConfigError("topology needs at least 2 nodes");
    }
    OverlayTopology topo;
    topo.nodes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        topo.nodes.push_back(OverlayNode{static_cast<NodeId>(i), "node-" + std::to_string(i), 0.0, 0.0});
    }
    return topo;
}

OverlayTopology topology_from_json(const nlohmann::json& j) {
    if (!j.is_array()) {
        throw ConfigError("topology JSON must be an array of nodes");
    }
    OverlayTopology topo;
    for (const auto& entry : j) {
        OverlayNode node;
        node.id = entry.at("id").get<NodeId>();
        node.name = entry.at("name").get<std::string>();
        node.lat = entry.value("lat", 0.0);
        node.lon = entry.value("lon", 0.0);
        topo.nodes.push_back(std::move(node));
    }
    if (topo.nodes.size() < 2) {
        throw ConfigError("topology needs at least 2 nodes");
    }
    std::sort(topo.nodes.begin(), topo.nodes.end(),
              [](const OverlayNode& a, const OverlayNode& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < topo.nodes.size(); ++i) {
        if (topo.nodes[i].id != i) {
            throw ConfigError("node ids must be dense and unique, 0.." +
                              std::to_string(topo.nodes.size() - 1));
        }
    }
    return topo;
}

OverlayTopology load_topology(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad topology JSON: ") + e.what());
    }
    return topology_from_json(j);
}

void save_topology(const OverlayTopology& topo, std::ostream& out) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& node : topo.nodes) {
        j.push_back({{"id", node.id}, {"name", node.name}, {"lat", node.lat}, {"lon", node.lon}});
    }
    out << j.dump(2) << "\n";
}

std::vector<NodeId> OverlayPath::node_sequence() const {
    std::vector<NodeId> seq;
    seq.reserve(vias.size() + 2);
    seq.push_back(src);
    seq.insert(seq.end(), vias.begin(), vias.end());
    seq.push_back(dst);
    return seq;
}

std::string to_string(const OverlayPath& path) {
    std::string s = std::to_string(path.src);
    for (NodeId v : path.vias) {
        s += "->" + std::to_string(v);
    }
    s += "->" + std::to_string(path.dst);
    return s;
}

void validate_path(const OverlayPath& path, std::size_t max_hops, std::size_t node_count) {
    if (path.src == path.dst) {
        throw InvalidPairError("path source equals destination");
    }
    if (path.hop_count() > max_hops) {
        throw InvalidInputError("path " + to_string(path) + " exceeds " +
                                std::to_string(max_hops) + " hops");
    }
    std::set<NodeId> seen;
    for (NodeId v : path.vias) {
        if (v == path.src || v == path.dst || !seen.insert(v).second) {
            throw InvalidInputError("path " + to_string(path) + " has repeated nodes");
        }
        if (v >= node_count) {
            throw InvalidInputError("via node " + std::to_string(v) + " outside topology");
        }
    }
    if (path.src >= node_count || path.dst >= node_count) {
        throw InvalidInputError("endpoint outside topology");
    }
}

namespace {

// Depth-first in ascending via order; emitting each prefix before extending
// it yields direct-first lexicographic order.
void extend_paths(const std::vector<NodeId>& candidates, NodeId src, NodeId dst,
                  std::size_t max_vias, std::vector<NodeId>& vias,
                  std::vector<bool>& used, std::vector<OverlayPath>& out) {
    out.push_back(OverlayPath{src, dst, vias});
    if (vias.size() == max_vias) {
        return;
    }
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        if (used[ci]) continue;
        used[ci] = true;
        vias.push_back(candidates[ci]);
        extend_paths(candidates, src, dst, max_vias, vias, used, out);
        vias.pop_back();
        used[ci] = false;
    }
}

}  // namespace

std::vector<OverlayPath> enumerate_paths(const OverlayTopology& topo, NodeId src, NodeId dst,
                                         std::size_t max_hops) {
    if (src == dst) {
        throw InvalidPairError("cannot enumerate paths from a node to itself");
    }
    if (src >= topo.size() || dst >= topo.size()) {
        throw InvalidPairError("endpoint outside topology");
    }
    if (max_hops < 1) {
        throw InvalidInputError("max_hops must be at least 1");
    }
    std::vector<NodeId> candidates;
    for (const auto& node : topo.nodes) {
        if (node.id != src && node.id != dst) {
            candidates.push_back(node.id);
        }
    }
    std::vector<OverlayPath> out;
    std::vector<NodeId> vias;
    std::vector<bool> used(candidates.size(), false);
    extend_paths(candidates, src, dst, max_hops - 1, vias, used, out);
    return out;
}

}  // namespace smart
