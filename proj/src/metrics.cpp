#include "smart/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace smart {

namespace {

constexpr double kOptimalBand = 1.001;   // 0.1% relative tolerance
constexpr double kConvergeBand = 1.05;   // within 5% of oracle
constexpr std::size_t kConvergeWindow = 10;

bool better(std::uint64_t rtt, const OverlayPath& path, std::optional<std::uint64_t> best_rtt,
            const OverlayPath& best_path) {
    if (!best_rtt) return true;
    if (rtt != *best_rtt) return rtt < *best_rtt;
    if (path.hop_count() != best_path.hop_count()) {
        return path.hop_count() < best_path.hop_count();
    }
    return path.vias < best_path.vias;
}

}  // namespace

PathScan scan_paths(const LinkTrace& trace, std::uint64_t round,
                    std::span<const OverlayPath> candidates, std::size_t max_hops) {
    PathScan scan;
    scan.class_min_rtt_us.assign(max_hops, std::nullopt);
    for (const OverlayPath& path : candidates) {
        const auto seq = path.node_sequence();
        std::uint64_t rtt = 0;
        bool lost = false;
        for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
            const LinkSample& s = trace.at(round, seq[i], seq[i + 1]);
            if (s.lost) {
                lost = true;
                break;
            }
            rtt += s.rtt_us;
        }
        if (lost) continue;
        auto& cls = scan.class_min_rtt_us[path.hop_count() - 1];
        if (!cls || rtt < *cls) {
            cls = rtt;
        }
        if (better(rtt, path, scan.best_rtt_us, scan.best ? *scan.best : path)) {
            scan.best = path;
            scan.best_rtt_us = rtt;
        }
    }
    return scan;
}

PathScan scan_paths(const LinkTrace& trace, std::uint64_t round, NodeId src, NodeId dst,
                    std::size_t max_hops) {
    OverlayTopology topo = make_topology(trace.node_count());
    const auto candidates = enumerate_paths(topo, src, dst, max_hops);
    return scan_paths(trace, round, candidates, max_hops);
}

std::pair<OverlayPath, std::uint64_t> optimal_path(const LinkTrace& trace, std::uint64_t round,
                                                   NodeId src, NodeId dst, std::size_t max_hops) {
    PathScan scan = scan_paths(trace, round, src, dst, max_hops);
    if (!scan.best) {
        throw NoPathError("every candidate path lost at round " + std::to_string(round));
    }
    return {*scan.best, *scan.best_rtt_us};
}

namespace {

nlohmann::json opt_u64(const std::optional<std::uint64_t>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<std::uint64_t> u64_opt(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<std::uint64_t>();
}

}  // namespace

nlohmann::json report_to_json(const RoundReport& r) {
    nlohmann::json cls = nlohmann::json::array();
    for (const auto& c : r.class_min_rtt_us) {
        cls.push_back(opt_u64(c));
    }
    return nlohmann::json{{"round", r.round},
                          {"src", r.src},
                          {"dst", r.dst},
                          {"chosen_vias", r.chosen.vias},
                          {"chosen_rtt_us", opt_u64(r.chosen_rtt_us)},
                          {"direct_rtt_us", opt_u64(r.direct_rtt_us)},
                          {"oracle_vias", r.oracle ? nlohmann::json(r.oracle->vias)
                                                   : nlohmann::json(nullptr)},
                          {"oracle_rtt_us", opt_u64(r.oracle_rtt_us)},
                          {"class_min_rtt_us", std::move(cls)},
                          {"links_charged", r.links_charged},
                          {"all_lost", r.all_lost}};
}

RoundReport report_from_json(const nlohmann::json& j) {
    RoundReport r;
    r.round = j.at("round").get<std::uint64_t>();
    r.src = j.at("src").get<NodeId>();
    r.dst = j.at("dst").get<NodeId>();
    r.chosen = OverlayPath{r.src, r.dst, j.at("chosen_vias").get<std::vector<NodeId>>()};
    r.chosen_rtt_us = u64_opt(j.at("chosen_rtt_us"));
    r.direct_rtt_us = u64_opt(j.at("direct_rtt_us"));
    if (!j.at("oracle_vias").is_null()) {
        r.oracle = OverlayPath{r.src, r.dst, j.at("oracle_vias").get<std::vector<NodeId>>()};
    }
    r.oracle_rtt_us = u64_opt(j.at("oracle_rtt_us"));
    for (const auto& c : j.at("class_min_rtt_us")) {
        r.class_min_rtt_us.push_back(u64_opt(c));
    }
    r.links_charged = j.at("links_charged").get<std::size_t>();
    r.all_lost = j.at("all_lost").get<bool>();
    return r;
}

AggregateStats aggregate(std::span<const RoundReport> reports) {
    if (reports.empty()) {
        throw InvalidInputError("cannot aggregate an empty report stream");
    }
    AggregateStats s;
    std::uint64_t nonopt_direct = 0;
    std::uint64_t nonopt_chosen = 0;
    double gap_direct_sum = 0.0;
    std::uint64_t gap_direct_n = 0;
    double gap_chosen_sum = 0.0;
    std::uint64_t gap_chosen_n = 0;
    double gap_2hop_sum = 0.0;
    std::uint64_t gap_2hop_n = 0;
    std::map<std::size_t, std::uint64_t> hop_counts;

    for (const RoundReport& r : reports) {
        if (r.all_lost || !r.oracle_rtt_us || !r.oracle) {
            ++s.excluded_no_oracle;
            continue;
        }
        ++s.counted_rounds;
        const double opt = static_cast<double>(*r.oracle_rtt_us);
        ++hop_counts[r.oracle->hop_count()];

        if (r.direct_rtt_us) {
            const double d = static_cast<double>(*r.direct_rtt_us);
            if (d > opt * kOptimalBand) ++nonopt_direct;
            gap_direct_sum += (d - opt) / opt * 100.0;
            ++gap_direct_n;
        } else {
            ++nonopt_direct;  // lost direct route is worse than any measured path
            ++s.excluded_direct_lost;
        }
        if (r.chosen_rtt_us) {
            const double c = static_cast<double>(*r.chosen_rtt_us);
            if (c > opt * kOptimalBand) ++nonopt_chosen;
            gap_chosen_sum += (c - opt) / opt * 100.0;
            ++gap_chosen_n;
        } else {
            ++nonopt_chosen;
            ++s.excluded_chosen_lost;
        }
        std::optional<std::uint64_t> best2;
        for (std::size_t h = 0; h < r.class_min_rtt_us.size() && h < 2; ++h) {
            if (r.class_min_rtt_us[h] && (!best2 || *r.class_min_rtt_us[h] < *best2)) {
                best2 = r.class_min_rtt_us[h];
            }
        }
        if (best2) {
            gap_2hop_sum += (static_cast<double>(*best2) - opt) / opt * 100.0;
            ++gap_2hop_n;
        }
    }

    if (s.counted_rounds == 0) {
        throw InvalidInputError("no usable rounds in report stream");
    }
    const double n = static_cast<double>(s.counted_rounds);
    s.pct_nonoptimal_direct = 100.0 * static_cast<double>(nonopt_direct) / n;
    s.pct_nonoptimal_chosen = 100.0 * static_cast<double>(nonopt_chosen) / n;
    s.avg_gap_direct = gap_direct_n ? gap_direct_sum / static_cast<double>(gap_direct_n) : 0.0;
    s.avg_gap_chosen = gap_chosen_n ? gap_chosen_sum / static_cast<double>(gap_chosen_n) : 0.0;
    s.avg_gap_best2hop = gap_2hop_n ? gap_2hop_sum / static_cast<double>(gap_2hop_n) : 0.0;
    for (const auto& [hops, count] : hop_counts) {
        s.hop_histogram[hops] = 100.0 * static_cast<double>(count) / n;
    }

    // Per-pair convergence: first 10-round stretch with chosen within 5% of
    // the oracle, scanning rounds in stream order for that pair.
    std::map<std::pair<NodeId, NodeId>, std::vector<const RoundReport*>> by_pair;
    for (const RoundReport& r : reports) {
        by_pair[{r.src, r.dst}].push_back(&r);
    }
    for (auto& [pair, rows] : by_pair) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const RoundReport* a, const RoundReport* b) { return a->round < b->round; });
        std::int64_t converged = -1;
        std::size_t run = 0;
        for (const RoundReport* r : rows) {
            const bool within = r->oracle_rtt_us && r->chosen_rtt_us &&
                                static_cast<double>(*r->chosen_rtt_us) <=
                                    static_cast<double>(*r->oracle_rtt_us) * kConvergeBand;
            run = within ? run + 1 : 0;
            if (run == kConvergeWindow) {
                converged = static_cast<std::int64_t>(r->round) -
                            static_cast<std::int64_t>(kConvergeWindow) + 1;
                break;
            }
        }
        s.convergence_round[std::to_string(pair.first) + "-" + std::to_string(pair.second)] =
            converged;
    }
    return s;
}

nlohmann::json aggregate_to_json(const AggregateStats& s) {
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [hops, pct] : s.hop_histogram) {
        hist[std::to_string(hops)] = pct;
    }
    nlohmann::json conv = nlohmann::json::object();
    for (const auto& [pair, round] : s.convergence_round) {
        conv[pair] = round;
    }
    return nlohmann::json{{"pct_nonoptimal_direct", s.pct_nonoptimal_direct},
                          {"pct_nonoptimal_chosen", s.pct_nonoptimal_chosen},
                          {"avg_gap_direct", s.avg_gap_direct},
                          {"avg_gap_chosen", s.avg_gap_chosen},
                          {"hop_histogram", std::move(hist)},
                          {"avg_gap_best2hop", s.avg_gap_best2hop},
                          {"convergence_round", std::move(conv)},
                          {"counted_rounds", s.counted_rounds},
                          {"excluded_no_oracle", s.excluded_no_oracle},
                          {"excluded_direct_lost", s.excluded_direct_lost},
                          {"excluded_chosen_lost", s.excluded_chosen_lost}};
}

void write_hop_histogram_csv(const AggregateStats& stats, std::size_t max_hops,
                             std::ostream& out) {
    out << "hops,percent\n";
    char buf[64];
    for (std::size_t h = 1; h <= max_hops; ++h) {
        const auto it = stats.hop_histogram.find(h);
        const double pct = it == stats.hop_histogram.end() ? 0.0 : it->second;
        std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", h, pct);
        out << buf;
    }
}

void write_gap_cdf_csv(std::span<const RoundReport> reports, std::ostream& out) {
    std::vector<double> gaps_direct;
    std::vector<double> gaps_chosen;
    for (const RoundReport& r : reports) {
        if (!r.oracle_rtt_us) continue;
        const double opt = static_cast<double>(*r.oracle_rtt_us);
        if (r.direct_rtt_us) {
            gaps_direct.push_back((static_cast<double>(*r.direct_rtt_us) - opt) / opt * 100.0);
        }
        if (r.chosen_rtt_us) {
            gaps_chosen.push_back((static_cast<double>(*r.chosen_rtt_us) - opt) / opt * 100.0);
        }
    }
    std::sort(gaps_direct.begin(), gaps_direct.end());
    std::sort(gaps_chosen.begin(), gaps_chosen.end());

    std::vector<double> xs;
    xs.reserve(gaps_direct.size() + gaps_chosen.size());
    xs.insert(xs.end(), gaps_direct.begin(), gaps_direct.end());
    xs.insert(xs.end(), gaps_chosen.begin(), gaps_chosen.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    auto cdf_at = [](const std::vector<double>& sorted, double x) {
        if (sorted.empty()) return 0.0;
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
        return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
    };

    out << "gap_pct,cdf_direct,cdf_chosen\n";
    char buf[96];
    for (double x : xs) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f\n", x, cdf_at(gaps_direct, x),
                      cdf_at(gaps_chosen, x));
        out << buf;
    }
}

void write_timeseries_csv(std::span<const RoundReport> reports, NodeId src, NodeId dst,
                          std::ostream& out) {
    out << "round,direct_ms,chosen_ms,optimal_ms\n";
    char buf[128];
    bool any = false;
    for (const RoundReport& r : reports) {
        if (r.src != src || r.dst != dst) continue;
        any = true;
        auto field = [&](const std::optional<std::uint64_t>& v) -> std::string {
            if (!v) return "";
            char f[32];
            std::snprintf(f, sizeof(f), "%.3f", static_cast<double>(*v) / 1000.0);
            return f;
        };
        std::snprintf(buf, sizeof(buf), "%llu,%s,%s,%s\n",
                      static_cast<unsigned long long>(r.round), field(r.direct_rtt_us).c_str(),
                      field(r.chosen_rtt_us).c_str(), field(r.oracle_rtt_us).c_str());
        out << buf;
    }
    if (!any) {
        throw InvalidInputError("no reports for pair " + std::to_string(src) + "-" +
                                std::to_string(dst));
    }
}

}  // namespace smart
