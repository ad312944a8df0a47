#include "gridsynth/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridsynth/error.hpp"

namespace gridsynth {

namespace {

// Union-find over bus indices, used to reject cycles edge by edge.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[b] = a;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

std::string line_label(const Line& l) { return "line " + l.from + "-" + l.to; }

}  // namespace

NetworkTopology::NetworkTopology(std::vector<Bus> buses, std::vector<Line> lines, Feeder feeder,
                                 std::vector<LoadPoint> loads)
    : buses_(std::move(buses)), lines_(std::move(lines)), feeder_(std::move(feeder)), loads_(std::move(loads)) {
    const std::size_t n = buses_.size();
    if (n == 0) throw ValidationError("topology has no buses");

    index_.reserve(n);
    for (BusIndex i = 0; i < n; ++i) {
        const Bus& b = buses_[i];
        if (b.id.empty()) throw ValidationError("bus #" + std::to_string(i) + " has an empty id");
        if (b.x.has_value() != b.y.has_value())
            throw ValidationError("bus " + b.id + ": x and y must be given together");
        if (!index_.emplace(b.id, i).second) throw ValidationError("duplicate bus id " + b.id);
    }

    if (!(feeder_.base_kv > 0.0) || !std::isfinite(feeder_.base_kv))
        throw ValidationError("feeder base_kv must be positive");
    const auto src = find_bus(feeder_.source_bus);
    if (!src) throw ValidationError("feeder source bus " + feeder_.source_bus + " does not exist");
    source_ = *src;

    // Acyclic (union-find) plus connected (BFS) gives |lines| == |buses| - 1.
    std::vector<std::vector<std::pair<BusIndex, double>>> adjacency(n);
    DisjointSets sets(n);
    for (Line& l : lines_) {
        const auto from = find_bus(l.from);
        const auto to = find_bus(l.to);
        if (!from) throw ValidationError(line_label(l) + ": unknown bus " + l.from);
        if (!to) throw ValidationError(line_label(l) + ": unknown bus " + l.to);
        if (*from == *to) throw ValidationError(line_label(l) + ": self-loop");

        if (!l.length_m) {
            const Bus& a = buses_[*from];
            const Bus& b = buses_[*to];
            if (!a.x || !b.x)
                throw ValidationError(line_label(l) + ": length_m missing and endpoint coordinates absent");
            l.length_m = std::hypot(*a.x - *b.x, *a.y - *b.y);
        }
        if (!(*l.length_m >= 0.0) || !std::isfinite(*l.length_m))
            throw ValidationError(line_label(l) + ": length_m must be a finite value >= 0");

        if (!sets.unite(*from, *to)) throw ValidationError("cycle detected at " + line_label(l));
        adjacency[*from].emplace_back(*to, *l.length_m);
        adjacency[*to].emplace_back(*from, *l.length_m);
    }

    parent_.assign(n, kNoBus);
    parent_length_.assign(n, 0.0);
    children_.assign(n, {});
    hops_.assign(n, 0);
    distance_.assign(n, 0.0);
    degree_.assign(n, 0);
    bfs_order_.reserve(n);

    std::vector<bool> seen(n, false);
    seen[source_] = true;
    bfs_order_.push_back(source_);
    for (std::size_t head = 0; head < bfs_order_.size(); ++head) {
        const BusIndex u = bfs_order_[head];
        degree_[u] = adjacency[u].size();
        for (auto [v, len] : adjacency[u]) {
            if (seen[v]) continue;
            seen[v] = true;
            parent_[v] = u;
            parent_length_[v] = len;
            hops_[v] = hops_[u] + 1;
            distance_[v] = distance_[u] + len;
            children_[u].push_back(v);
            bfs_order_.push_back(v);
        }
    }
    if (bfs_order_.size() != n) {
        for (BusIndex i = 0; i < n; ++i)
            if (!seen[i]) throw ValidationError("disconnected: bus " + buses_[i].id + " unreachable from source");
    }

    for (auto& c : children_)
        std::sort(c.begin(), c.end(), [this](BusIndex a, BusIndex b) { return buses_[a].id < buses_[b].id; });

    lex_order_.resize(n);
    std::iota(lex_order_.begin(), lex_order_.end(), 0);
    std::sort(lex_order_.begin(), lex_order_.end(),
              [this](BusIndex a, BusIndex b) { return buses_[a].id < buses_[b].id; });

    for (BusIndex i = 0; i < n; ++i)
        if (i != source_ && degree_[i] == 1) feeder_depth_ = std::max(feeder_depth_, distance_[i]);

    load_bus_.reserve(loads_.size());
    for (std::size_t j = 0; j < loads_.size(); ++j) {
        const auto b = find_bus(loads_[j].bus);
        if (!b) throw ValidationError("load #" + std::to_string(j) + ": unknown bus " + loads_[j].bus);
        load_bus_.push_back(*b);
    }
}

std::optional<BusIndex> NetworkTopology::find_bus(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

BusIndex NetworkTopology::bus_index(std::string_view id) const {
    const auto b = find_bus(id);
    if (!b) throw ValidationError("unknown bus id " + std::string(id));
    return *b;
}

std::vector<BusIndex> leaf_indices(const NetworkTopology& t) {
    std::vector<BusIndex> out;
    for (BusIndex i : t.lexicographic_order())
        if (i != t.source() && t.degree(i) == 1) out.push_back(i);
    return out;
}

std::set<std::string> leaf_nodes(const NetworkTopology& t) {
    std::set<std::string> out;
    for (BusIndex i : leaf_indices(t)) out.insert(t.bus_id(i));
    return out;
}

std::vector<BusIndex> path_buses(const NetworkTopology& t, BusIndex a, BusIndex b) {
    // Climb from the deeper end until both sides meet at the common ancestor.
    std::vector<BusIndex> from_a{a};
    std::vector<BusIndex> from_b{b};
    while (a != b) {
        if (t.hops(a) >= t.hops(b)) {
            a = t.parent(a);
            from_a.push_back(a);
        } else {
            b = t.parent(b);
            from_b.push_back(b);
        }
    }
    from_b.pop_back();
    from_a.insert(from_a.end(), from_b.rbegin(), from_b.rend());
    return from_a;
}

std::vector<Edge> shortest_path(const NetworkTopology& t, std::string_view a, std::string_view b) {
    const auto buses = path_buses(t, t.bus_index(a), t.bus_index(b));
    std::vector<Edge> edges;
    edges.reserve(buses.size() - 1);
    for (std::size_t k = 1; k < buses.size(); ++k) edges.emplace_back(t.bus_id(buses[k - 1]), t.bus_id(buses[k]));
    return edges;
}

double normalized_distance(const NetworkTopology& t, BusIndex bus) {
    const double depth = t.feeder_depth_m();
    if (!(depth > 0.0)) throw ValidationError("degenerate feeder: all path lengths from the source are zero");
    return std::clamp(t.distance_m(bus) / depth, 0.0, 1.0);
}

double normalized_distance(const NetworkTopology& t, std::string_view load_bus) {
    return normalized_distance(t, t.bus_index(load_bus));
}

}  // namespace gridsynth
