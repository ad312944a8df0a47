#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gridsynth {

struct Bus {
    std::string id;
    std::optional<double> x{};  // meters
    std::optional<double> y{};  // meters

    bool operator==(const Bus&) const = default;
};

struct Line {
    std::string from;
    std::string to;
    /// Meters. Absent on input means "use the coordinate distance"; always set
    /// once the line is part of a NetworkTopology.
    std::optional<double> length_m;

    bool operator==(const Line&) const = default;
};

struct Feeder {
    std::string source_bus;
    double base_kv = 0.0;

    bool operator==(const Feeder&) const = default;
};

struct LoadPoint {
    std::string bus;

    bool operator==(const LoadPoint&) const = default;
};

using BusIndex = std::size_t;
inline constexpr BusIndex kNoBus = std::numeric_limits<BusIndex>::max();

/// Validated radial feeder. Immutable after construction; the constructor
/// checks every structural invariant and throws ValidationError naming the
/// offending element.
///
/// Bus indices follow input order. Tree structure (parent, children, depth,
/// distance from source) is precomputed rooted at the feeder source.
class NetworkTopology {
public:
    NetworkTopology(std::vector<Bus> buses, std::vector<Line> lines, Feeder feeder,
                    std::vector<LoadPoint> loads);

    const std::vector<Bus>& buses() const noexcept { return buses_; }
    const std::vector<Line>& lines() const noexcept { return lines_; }
    const Feeder& feeder() const noexcept { return feeder_; }
    const std::vector<LoadPoint>& loads() const noexcept { return loads_; }

    std::size_t bus_count() const noexcept { return buses_.size(); }
    const std::string& bus_id(BusIndex i) const { return buses_.at(i).id; }
    std::optional<BusIndex> find_bus(std::string_view id) const;
    /// Throws ValidationError for unknown ids.
    BusIndex bus_index(std::string_view id) const;

    BusIndex source() const noexcept { return source_; }
    BusIndex parent(BusIndex i) const { return parent_.at(i); }
    /// Length of the line joining i to its parent (0 for the source).
    double parent_length_m(BusIndex i) const { return parent_length_.at(i); }
    std::span<const BusIndex> children(BusIndex i) const { return children_.at(i); }
    std::size_t hops(BusIndex i) const { return hops_.at(i); }
    double distance_m(BusIndex i) const { return distance_.at(i); }
    std::size_t degree(BusIndex i) const { return degree_.at(i); }

    /// Source first, every bus after its parent.
    std::span<const BusIndex> breadth_first_order() const noexcept { return bfs_order_; }
    /// All bus indices sorted by id.
    std::span<const BusIndex> lexicographic_order() const noexcept { return lex_order_; }

    BusIndex load_bus(std::size_t load) const { return load_bus_.at(load); }

    /// Maximum over leaves of the path length from the source.
    double feeder_depth_m() const noexcept { return feeder_depth_; }

    bool operator==(const NetworkTopology& other) const {
        return buses_ == other.buses_ && lines_ == other.lines_ && feeder_ == other.feeder_ &&
               loads_ == other.loads_;
    }

private:
    std::vector<Bus> buses_;
    std::vector<Line> lines_;
    Feeder feeder_;
    std::vector<LoadPoint> loads_;

    std::unordered_map<std::string, BusIndex> index_;
    BusIndex source_ = kNoBus;
    std::vector<BusIndex> parent_;
    std::vector<double> parent_length_;
    std::vector<std::vector<BusIndex>> children_;
    std::vector<std::size_t> hops_;
    std::vector<double> distance_;
    std::vector<std::size_t> degree_;
    std::vector<BusIndex> bfs_order_;
    std::vector<BusIndex> lex_order_;
    std::vector<BusIndex> load_bus_;
    double feeder_depth_ = 0.0;
};

using Edge = std::pair<std::string, std::string>;

/// Degree-1 buses other than the feeder source.
std::set<std::string> leaf_nodes(const NetworkTopology& t);
/// Same set as bus indices in lexicographic id order.
std::vector<BusIndex> leaf_indices(const NetworkTopology& t);

/// Unique tree path from a to b. Edges are ordered from a toward b, each
/// written (nearer-to-a, nearer-to-b). Empty when a == b.
std::vector<Edge> shortest_path(const NetworkTopology& t, std::string_view a, std::string_view b);
/// Bus sequence a, ..., b along the tree path.
std::vector<BusIndex> path_buses(const NetworkTopology& t, BusIndex a, BusIndex b);

/// Graph distance from the source to the bus divided by the feeder depth,
/// clamped to [0, 1]. Throws ValidationError when the feeder depth is zero.
double normalized_distance(const NetworkTopology& t, std::string_view load_bus);
double normalized_distance(const NetworkTopology& t, BusIndex bus);

}  // namespace gridsynth
