#pragma once

#include <span>
#include <string>
#include <vector>

#include "gridsynth/network.hpp"
#include "gridsynth/phase.hpp"
#include "gridsynth/topology.hpp"

namespace gridsynth {

/// Phase set per bus, indexed like NetworkTopology buses. An empty set
/// means "not assigned".
class PhaseAssignment {
public:
    PhaseAssignment() = default;
    explicit PhaseAssignment(std::size_t bus_count) : sets_(bus_count) {}

    std::size_t size() const noexcept { return sets_.size(); }
    PhaseSet& operator[](BusIndex i) { return sets_.at(i); }
    PhaseSet operator[](BusIndex i) const { return sets_.at(i); }
    bool assigned(BusIndex i) const { return !sets_.at(i).empty(); }

    bool operator==(const PhaseAssignment&) const = default;

private:
    std::vector<PhaseSet> sets_;
};

/// Each load's bus receives the union of its loads' phase sets; the feeder
/// source receives {A, B, C}. Other buses stay unassigned.
PhaseAssignment assignment_from_loads(const NetworkTopology& t, std::span<const ObservedLoad> loads);

struct ConsistencyViolation {
    std::string downstream;
    std::string upstream;
    PhaseSet downstream_phases;
    PhaseSet upstream_phases;

    bool operator==(const ConsistencyViolation&) const = default;
};

/// Every (n, m) with both buses assigned, m a strict ancestor of n, and
/// Phases(n) not a subset of Phases(m). Ordered by n (lexicographic id), then
/// m from nearest to farthest.
std::vector<ConsistencyViolation> check_consistency(const NetworkTopology& t, const PhaseAssignment& a);

/// Leaf-to-feeder repair. For every leaf (lexicographic order), walk its path
/// toward the source one edge (child, parent) at a time; when the child's
/// phases escape the parent:
///  - parent at least as wide as the child: parent absorbs the child's phases;
///  - otherwise every bus from the source down to the parent absorbs
///    parent ∪ child.
/// Sweeps repeat until no violation remains. Unassigned buses are first
/// filled with the union of their children (at least {A}); the source is
/// always {A, B, C}. Phases are only ever added.
PhaseAssignment enforce_consistency(const NetworkTopology& t, PhaseAssignment a);

}  // namespace gridsynth
