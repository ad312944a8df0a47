#include "gridsynth/consistency.hpp"

#include <ranges>

#include "gridsynth/error.hpp"

namespace gridsynth {

namespace {

bool has_violation(const NetworkTopology& t, const PhaseAssignment& a) {
    // Subset is transitive: comparing with the nearest assigned ancestor suffices.
    for (BusIndex n = 0; n < t.bus_count(); ++n) {
        if (!a.assigned(n)) continue;
        for (BusIndex m = t.parent(n); m != kNoBus; m = t.parent(m)) {
            if (!a.assigned(m)) continue;
            if (!a[n].subset_of(a[m])) return true;
            break;
        }
    }
    return false;
}

void sweep(const NetworkTopology& t, PhaseAssignment& a, const std::vector<BusIndex>& leaves) {
    for (BusIndex leaf : leaves) {
        for (BusIndex child = leaf; t.parent(child) != kNoBus; child = t.parent(child)) {
            const BusIndex parent = t.parent(child);
            if (a[child].subset_of(a[parent])) continue;
            if (a[parent].size() >= a[child].size()) {
                a[parent] |= a[child];
            } else {
                const PhaseSet merged = a[parent] | a[child];
                for (BusIndex n = parent; n != kNoBus; n = t.parent(n)) a[n] |= merged;
            }
        }
    }
}

}  // namespace

PhaseAssignment assignment_from_loads(const NetworkTopology& t, std::span<const ObservedLoad> loads) {
    PhaseAssignment a(t.bus_count());
    for (const auto& l : loads) a[t.bus_index(l.bus)] |= l.phases;
    a[t.source()] = PhaseSet::all();
    return a;
}

std::vector<ConsistencyViolation> check_consistency(const NetworkTopology& t, const PhaseAssignment& a) {
    if (a.size() != t.bus_count()) throw ValidationError("phase assignment does not match topology size");
    std::vector<ConsistencyViolation> out;
    for (BusIndex n : t.lexicographic_order()) {
        if (!a.assigned(n)) continue;
        for (BusIndex m = t.parent(n); m != kNoBus; m = t.parent(m)) {
            if (a.assigned(m) && !a[n].subset_of(a[m]))
                out.push_back({t.bus_id(n), t.bus_id(m), a[n], a[m]});
        }
    }
    return out;
}

PhaseAssignment enforce_consistency(const NetworkTopology& t, PhaseAssignment a) {
    if (a.size() != t.bus_count()) throw ValidationError("phase assignment does not match topology size");

    a[t.source()] = PhaseSet::all();
    for (BusIndex n : std::views::reverse(t.breadth_first_order())) {
        if (a.assigned(n)) continue;
        for (BusIndex c : t.children(n)) a[n] |= a[c];
        if (a[n].empty()) a[n] = PhaseSet{Phase::A};
    }

    const auto leaves = leaf_indices(t);
    // Sets only grow and each bus holds at most three phases.
    const std::size_t max_sweeps = 3 * t.bus_count() + 1;
    for (std::size_t i = 0; i < max_sweeps; ++i) {
        sweep(t, a, leaves);
        if (!has_violation(t, a)) return a;
    }
    throw ValidationError("phase consistency repair did not reach a fixpoint");
}

}  // namespace gridsynth
