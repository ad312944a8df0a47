#include "gridsynth/network.hpp"

#include <cmath>

#include "gridsynth/error.hpp"

namespace gridsynth {

void validate(const ObservedNetwork& obs) {
    if (!obs.topology) throw ValidationError("observed network has no topology");
    if (obs.loads.empty()) throw ValidationError("observed network has no observed loads");
    for (std::size_t j = 0; j < obs.loads.size(); ++j) {
        const ObservedLoad& l = obs.loads[j];
        const std::string label = "observed load #" + std::to_string(j) + " (bus " + l.bus + ")";
        if (!obs.topology->find_bus(l.bus)) throw ValidationError(label + ": unknown bus");
        if (l.phases.empty()) throw ValidationError(label + ": empty phase set");
        for (Phase p : kAllPhases) {
            const double pk = l.demand.p_kw[p];
            if (!std::isfinite(pk) || pk < 0.0) throw ValidationError(label + ": p_kw must be finite and >= 0");
            if (!std::isfinite(l.demand.q_kvar[p])) throw ValidationError(label + ": q_kvar must be finite");
            if (pk > 0.0 && !l.phases.contains(p))
                throw ValidationError(label + ": p_kw on phase " + std::string(1, to_char(p)) +
                                      " outside its phase set");
        }
    }
}

Phase single_phase_of(const ObservedLoad& load) {
    for (Phase p : kAllPhases)
        if (load.phases.contains(p)) return p;
    return Phase::A;
}

}  // namespace gridsynth
