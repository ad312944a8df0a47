#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gridsynth/phase.hpp"
#include "gridsynth/topology.hpp"

namespace gridsynth {

/// Per-phase active (kW) and reactive (kvar) power of one load.
struct LoadDemand {
    PhaseTriple p_kw;
    PhaseTriple q_kvar;

    bool operator==(const LoadDemand&) const = default;
};

struct ObservedLoad {
    std::string bus;
    PhaseSet phases;
    LoadDemand demand;

    bool operator==(const ObservedLoad&) const = default;

    bool is_three_phase() const noexcept { return phases.size() == 3; }
    bool is_single_phase() const noexcept { return phases.size() == 1; }
};

/// A feeder with measured per-phase load data. The topology is shared and
/// immutable so many samples on one feeder do not copy it.
struct ObservedNetwork {
    std::shared_ptr<const NetworkTopology> topology;
    std::vector<ObservedLoad> loads;
};

/// Throws ValidationError unless: at least one load, every load bus exists,
/// every phase set is non-empty, p_kw >= 0 and zero outside the phase set.
void validate(const ObservedNetwork& obs);

/// Phase of a single-phase load (undefined for other loads).
Phase single_phase_of(const ObservedLoad& load);

}  // namespace gridsynth
