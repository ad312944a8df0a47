#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gridsynth/consistency.hpp"
#include "gridsynth/network.hpp"
#include "gridsynth/sampler.hpp"
#include "gridsynth/topology.hpp"

namespace gridsynth {

/// Per-phase series impedance of every line, per kilometre. Both parts zero
/// is rejected unless `allow_zero` is set.
struct LineImpedance {
    double r_ohm_per_km = 0.4;
    double x_ohm_per_km = 0.3;
    bool allow_zero = false;
};

struct PowerFlowOptions {
    double tolerance = 1e-8;  // per-unit power
    int max_iterations = 100;
};

using PhaseVoltages = std::array<std::complex<double>, 3>;

struct VoltageSolution {
    std::shared_ptr<const NetworkTopology> topology;
    std::vector<PhaseVoltages> voltage;  // per unit, indexed by bus
    std::vector<PhaseSet> energized;     // indexed by bus
    int iterations = 0;
    double max_mismatch = 0.0;

    double magnitude(BusIndex bus, Phase p) const { return std::abs(voltage.at(bus)[index(p)]); }
};

/// Decoupled per-phase backward/forward sweep with constant-power loads.
/// Power base is 1 MVA three-phase; voltage base is the feeder base kV.
/// `bus_demand` is indexed by bus and holds the summed demand of its loads.
/// Throws ConvergenceError (carrying the last mismatch) after max_iterations.
VoltageSolution run_power_flow(std::shared_ptr<const NetworkTopology> t, std::span<const LoadDemand> bus_demand,
                               const PhaseAssignment& energized, const LineImpedance& z = {},
                               const PowerFlowOptions& options = {});

VoltageSolution run_power_flow(const SyntheticSample& s, const LineImpedance& z = {},
                               const PowerFlowOptions& options = {});

/// Sums load demand onto buses.
std::vector<LoadDemand> demand_per_bus(const NetworkTopology& t, std::span<const ObservedLoad> loads);

struct BusPhaseVoltage {
    std::string bus;
    Phase phase = Phase::A;
    double magnitude = 0.0;
    bool in_band = true;
};

/// Every energized (bus, phase) in lexicographic bus order.
std::vector<BusPhaseVoltage> voltage_table(const VoltageSolution& v, double lo, double hi);

/// Energized (bus, phase) pairs with magnitude outside [lo, hi]. Empty = pass.
std::vector<BusPhaseVoltage> voltage_band_report(const VoltageSolution& v, double lo, double hi);

}  // namespace gridsynth
