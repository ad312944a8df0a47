#include "gridsynth/powerflow.hpp"

#include <cmath>
#include <numbers>
#include <ranges>

#include "gridsynth/error.hpp"

namespace gridsynth {

namespace {

constexpr double kBaseMva = 1.0;
// Per-phase share of the three-phase power base, in kVA.
constexpr double kPhaseBaseKva = kBaseMva * 1000.0 / 3.0;

// Written as components: std::polar at +-120 degrees misses unit magnitude
// by an ulp.
PhaseVoltages source_voltages() {
    const double h = std::numbers::sqrt3 / 2.0;
    return {std::complex<double>{1.0, 0.0}, {-0.5, -h}, {-0.5, h}};
}

}  // namespace

std::vector<LoadDemand> demand_per_bus(const NetworkTopology& t, std::span<const ObservedLoad> loads) {
    std::vector<LoadDemand> out(t.bus_count());
    for (const auto& l : loads) {
        LoadDemand& d = out[t.bus_index(l.bus)];
        for (Phase p : kAllPhases) {
            d.p_kw[p] += l.demand.p_kw[p];
            d.q_kvar[p] += l.demand.q_kvar[p];
        }
    }
    return out;
}

VoltageSolution run_power_flow(std::shared_ptr<const NetworkTopology> topology,
                               std::span<const LoadDemand> bus_demand, const PhaseAssignment& energized,
                               const LineImpedance& z, const PowerFlowOptions& options) {
    if (!topology) throw ValidationError("power flow: no topology");
    const NetworkTopology& t = *topology;
    const std::size_t n = t.bus_count();
    if (bus_demand.size() != n || energized.size() != n)
        throw ValidationError("power flow: demand/assignment size does not match topology");
    if (!(t.feeder().base_kv > 0.0)) throw ValidationError("power flow: base voltage must be > 0");
    if (z.r_ohm_per_km < 0.0 || z.x_ohm_per_km < 0.0) throw ValidationError("power flow: negative impedance");
    if (z.r_ohm_per_km == 0.0 && z.x_ohm_per_km == 0.0 && !z.allow_zero)
        throw ValidationError("power flow: zero line impedance requires explicit zero-impedance mode");
    if (options.max_iterations < 1) throw ValidationError("power flow: max_iterations must be >= 1");

    const double z_base = t.feeder().base_kv * t.feeder().base_kv / kBaseMva;
    const std::complex<double> z_per_m{z.r_ohm_per_km / 1000.0 / z_base, z.x_ohm_per_km / 1000.0 / z_base};

    std::vector<std::complex<double>> line_z(n);
    std::vector<std::array<std::complex<double>, 3>> s_pu(n);
    for (BusIndex b = 0; b < n; ++b) {
        line_z[b] = z_per_m * t.parent_length_m(b);
        for (Phase p : kAllPhases) {
            const double pk = bus_demand[b].p_kw[p];
            const double qk = bus_demand[b].q_kvar[p];
            if (pk < 0.0) throw ValidationError("power flow: negative demand at bus " + t.bus_id(b));
            s_pu[b][index(p)] = {pk / kPhaseBaseKva, qk / kPhaseBaseKva};
        }
    }

    VoltageSolution sol;
    sol.topology = topology;
    sol.voltage.assign(n, source_voltages());
    sol.energized.resize(n);
    for (BusIndex b = 0; b < n; ++b) sol.energized[b] = energized[b];
    sol.energized[t.source()] = PhaseSet::all();

    std::vector<PhaseVoltages> load_current(n);
    std::vector<PhaseVoltages> branch_current(n);
    const auto order = t.breadth_first_order();
    double mismatch = 0.0;

    for (int it = 1; it <= options.max_iterations; ++it) {
        for (BusIndex b = 0; b < n; ++b)
            for (std::size_t k = 0; k < 3; ++k)
                load_current[b][k] = s_pu[b][k] == 0.0 ? 0.0 : std::conj(s_pu[b][k] / sol.voltage[b][k]);

        // Backward: each branch carries its bus's load plus everything below.
        for (BusIndex b : std::views::reverse(order)) {
            branch_current[b] = load_current[b];
            for (BusIndex c : t.children(b))
                for (std::size_t k = 0; k < 3; ++k) branch_current[b][k] += branch_current[c][k];
        }

        // Forward: drop along each line from the fixed source.
        for (BusIndex b : order) {
            if (b == t.source()) continue;
            const BusIndex up = t.parent(b);
            for (std::size_t k = 0; k < 3; ++k)
                sol.voltage[b][k] = sol.voltage[up][k] - line_z[b] * branch_current[b][k];
        }

        mismatch = 0.0;
        for (BusIndex b = 0; b < n; ++b)
            for (std::size_t k = 0; k < 3; ++k)
                mismatch = std::max(mismatch, std::abs(sol.voltage[b][k] * std::conj(load_current[b][k]) - s_pu[b][k]));
        if (std::isnan(mismatch)) break;
        if (mismatch <= options.tolerance) {
            sol.iterations = it;
            sol.max_mismatch = mismatch;
            return sol;
        }
    }
    throw ConvergenceError("power flow did not converge; final mismatch " + std::to_string(mismatch) + " p.u.",
                           mismatch, options.max_iterations);
}

VoltageSolution run_power_flow(const SyntheticSample& s, const LineImpedance& z, const PowerFlowOptions& options) {
    const ObservedNetwork obs = to_observed(s);
    return run_power_flow(s.topology, demand_per_bus(*s.topology, obs.loads), s.bus_phases, z, options);
}

std::vector<BusPhaseVoltage> voltage_table(const VoltageSolution& v, double lo, double hi) {
    std::vector<BusPhaseVoltage> out;
    for (BusIndex b : v.topology->lexicographic_order()) {
        for (Phase p : kAllPhases) {
            if (!v.energized[b].contains(p)) continue;
            const double m = v.magnitude(b, p);
            out.push_back({v.topology->bus_id(b), p, m, m >= lo && m <= hi});
        }
    }
    return out;
}

std::vector<BusPhaseVoltage> voltage_band_report(const VoltageSolution& v, double lo, double hi) {
    auto rows = voltage_table(v, lo, hi);
    std::erase_if(rows, [](const BusPhaseVoltage& r) { return r.in_band; });
    return rows;
}

}  // namespace gridsynth
