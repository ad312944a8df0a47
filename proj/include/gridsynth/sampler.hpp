#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "gridsynth/consistency.hpp"
#include "gridsynth/model.hpp"
#include "gridsynth/network.hpp"
#include "gridsynth/rng.hpp"
#include "gridsynth/topology.hpp"

namespace gridsynth {

/// Floor applied to each Dirichlet shape so degenerate means stay sampleable.
inline constexpr double kMinDirichletShape = 1e-6;

/// Substream id of the network-wide power factor draw; load j uses id j.
inline constexpr std::uint64_t kPowerFactorSubstream = ~std::uint64_t{0};

// Individual layers of the generative model. Each consumes draws from the
// supplied stream only.

/// Bernoulli(conditional_p3 at d's bin).
bool sample_phase_count(double d, const DistanceBinCurve& curve, RngStream& rng);
/// Categorical over {A, B, C} by inverse CDF on one uniform.
Phase sample_phase_choice(const PhaseChoiceProbs& p, RngStream& rng);
/// Dirichlet(concentration * mean), shapes floored at kMinDirichletShape.
PhaseTriple sample_phase_ratios(const RatioParams& r, RngStream& rng);
/// Normal(mu, sigma) truncated to (0, inf).
double sample_total_demand(const DemandSlot& m, RngStream& rng);
double sample_power_factor(const PowerFactorTable& table, RngStream& rng);

/// tan(arccos(pf)), the Q/P ratio at power factor pf.
double reactive_ratio(double pf);

struct PhaseDraw {
    bool is_three_phase = false;
    std::optional<Phase> single_phase;  // iff !is_three_phase
    std::optional<PhaseTriple> ratios;  // iff is_three_phase
    double total_kw = 0.0;
};

/// All layers for one load at normalized distance d.
PhaseDraw draw_load(double d, const ModelParameters& params, RngStream& rng);

/// Active power split of a draw plus Q = P * tan(arccos(pf)) per phase.
LoadDemand allocate_demand(const PhaseDraw& draw, double pf);

struct SamplerOptions {
    /// Draw a power factor per load instead of one per network.
    bool per_load_power_factor = false;
    /// Worker threads for generate(); 0 means hardware concurrency.
    unsigned jobs = 0;
};

struct SampledLoad {
    std::string bus;
    PhaseSet phases;
    LoadDemand demand;
    double power_factor = 1.0;

    bool operator==(const SampledLoad&) const = default;
};

/// One generated network instance. `bus_phases` is the phase assignment
/// after consistency repair; load demands are never modified by the repair.
struct SyntheticSample {
    std::shared_ptr<const NetworkTopology> topology;
    std::vector<SampledLoad> loads;
    PhaseAssignment bus_phases;
    /// Network-wide power factor (absent in per-load mode).
    std::optional<double> power_factor;
    std::uint64_t seed = 0;
    std::uint64_t sample_index = 0;

    bool operator==(const SyntheticSample& o) const {
        return loads == o.loads && bus_phases == o.bus_phases && power_factor == o.power_factor &&
               seed == o.seed && sample_index == o.sample_index &&
               (topology == o.topology || (topology && o.topology && *topology == *o.topology));
    }
};

/// Draws every load of the topology for sample `sample_index`. Load j reads
/// substream (seed, sample_index, j); the network power factor reads
/// (seed, sample_index, kPowerFactorSubstream). The returned bus_phases are
/// the raw union of load phases (not yet repaired).
SyntheticSample allocate_loads(std::shared_ptr<const NetworkTopology> t, const ModelParameters& params,
                               std::uint64_t seed, std::uint64_t sample_index,
                               const SamplerOptions& options = {});

/// allocate_loads followed by consistency repair, for sample indices
/// 0 .. n_samples - 1. Output is independent of options.jobs.
std::vector<SyntheticSample> generate(std::shared_ptr<const NetworkTopology> t, const ModelParameters& params,
                                      std::size_t n_samples, std::uint64_t seed,
                                      const SamplerOptions& options = {});

/// Same, for an arbitrary index range [first, first + count).
std::vector<SyntheticSample> generate_range(std::shared_ptr<const NetworkTopology> t,
                                            const ModelParameters& params, std::uint64_t first,
                                            std::size_t count, std::uint64_t seed,
                                            const SamplerOptions& options = {});

/// View of a sample as observed data, ready to be refitted.
ObservedNetwork to_observed(const SyntheticSample& s);

/// Scenario presets for the ratio means.
PhaseTriple balanced_ratio_means();
PhaseTriple unbalanced_ratio_means();

}  // namespace gridsynth
