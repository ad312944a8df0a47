#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gridsynth/phase.hpp"

namespace gridsynth {

struct BinCount {
    std::uint64_t three_phase = 0;
    std::uint64_t total = 0;

    bool operator==(const BinCount&) const = default;
};

/// Three-phase probability as a function of normalized feeder distance.
///
/// `joint_mass[k]` is the three-phase count in bin k divided by the total
/// number of loads (sums to the overall three-phase fraction).
/// `conditional_p3[k]` is the smoothed per-bin probability that a load in
/// bin k is three-phase; this is what the sampler uses.
struct DistanceBinCurve {
    std::vector<double> bin_edges;  // K + 1 increasing values, 0 ... 1
    std::vector<double> conditional_p3;
    std::vector<double> joint_mass;
    std::vector<BinCount> counts;

    std::size_t bin_count() const noexcept { return conditional_p3.size(); }
    /// Bin containing d; d = 1 falls in the last bin.
    std::size_t bin_of(double d) const;
    double p3_at(double d) const { return conditional_p3[bin_of(d)]; }

    /// K uniform bins with a constant conditional probability and no counts.
    static DistanceBinCurve constant(std::size_t n_bins, double p3);

    bool operator==(const DistanceBinCurve&) const = default;
};

std::vector<double> uniform_bin_edges(std::size_t n_bins);

/// Probability that a single-phase load sits on each phase.
struct PhaseChoiceProbs {
    PhaseTriple p{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};

    bool operator==(const PhaseChoiceProbs&) const = default;
};

struct DemandSlot {
    double mu = 0.0;     // kW
    double sigma = 0.0;  // kW

    bool operator==(const DemandSlot&) const = default;
};

/// Truncated-normal demand parameters: one slot for three-phase load totals,
/// one per phase for single-phase loads.
struct DemandMoments {
    DemandSlot three_phase;
    std::array<DemandSlot, 3> per_phase;

    const DemandSlot& phase(Phase p) const noexcept { return per_phase[index(p)]; }
    DemandSlot& phase(Phase p) noexcept { return per_phase[index(p)]; }

    static DemandMoments uniform(DemandSlot slot) { return {slot, {slot, slot, slot}}; }

    bool operator==(const DemandMoments&) const = default;
};

/// Dirichlet over the per-phase share of a three-phase load, parameterised
/// as mean (on the simplex) times concentration.
struct RatioParams {
    PhaseTriple mean{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    double concentration = 100.0;

    bool operator==(const RatioParams&) const = default;
};

inline constexpr double kDefaultConcentration = 100.0;
inline constexpr double kMinConcentration = 1.0;
inline constexpr double kMaxConcentration = 10000.0;

struct PowerFactorEntry {
    double threshold = 1.0;
    double pf = 1.0;

    bool operator==(const PowerFactorEntry&) const = default;
};

/// Step function from a uniform draw u to a power factor: the first entry
/// with u <= threshold wins.
struct PowerFactorTable {
    std::vector<PowerFactorEntry> entries;

    /// 0.85 up to 0.1649, 0.90 up to 0.27, 0.95 otherwise.
    static PowerFactorTable standard();
    double lookup(double u) const;

    bool operator==(const PowerFactorTable&) const = default;
};

struct ModelParameters {
    DistanceBinCurve curve;
    PhaseChoiceProbs phase_choice;
    DemandMoments demand;
    RatioParams ratios;
    PowerFactorTable pf_table = PowerFactorTable::standard();

    bool operator==(const ModelParameters&) const = default;
};

// Each throws ValidationError describing the first broken invariant.
void validate(const DistanceBinCurve& c);
void validate(const PhaseChoiceProbs& p);
void validate(const DemandMoments& d);
void validate(const RatioParams& r);
void validate(const PowerFactorTable& t);
void validate(const ModelParameters& m);

}  // namespace gridsynth
