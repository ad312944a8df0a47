#pragma once

#include <cstddef>
#include <span>

#include "gridsynth/model.hpp"
#include "gridsynth/network.hpp"

namespace gridsynth {

inline constexpr std::size_t kDefaultBins = 20;

struct CurveOptions {
    /// Fill empty bins by linear interpolation between the nearest populated
    /// bins instead of the prior value 1/2.
    bool interpolate_empty_bins = false;
};

// Every estimator accepts several observed networks and pools their loads,
// which is also how a set of generated samples is refitted.
//
// Loads with three phases count as three-phase, loads with one phase as
// single-phase. Two-phase loads only enter the bin totals of the curve.

/// Per-bin three-phase counts over uniform bins of normalized distance.
/// conditional_p3 = (n3 + 1) / (n + 2); joint_mass = n3 / total loads.
DistanceBinCurve estimate_p3_curve(std::span<const ObservedNetwork> obs, std::size_t n_bins,
                                   const CurveOptions& options = {});
DistanceBinCurve estimate_p3_curve(const ObservedNetwork& obs, std::size_t n_bins, const CurveOptions& options = {});

/// Posterior mean under a uniform prior: (count + 1) / (n_single + 3).
PhaseChoiceProbs estimate_phase_choice(std::span<const ObservedNetwork> obs);
PhaseChoiceProbs estimate_phase_choice(const ObservedNetwork& obs);

/// Sample mean and (n - 1) standard deviation of three-phase totals and of
/// single-phase demand per phase. A slot without loads falls back to the
/// totals of all loads.
DemandMoments estimate_demand_moments(std::span<const ObservedNetwork> obs);
DemandMoments estimate_demand_moments(const ObservedNetwork& obs);

/// Mean per-phase share of three-phase loads, plus a method-of-moments
/// concentration from the variance of the phase-A share.
RatioParams estimate_ratio_params(std::span<const ObservedNetwork> obs);
RatioParams estimate_ratio_params(const ObservedNetwork& obs);

/// All of the above plus the standard power-factor table. When the data has
/// no three-phase load, `fallback_ratios` is used if given, otherwise the
/// estimation error propagates.
ModelParameters fit(std::span<const ObservedNetwork> obs, std::size_t n_bins = kDefaultBins,
                    const CurveOptions& options = {}, const RatioParams* fallback_ratios = nullptr);
ModelParameters fit(const ObservedNetwork& obs, std::size_t n_bins = kDefaultBins, const CurveOptions& options = {},
                    const RatioParams* fallback_ratios = nullptr);

/// Concentration from mean share m and share variance v, clamped to
/// [kMinConcentration, kMaxConcentration]; kDefaultConcentration when the
/// moments are degenerate (m in {0, 1}).
double concentration_from_moments(double mean, double variance);

}  // namespace gridsynth
