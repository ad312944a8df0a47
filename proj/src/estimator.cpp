#include "gridsynth/estimator.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

#include "compensated.hpp"
#include "gridsynth/error.hpp"

namespace gridsynth {

namespace {

std::size_t total_loads(std::span<const ObservedNetwork> obs) {
    std::size_t n = 0;
    for (const auto& o : obs) n += o.loads.size();
    return n;
}

void fill_empty_bins(DistanceBinCurve& c) {
    const std::size_t k = c.bin_count();
    std::vector<std::size_t> populated;
    for (std::size_t i = 0; i < k; ++i)
        if (c.counts[i].total > 0) populated.push_back(i);
    if (populated.empty()) return;

    for (std::size_t i = 0; i < k; ++i) {
        if (c.counts[i].total > 0) continue;
        const auto right = std::upper_bound(populated.begin(), populated.end(), i);
        if (right == populated.begin()) {
            c.conditional_p3[i] = c.conditional_p3[*right];
        } else if (right == populated.end()) {
            c.conditional_p3[i] = c.conditional_p3[populated.back()];
        } else {
            const std::size_t lo = *(right - 1);
            const std::size_t hi = *right;
            const double w = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
            c.conditional_p3[i] = (1.0 - w) * c.conditional_p3[lo] + w * c.conditional_p3[hi];
        }
    }
}

}  // namespace

DistanceBinCurve estimate_p3_curve(std::span<const ObservedNetwork> obs, std::size_t n_bins,
                                   const CurveOptions& options) {
    if (n_bins == 0) throw EstimationError("n_bins must be >= 1");
    const std::size_t n_loads = total_loads(obs);
    if (n_loads == 0) throw EstimationError("no observed loads");

    DistanceBinCurve c = DistanceBinCurve::constant(n_bins, 0.5);
    for (const auto& o : obs) {
        for (const auto& l : o.loads) {
            const double d = normalized_distance(*o.topology, l.bus);
            BinCount& bin = c.counts[c.bin_of(d)];
            ++bin.total;
            if (l.is_three_phase()) ++bin.three_phase;
        }
    }
    for (std::size_t k = 0; k < n_bins; ++k) {
        const auto& n = c.counts[k];
        c.joint_mass[k] = static_cast<double>(n.three_phase) / static_cast<double>(n_loads);
        c.conditional_p3[k] = (static_cast<double>(n.three_phase) + 1.0) / (static_cast<double>(n.total) + 2.0);
    }
    if (options.interpolate_empty_bins) fill_empty_bins(c);
    return c;
}

PhaseChoiceProbs estimate_phase_choice(std::span<const ObservedNetwork> obs) {
    std::array<std::uint64_t, 3> counts{};
    for (const auto& o : obs)
        for (const auto& l : o.loads)
            if (l.is_single_phase()) ++counts[index(single_phase_of(l))];

    const double denom = static_cast<double>(counts[0] + counts[1] + counts[2]) + 3.0;
    PhaseChoiceProbs out;
    out.p[Phase::A] = (static_cast<double>(counts[0]) + 1.0) / denom;
    out.p[Phase::B] = (static_cast<double>(counts[1]) + 1.0) / denom;
    out.p[Phase::C] = (static_cast<double>(counts[2]) + 1.0) / denom;
    return out;
}

DemandMoments estimate_demand_moments(std::span<const ObservedNetwork> obs) {
    std::vector<double> all_totals;
    std::vector<double> three_phase;
    std::array<std::vector<double>, 3> per_phase;
    for (const auto& o : obs) {
        for (const auto& l : o.loads) {
            const double total = l.demand.p_kw.sum();
            all_totals.push_back(total);
            if (l.is_three_phase())
                three_phase.push_back(total);
            else if (l.is_single_phase())
                per_phase[index(single_phase_of(l))].push_back(l.demand.p_kw[single_phase_of(l)]);
        }
    }
    if (all_totals.empty()) throw EstimationError("no observed loads");

    const auto fallback = detail::moments(all_totals);
    auto slot = [&](const std::vector<double>& xs, const char* name) {
        const auto m = xs.empty() ? fallback : detail::moments(xs);
        if (!(m.mean > 0.0)) throw EstimationError(std::string("mean demand of ") + name + " loads is not positive");
        return DemandSlot{m.mean, m.stddev};
    };

    DemandMoments out;
    out.three_phase = slot(three_phase, "three-phase");
    out.per_phase[0] = slot(per_phase[0], "phase-A");
    out.per_phase[1] = slot(per_phase[1], "phase-B");
    out.per_phase[2] = slot(per_phase[2], "phase-C");
    return out;
}

double concentration_from_moments(double mean, double variance) {
    if (!(mean > 0.0 && mean < 1.0)) return kDefaultConcentration;
    if (!(variance > 0.0)) return kMaxConcentration;
    return std::clamp(mean * (1.0 - mean) / variance - 1.0, kMinConcentration, kMaxConcentration);
}

RatioParams estimate_ratio_params(std::span<const ObservedNetwork> obs) {
    std::array<std::vector<double>, 3> shares;
    for (const auto& o : obs) {
        for (const auto& l : o.loads) {
            if (!l.is_three_phase()) continue;
            const double total = l.demand.p_kw.sum();
            if (!(total > 0.0)) continue;
            for (Phase p : kAllPhases) shares[index(p)].push_back(l.demand.p_kw[p] / total);
        }
    }
    if (shares[0].empty())
        throw EstimationError(
            "no three-phase loads with positive demand; supply ratio parameters (mean, concentration) manually");

    std::array<detail::Moments, 3> m{detail::moments(shares[0]), detail::moments(shares[1]),
                                     detail::moments(shares[2])};
    const double norm = m[0].mean + m[1].mean + m[2].mean;

    RatioParams out;
    out.mean.v = {m[0].mean / norm, m[1].mean / norm, m[2].mean / norm};
    out.concentration = concentration_from_moments(out.mean.v[0], m[0].variance);
    return out;
}

ModelParameters fit(std::span<const ObservedNetwork> obs, std::size_t n_bins, const CurveOptions& options,
                    const RatioParams* fallback_ratios) {
    for (const auto& o : obs) validate(o);
    if (obs.empty()) throw EstimationError("no observed networks");

    ModelParameters p;
    p.curve = estimate_p3_curve(obs, n_bins, options);
    p.phase_choice = estimate_phase_choice(obs);
    p.demand = estimate_demand_moments(obs);
    try {
        p.ratios = estimate_ratio_params(obs);
    } catch (const EstimationError&) {
        if (!fallback_ratios) throw;
        p.ratios = *fallback_ratios;
    }
    p.pf_table = PowerFactorTable::standard();
    validate(p);
    return p;
}

DistanceBinCurve estimate_p3_curve(const ObservedNetwork& obs, std::size_t n_bins, const CurveOptions& options) {
    return estimate_p3_curve(std::span(&obs, 1), n_bins, options);
}
PhaseChoiceProbs estimate_phase_choice(const ObservedNetwork& obs) { return estimate_phase_choice(std::span(&obs, 1)); }
DemandMoments estimate_demand_moments(const ObservedNetwork& obs) {
    return estimate_demand_moments(std::span(&obs, 1));
}
RatioParams estimate_ratio_params(const ObservedNetwork& obs) { return estimate_ratio_params(std::span(&obs, 1)); }
ModelParameters fit(const ObservedNetwork& obs, std::size_t n_bins, const CurveOptions& options,
                    const RatioParams* fallback_ratios) {
    return fit(std::span(&obs, 1), n_bins, options, fallback_ratios);
}

}  // namespace gridsynth
