#include "gridsynth/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridsynth/error.hpp"

namespace gridsynth {

namespace {

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

void check_simplex(const PhaseTriple& t, const char* what) {
    for (double v : t.v)
        if (!is_probability(v)) throw ValidationError(std::string(what) + ": entries must lie in [0, 1]");
    if (std::abs(t.sum() - 1.0) > 1e-9) throw ValidationError(std::string(what) + ": entries must sum to 1");
}

}  // namespace

std::vector<double> uniform_bin_edges(std::size_t n_bins) {
    std::vector<double> edges(n_bins + 1);
    for (std::size_t k = 0; k <= n_bins; ++k) edges[k] = static_cast<double>(k) / static_cast<double>(n_bins);
    return edges;
}

std::size_t DistanceBinCurve::bin_of(double d) const {
    const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), d);
    if (it == bin_edges.begin()) return 0;
    return std::min<std::size_t>(static_cast<std::size_t>(it - bin_edges.begin()) - 1, bin_count() - 1);
}

DistanceBinCurve DistanceBinCurve::constant(std::size_t n_bins, double p3) {
    DistanceBinCurve c;
    c.bin_edges = uniform_bin_edges(n_bins);
    c.conditional_p3.assign(n_bins, p3);
    c.joint_mass.assign(n_bins, 0.0);
    c.counts.assign(n_bins, {});
    return c;
}

PowerFactorTable PowerFactorTable::standard() { return {{{0.1649, 0.85}, {0.27, 0.90}, {1.0, 0.95}}}; }

double PowerFactorTable::lookup(double u) const {
    for (const auto& e : entries)
        if (u <= e.threshold) return e.pf;
    return entries.back().pf;
}

void validate(const DistanceBinCurve& c) {
    const std::size_t k = c.conditional_p3.size();
    if (k == 0) throw ValidationError("curve: at least one bin required");
    if (c.bin_edges.size() != k + 1) throw ValidationError("curve: bin_edges must have one more entry than bins");
    if (c.joint_mass.size() != k || c.counts.size() != k)
        throw ValidationError("curve: joint_mass and counts must have one entry per bin");
    if (c.bin_edges.front() != 0.0 || c.bin_edges.back() != 1.0)
        throw ValidationError("curve: bin_edges must span [0, 1]");
    for (std::size_t i = 1; i <= k; ++i)
        if (!(c.bin_edges[i] > c.bin_edges[i - 1])) throw ValidationError("curve: bin_edges must increase");
    for (double p : c.conditional_p3)
        if (!is_probability(p)) throw ValidationError("curve: conditional_p3 outside [0, 1]");
    for (double m : c.joint_mass)
        if (!std::isfinite(m) || m < 0.0) throw ValidationError("curve: joint_mass must be >= 0");
    for (const auto& n : c.counts)
        if (n.three_phase > n.total) throw ValidationError("curve: three-phase count exceeds bin total");
}

void validate(const PhaseChoiceProbs& p) { check_simplex(p.p, "phase_choice"); }

void validate(const DemandMoments& d) {
    auto check = [](const DemandSlot& s, const std::string& name) {
        if (!std::isfinite(s.mu) || !(s.mu > 0.0)) throw ValidationError("demand " + name + ": mu must be > 0");
        if (!std::isfinite(s.sigma) || s.sigma < 0.0)
            throw ValidationError("demand " + name + ": sigma must be >= 0");
    };
    check(d.three_phase, "three_phase");
    for (Phase p : kAllPhases) check(d.phase(p), std::string(1, to_char(p)));
}

void validate(const RatioParams& r) {
    check_simplex(r.mean, "ratios.mean");
    if (!std::isfinite(r.concentration) || !(r.concentration > 0.0))
        throw ValidationError("ratios.concentration must be > 0");
}

void validate(const PowerFactorTable& t) {
    if (t.entries.empty()) throw ValidationError("pf_table: at least one entry required");
    double prev = 0.0;
    for (const auto& e : t.entries) {
        if (!(e.threshold > prev) || e.threshold > 1.0)
            throw ValidationError("pf_table: thresholds must increase strictly within (0, 1]");
        if (!(e.pf > 0.0) || e.pf > 1.0) throw ValidationError("pf_table: pf values must lie in (0, 1]");
        prev = e.threshold;
    }
    if (t.entries.back().threshold != 1.0) throw ValidationError("pf_table: last threshold must be 1.0");
}

void validate(const ModelParameters& m) {
    validate(m.curve);
    validate(m.phase_choice);
    validate(m.demand);
    validate(m.ratios);
    validate(m.pf_table);
}

}  // namespace gridsynth
