#include "gridsynth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "compensated.hpp"
#include "gridsynth/error.hpp"

namespace gridsynth {

double mape(std::span<const double> reference, std::span<const double> estimate) {
    if (reference.size() != estimate.size()) throw ValidationError("mape: length mismatch");
    if (reference.empty()) throw ValidationError("mape: empty input");
    detail::CompensatedSum s;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        if (reference[i] == 0.0) throw ValidationError("mape: zero reference entry at index " + std::to_string(i));
        s.add(std::abs(reference[i] - estimate[i]) / std::abs(reference[i]));
    }
    return 100.0 * s.value() / static_cast<double>(reference.size());
}

std::uint64_t Histogram::total() const {
    std::uint64_t n = 0;
    for (const auto& b : bins) n += b.count;
    return n;
}

Histogram histogram(std::span<const double> values, std::size_t n_bins, double lo, double hi, std::string series) {
    if (n_bins == 0) throw ValidationError("histogram: n_bins must be >= 1");
    if (!(lo < hi)) throw ValidationError("histogram: lo must be < hi");
    Histogram h;
    h.series = std::move(series);
    h.bins.resize(n_bins);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) {
        h.bins[k].lower = lo + width * static_cast<double>(k);
        h.bins[k].upper = k + 1 == n_bins ? hi : lo + width * static_cast<double>(k + 1);
    }
    for (double v : values) {
        if (std::isnan(v)) throw ValidationError("histogram: NaN value");
        const double pos = (v - lo) / width;
        std::size_t k = 0;
        if (pos >= static_cast<double>(n_bins))
            k = n_bins - 1;
        else if (pos > 0.0)
            k = static_cast<std::size_t>(pos);
        ++h.bins[k].count;
    }
    return h;
}

DatasetSummary summarize(std::span<const ObservedNetwork> data) {
    DatasetSummary s;
    std::size_t n_three = 0;
    std::array<std::size_t, 3> single{};
    for (const auto& o : data) {
        for (const auto& l : o.loads) {
            ++s.n_loads;
            if (l.is_three_phase()) {
                ++n_three;
                const double total = l.demand.p_kw.sum();
                if (total > 0.0)
                    for (Phase p : kAllPhases) s.ratios[index(p)].push_back(l.demand.p_kw[p] / total);
            } else if (l.is_single_phase()) {
                ++single[index(single_phase_of(l))];
            }
            for (Phase p : kAllPhases)
                if (l.phases.contains(p)) s.p_kw[index(p)].push_back(l.demand.p_kw[p]);
        }
    }
    if (s.n_loads > 0) s.p3_fraction = static_cast<double>(n_three) / static_cast<double>(s.n_loads);
    const std::size_t n_single = single[0] + single[1] + single[2];
    if (n_single > 0)
        for (std::size_t k = 0; k < 3; ++k)
            s.phase_choice.p.v[k] = static_cast<double>(single[k]) / static_cast<double>(n_single);
    for (std::size_t k = 0; k < 3; ++k) s.mean_kw.v[k] = detail::moments(s.p_kw[k]).mean;
    return s;
}

std::vector<ParameterRow> compare_parameters(const DatasetSummary& real, const DatasetSummary& synth) {
    return {
        {"p3", real.p3_fraction, synth.p3_fraction},
        {"pA", real.phase_choice.p[Phase::A], synth.phase_choice.p[Phase::A]},
        {"pB", real.phase_choice.p[Phase::B], synth.phase_choice.p[Phase::B]},
        {"pC", real.phase_choice.p[Phase::C], synth.phase_choice.p[Phase::C]},
    };
}

std::string to_string(MapeMode m) { return m == MapeMode::Mean ? "mean" : "paired"; }

namespace {

bool same_load_list(const ObservedNetwork& a, const ObservedNetwork& b) {
    if (a.loads.size() != b.loads.size()) return false;
    for (std::size_t i = 0; i < a.loads.size(); ++i)
        if (a.loads[i].bus != b.loads[i].bus) return false;
    return true;
}

// Per-load pairs on phase p between the first real network and every
// synthetic network sharing its load list.
bool paired_values(std::span<const ObservedNetwork> real, std::span<const ObservedNetwork> synth, Phase p,
                   std::vector<double>& ref, std::vector<double>& est) {
    if (real.size() != 1 || synth.empty()) return false;
    const ObservedNetwork& r = real.front();
    for (const auto& s : synth) {
        if (!same_load_list(r, s)) return false;
        for (std::size_t i = 0; i < r.loads.size(); ++i) {
            if (!r.loads[i].phases.contains(p) || r.loads[i].demand.p_kw[p] == 0.0) continue;
            ref.push_back(r.loads[i].demand.p_kw[p]);
            est.push_back(s.loads[i].demand.p_kw[p]);
        }
    }
    return !ref.empty();
}

}  // namespace

ComparisonReport compare_datasets(std::span<const ObservedNetwork> real, std::span<const ObservedNetwork> synth,
                                  const ReportOptions& options) {
    const DatasetSummary rs = summarize(real);
    const DatasetSummary ss = summarize(synth);

    ComparisonReport report;
    for (Phase p : kAllPhases) {
        PhaseMeanRow& row = report.phases[index(p)];
        row.phase = p;
        row.mean_real_kw = rs.mean_kw[p];
        row.mean_synth_kw = ss.mean_kw[p];

        std::vector<double> ref;
        std::vector<double> est;
        if (options.mode == MapeMode::Paired && paired_values(real, synth, p, ref, est)) {
            row.mode = MapeMode::Paired;
            row.mape_percent = mape(ref, est);
        } else {
            row.mode = MapeMode::Mean;
            row.mape_percent = row.mean_real_kw == 0.0
                                   ? std::numeric_limits<double>::quiet_NaN()
                                   : mape(std::span(&row.mean_real_kw, 1), std::span(&row.mean_synth_kw, 1));
        }
    }
    report.parameters = compare_parameters(rs, ss);

    double p_max = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        for (double v : rs.p_kw[k]) p_max = std::max(p_max, v);
        for (double v : ss.p_kw[k]) p_max = std::max(p_max, v);
    }
    if (!(p_max > 0.0)) p_max = 1.0;
    for (Phase p : kAllPhases) {
        const std::string ph(1, to_char(p));
        const auto k = index(p);
        report.histograms.push_back(histogram(rs.p_kw[k], options.histogram_bins, 0.0, p_max, "p_kw_real_" + ph));
        report.histograms.push_back(histogram(ss.p_kw[k], options.histogram_bins, 0.0, p_max, "p_kw_synth_" + ph));
    }
    for (Phase p : kAllPhases) {
        const std::string ph(1, to_char(p));
        const auto k = index(p);
        report.histograms.push_back(histogram(rs.ratios[k], options.histogram_bins, 0.0, 1.0, "ratio_real_" + ph));
        report.histograms.push_back(histogram(ss.ratios[k], options.histogram_bins, 0.0, 1.0, "ratio_synth_" + ph));
    }
    return report;
}

}  // namespace gridsynth
