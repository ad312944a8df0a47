#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridsynth/model.hpp"
#include "gridsynth/network.hpp"

namespace gridsynth {

/// Mean absolute percentage error, (100 / n) * sum |ref - est| / |ref|.
/// Throws ValidationError on length mismatch, empty input or a zero reference.
double mape(std::span<const double> reference, std::span<const double> estimate);

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::uint64_t count = 0;
};

struct Histogram {
    std::string series;
    std::vector<HistogramBin> bins;

    std::uint64_t total() const;
};

/// Uniform bins over [lo, hi]; values outside are clamped into the end bins.
Histogram histogram(std::span<const double> values, std::size_t n_bins, double lo, double hi,
                    std::string series = {});

/// Phase statistics of a dataset (one or more networks pooled).
struct DatasetSummary {
    std::size_t n_loads = 0;
    double p3_fraction = 0.0;        // share of loads with three phases
    PhaseChoiceProbs phase_choice;   // share of single-phase loads per phase (1/3 each if none)
    PhaseTriple mean_kw;             // mean p_kw[phase] over loads energized on that phase
    std::array<std::vector<double>, 3> p_kw;    // those values, per phase
    std::array<std::vector<double>, 3> ratios;  // per-phase share of three-phase loads
};

DatasetSummary summarize(std::span<const ObservedNetwork> data);

struct ParameterRow {
    std::string name;
    double real = 0.0;
    double synthetic = 0.0;
};

/// Rows p3, pA, pB, pC.
std::vector<ParameterRow> compare_parameters(const DatasetSummary& real, const DatasetSummary& synth);

/// How the per-phase MAPE was computed.
///  - Mean: single pair (mean_real, mean_synth).
///  - Paired: per-load pairs matched by load position and bus id, over every
///    load the real data energizes on that phase.
enum class MapeMode { Mean, Paired };

std::string to_string(MapeMode m);

struct PhaseMeanRow {
    Phase phase = Phase::A;
    double mean_real_kw = 0.0;
    double mean_synth_kw = 0.0;
    double mape_percent = 0.0;  // NaN when the real mean is zero
    MapeMode mode = MapeMode::Mean;
};

struct ComparisonReport {
    std::array<PhaseMeanRow, 3> phases;
    std::vector<ParameterRow> parameters;
    std::vector<Histogram> histograms;
};

struct ReportOptions {
    MapeMode mode = MapeMode::Mean;
    std::size_t histogram_bins = 30;
};

/// Paired mode falls back to Mean for a phase when no pairs exist (load lists
/// differ or the real data has no load on that phase). The row records the
/// mode actually used.
ComparisonReport compare_datasets(std::span<const ObservedNetwork> real, std::span<const ObservedNetwork> synth,
                                  const ReportOptions& options = {});

}  // namespace gridsynth
