#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridsynth/metrics.hpp"
#include "gridsynth/model.hpp"
#include "gridsynth/powerflow.hpp"

namespace gridsynth::cli {

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr const char* kVersion = "1.0.0";

/// Everything a subcommand needs; filled from argv only.
struct RunConfig {
    std::string subcommand;

    std::vector<std::filesystem::path> inputs;  // fit
    std::filesystem::path observed;             // pipeline
    std::filesystem::path topology;
    std::filesystem::path params;
    std::filesystem::path sample;
    std::filesystem::path out;
    std::filesystem::path out_dir;
    std::filesystem::path real;
    std::filesystem::path synthetic_dir;
    std::filesystem::path histograms;
    std::filesystem::path report;

    std::uint64_t seed = kDefaultSeed;
    std::size_t n_samples = 1;
    std::size_t n_bins = 20;
    bool interpolate_empty_bins = false;
    std::optional<RatioParams> fallback_ratios;

    std::string scenario = "file";  // balanced | unbalanced | file
    bool per_load_power_factor = false;
    unsigned jobs = 0;

    LineImpedance impedance;
    PowerFlowOptions powerflow;
    double band_lo = 0.95;
    double band_hi = 1.04;

    MapeMode mape_mode = MapeMode::Mean;
    std::size_t histogram_bins = 30;
};

/// Parses argv (argv[0] is the program name) and runs the subcommand.
/// Exit codes: 0 success, 1 validation/consistency failure, 2 usage error.
/// Data goes to files and `out`; diagnostics and timings go to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

// Stages, callable directly with a resolved config.
int run_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_enforce(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_powerflow(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_report(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_pipeline(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace gridsynth::cli
