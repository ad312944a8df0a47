#include "gridsynth/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridsynth/consistency.hpp"
#include "gridsynth/error.hpp"
#include "gridsynth/estimator.hpp"
#include "gridsynth/io.hpp"
#include "gridsynth/sampler.hpp"

namespace gridsynth::cli {

namespace fs = std::filesystem;

namespace {

class StageTimer {
public:
    StageTimer(std::ostream& err, std::string stage)
        : err_(err), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", dt.count());
        err_ << "[" << stage_ << "] " << buf << " s\n";
    }
    StageTimer(const StageTimer&) = delete;
    StageTimer& operator=(const StageTimer&) = delete;

private:
    std::ostream& err_;
    std::string stage_;
    std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string sample_file_name(std::uint64_t i) { return "sample_" + std::to_string(i) + ".json"; }

std::optional<std::uint64_t> sample_index_of(const fs::path& p) {
    const std::string name = p.filename().string();
    if (!name.starts_with("sample_") || p.extension() != ".json") return std::nullopt;
    const std::string digits = p.stem().string().substr(7);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
    return v;
}

std::vector<fs::path> list_samples(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir.string());
    std::vector<std::pair<std::uint64_t, fs::path>> found;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file())
            if (auto i = sample_index_of(e.path())) found.emplace_back(*i, e.path());
    std::sort(found.begin(), found.end());
    std::vector<fs::path> out;
    for (auto& [i, p] : found) out.push_back(std::move(p));
    return out;
}

PhaseAssignment document_assignment(const NetworkDocument& doc) {
    if (doc.bus_phases) return *doc.bus_phases;
    if (!doc.observed_loads) throw ValidationError("document has neither bus_phases nor observed_loads");
    return assignment_from_loads(*doc.topology, *doc.observed_loads);
}

struct VoltageSummary {
    double min_v = 0.0;
    double max_v = 0.0;
    std::size_t out_of_band = 0;
    int iterations = 0;
};

VoltageSolution solve_document(const RunConfig& cfg, const NetworkDocument& doc) {
    if (!doc.observed_loads) throw ValidationError("document has no observed_loads to solve for");
    const PhaseAssignment energized =
        doc.bus_phases ? *doc.bus_phases : enforce_consistency(*doc.topology, document_assignment(doc));
    return run_power_flow(doc.topology, demand_per_bus(*doc.topology, *doc.observed_loads), energized,
                          cfg.impedance, cfg.powerflow);
}

VoltageSummary summarize_voltages(const VoltageSolution& v, double lo, double hi) {
    VoltageSummary s;
    s.iterations = v.iterations;
    const auto rows = voltage_table(v, lo, hi);
    s.min_v = rows.empty() ? 1.0 : rows.front().magnitude;
    s.max_v = s.min_v;
    for (const auto& r : rows) {
        s.min_v = std::min(s.min_v, r.magnitude);
        s.max_v = std::max(s.max_v, r.magnitude);
        if (!r.in_band) ++s.out_of_band;
    }
    return s;
}

std::string report_csv(const ComparisonReport& r) {
    std::string csv = "phase,mean_kw_real,mean_kw_synth,mape_percent\n";
    for (const auto& row : r.phases) {
        csv += std::string(1, to_char(row.phase)) + "," + fmt("%.9g", row.mean_real_kw) + "," +
               fmt("%.9g", row.mean_synth_kw) + "," + fmt("%.6f", row.mape_percent) + "\n";
    }
    return csv;
}

std::string parameters_csv(const ComparisonReport& r) {
    std::string csv = "name,real,synthetic\n";
    for (const auto& row : r.parameters)
        csv += row.name + "," + fmt("%.6f", row.real) + "," + fmt("%.6f", row.synthetic) + "\n";
    return csv;
}

std::string report_json(const ComparisonReport& r) {
    using nlohmann::ordered_json;
    ordered_json phases = ordered_json::array();
    for (const auto& row : r.phases) {
        ordered_json e{{"phase", std::string(1, to_char(row.phase))},
                       {"mean_kw_real", row.mean_real_kw},
                       {"mean_kw_synth", row.mean_synth_kw}};
        e["mape_percent"] = std::isnan(row.mape_percent) ? ordered_json(nullptr) : ordered_json(row.mape_percent);
        e["mape_mode"] = to_string(row.mode);
        phases.push_back(std::move(e));
    }
    ordered_json params = ordered_json::array();
    for (const auto& row : r.parameters)
        params.push_back({{"name", row.name}, {"real", row.real}, {"synthetic", row.synthetic}});
    ordered_json hists = ordered_json::array();
    for (const auto& h : r.histograms) {
        ordered_json bins = ordered_json::array();
        for (const auto& b : h.bins) bins.push_back({b.lower, b.upper, b.count});
        hists.push_back({{"series", h.series}, {"bins", std::move(bins)}});
    }
    ordered_json j{{"phases", std::move(phases)}, {"parameters", std::move(params)}, {"histograms", std::move(hists)}};
    return j.dump(2) + "\n";
}

std::string histogram_dat(const Histogram& h) {
    std::string s = "# series " + h.series + "\n# bin_lower bin_upper count\n";
    for (const auto& b : h.bins)
        s += fmt("%.9g", b.lower) + " " + fmt("%.9g", b.upper) + " " + std::to_string(b.count) + "\n";
    return s;
}

fs::path with_suffix(const fs::path& p, const std::string& suffix, const std::string& ext) {
    fs::path out = p.parent_path() / (p.stem().string() + suffix + ext);
    return out;
}

void resolve(fs::path& p) {
    if (!p.empty()) p = fs::absolute(p).lexically_normal();
}

bool parse_band(const std::string& text, double& lo, double& hi) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return false;
    try {
        std::size_t used = 0;
        lo = std::stod(text.substr(0, colon), &used);
        if (used != colon) return false;
        const std::string rest = text.substr(colon + 1);
        hi = std::stod(rest, &used);
        if (used != rest.size()) return false;
    } catch (const std::exception&) {
        return false;
    }
    return lo < hi;
}

}  // namespace

int run_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    StageTimer timer(err, "fit");
    std::vector<ObservedNetwork> obs;
    for (const auto& p : cfg.inputs) obs.push_back(read_network_document(p).observed());
    const ModelParameters params = fit(obs, cfg.n_bins, CurveOptions{cfg.interpolate_empty_bins},
                                       cfg.fallback_ratios ? &*cfg.fallback_ratios : nullptr);
    const std::string text = dump_parameters(params);
    if (cfg.out.empty())
        out << text;
    else
        write_file_atomic(cfg.out, text);
    return 0;
}

int run_generate(const RunConfig& cfg, std::ostream&, std::ostream& err) {
    ModelParameters params = read_parameters(cfg.params);
    if (cfg.scenario == "balanced")
        params.ratios.mean = balanced_ratio_means();
    else if (cfg.scenario == "unbalanced")
        params.ratios.mean = unbalanced_ratio_means();

    const auto topology = read_network_document(cfg.topology).topology;
    std::vector<SyntheticSample> samples;
    {
        StageTimer timer(err, "generate");
        samples = generate(topology, params, cfg.n_samples, cfg.seed,
                           SamplerOptions{cfg.per_load_power_factor, cfg.jobs});
    }
    StageTimer timer(err, "write-samples");
    fs::create_directories(cfg.out_dir);
    for (const auto& s : samples)
        write_file_atomic(cfg.out_dir / sample_file_name(s.sample_index), dump_network_document(sample_document(s)));
    return 0;
}

int run_check(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const NetworkDocument doc = read_network_document(cfg.sample);
    const auto violations = check_consistency(*doc.topology, document_assignment(doc));
    for (const auto& v : violations)
        out << v.downstream << " (" << v.downstream_phases.to_string() << ") not within " << v.upstream << " ("
            << v.upstream_phases.to_string() << ")\n";
    out << "violations: " << violations.size() << "\n";
    return violations.empty() ? 0 : 1;
}

int run_enforce(const RunConfig& cfg, std::ostream&, std::ostream&) {
    NetworkDocument doc = read_network_document(cfg.sample);
    doc.bus_phases = enforce_consistency(*doc.topology, document_assignment(doc));
    write_file_atomic(cfg.out, dump_network_document(doc));
    return 0;
}

int run_powerflow(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    StageTimer timer(err, "powerflow");
    const NetworkDocument doc = read_network_document(cfg.sample);
    const VoltageSolution v = solve_document(cfg, doc);
    std::string csv = "bus,phase,v_pu,in_band\n";
    for (const auto& r : voltage_table(v, cfg.band_lo, cfg.band_hi))
        csv += r.bus + "," + std::string(1, to_char(r.phase)) + "," + fmt("%.10f", r.magnitude) + "," +
               (r.in_band ? "true" : "false") + "\n";
    if (!cfg.report.empty()) write_file_atomic(cfg.report, csv);
    const auto s = summarize_voltages(v, cfg.band_lo, cfg.band_hi);
    out << "iterations: " << v.iterations << "\nmax_mismatch: " << fmt("%.3e", v.max_mismatch)
        << "\nmin_v_pu: " << fmt("%.6f", s.min_v) << "\nmax_v_pu: " << fmt("%.6f", s.max_v)
        << "\nout_of_band: " << s.out_of_band << "\n";
    return 0;
}

int run_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    StageTimer timer(err, "report");
    const std::vector<ObservedNetwork> real{read_network_document(cfg.real).observed()};
    std::vector<ObservedNetwork> synth;
    for (const auto& p : list_samples(cfg.synthetic_dir)) {
        ObservedNetwork o = read_network_document(p).observed();
        o.topology.reset();  // summaries only need the loads
        synth.push_back(std::move(o));
    }
    if (synth.empty()) throw ValidationError("no sample_<i>.json files in " + cfg.synthetic_dir.string());

    const ComparisonReport r = compare_datasets(real, synth, ReportOptions{cfg.mape_mode, cfg.histogram_bins});
    write_file_atomic(cfg.out, report_csv(r));
    write_file_atomic(with_suffix(cfg.out, "", ".json"), report_json(r));
    write_file_atomic(with_suffix(cfg.out, "_parameters", ".csv"), parameters_csv(r));
    if (!cfg.histograms.empty())
        for (const auto& h : r.histograms) write_file_atomic(cfg.histograms / (h.series + ".dat"), histogram_dat(h));
    out << report_csv(r);
    return 0;
}

int run_pipeline(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    StageTimer total(err, "pipeline");
    RunConfig stage = cfg;

    stage.inputs = {cfg.observed};
    stage.out = cfg.out_dir / "params.json";
    if (int rc = run_fit(stage, out, err); rc != 0) return rc;

    stage.params = stage.out;
    stage.out_dir = cfg.out_dir / "samples";
    if (int rc = run_generate(stage, out, err); rc != 0) return rc;

    {
        StageTimer timer(err, "powerflow-all");
        std::string csv = "sample,iterations,min_v_pu,max_v_pu,out_of_band\n";
        for (const auto& p : list_samples(stage.out_dir)) {
            const NetworkDocument doc = read_network_document(p);
            const auto s = summarize_voltages(solve_document(cfg, doc), cfg.band_lo, cfg.band_hi);
            csv += std::to_string(doc.sample ? doc.sample->index : 0) + "," + std::to_string(s.iterations) + "," +
                   fmt("%.10f", s.min_v) + "," + fmt("%.10f", s.max_v) + "," + std::to_string(s.out_of_band) + "\n";
        }
        write_file_atomic(cfg.out_dir / "voltage_summary.csv", csv);
    }

    stage.real = cfg.observed;
    stage.synthetic_dir = cfg.out_dir / "samples";
    stage.out = cfg.out_dir / "report.csv";
    stage.histograms = cfg.out_dir / "hist";
    return run_report(stage, out, err);
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Synthetic unbalanced three-phase load allocation for radial distribution feeders", "gridsynth"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1, 1);

    std::string band = "0.95:1.04";
    std::vector<double> ratio_mean;
    std::optional<double> concentration;
    std::string mape_mode = "mean";

    auto add_powerflow_options = [&](CLI::App* sub) {
        sub->add_option("--r-ohm-km", cfg.impedance.r_ohm_per_km, "Line resistance per phase (ohm/km)")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        sub->add_option("--x-ohm-km", cfg.impedance.x_ohm_per_km, "Line reactance per phase (ohm/km)")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        sub->add_flag("--allow-zero-impedance", cfg.impedance.allow_zero, "Accept r = x = 0 (ideal conductors)");
        sub->add_option("--tol", cfg.powerflow.tolerance, "Power mismatch tolerance (p.u.)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--max-iter", cfg.powerflow.max_iterations, "Iteration limit")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--band", band, "Voltage band lo:hi (p.u.)")->capture_default_str();
    };
    auto add_generation_options = [&](CLI::App* sub) {
        sub->add_option("--samples", cfg.n_samples, "Number of samples")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--seed", cfg.seed, "64-bit seed")->capture_default_str();
        sub->add_option("--scenario", cfg.scenario, "Ratio means: balanced, unbalanced, or file")
            ->check(CLI::IsMember({"balanced", "unbalanced", "file"}))
            ->capture_default_str();
        sub->add_flag("--per-load-pf", cfg.per_load_power_factor, "Draw a power factor per load");
        sub->add_option("--jobs", cfg.jobs, "Worker threads (0 = all cores)")->capture_default_str();
    };
    auto add_fit_options = [&](CLI::App* sub) {
        sub->add_option("--bins", cfg.n_bins, "Distance bins")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_flag("--interpolate-empty-bins", cfg.interpolate_empty_bins,
                      "Interpolate empty distance bins from their neighbours");
        sub->add_option("--ratio-mean", ratio_mean, "Fallback ratio mean A,B,C when no three-phase load is observed")
            ->expected(3)
            ->delimiter(',');
        sub->add_option("--concentration", concentration, "Fallback ratio concentration")
            ->check(CLI::PositiveNumber);
    };

    auto* fit_cmd = app.add_subcommand("fit", "Fit model parameters from observed networks");
    fit_cmd->add_option("--input", cfg.inputs, "Observed network JSON (repeatable)")->required()->check(CLI::ExistingFile);
    fit_cmd->add_option("--out", cfg.out, "Parameters JSON (stdout if omitted)");
    add_fit_options(fit_cmd);

    auto* gen_cmd = app.add_subcommand("generate", "Sample synthetic load allocations onto a topology");
    gen_cmd->add_option("--topology", cfg.topology, "Topology JSON")->required()->check(CLI::ExistingFile);
    gen_cmd->add_option("--params", cfg.params, "Parameters JSON")->required()->check(CLI::ExistingFile);
    gen_cmd->add_option("--out-dir", cfg.out_dir, "Directory for sample_<i>.json")->required();
    add_generation_options(gen_cmd);

    auto* check_cmd = app.add_subcommand("check", "List phase-consistency violations of a sample");
    check_cmd->add_option("--sample", cfg.sample, "Sample JSON")->required()->check(CLI::ExistingFile);

    auto* enforce_cmd = app.add_subcommand("enforce", "Repair phase consistency of a sample");
    enforce_cmd->add_option("--sample", cfg.sample, "Sample JSON")->required()->check(CLI::ExistingFile);
    enforce_cmd->add_option("--out", cfg.out, "Output JSON")->required();

    auto* pf_cmd = app.add_subcommand("powerflow", "Run the radial sweep on a sample and check the voltage band");
    pf_cmd->add_option("--sample", cfg.sample, "Sample JSON")->required()->check(CLI::ExistingFile);
    pf_cmd->add_option("--report", cfg.report, "CSV with bus, phase, v_pu, in_band");
    add_powerflow_options(pf_cmd);

    auto* report_cmd = app.add_subcommand("report", "Compare real and synthetic datasets");
    report_cmd->add_option("--real", cfg.real, "Observed network JSON")->required()->check(CLI::ExistingFile);
    report_cmd->add_option("--synthetic-dir", cfg.synthetic_dir, "Directory of sample_<i>.json")
        ->required()
        ->check(CLI::ExistingDirectory);
    report_cmd->add_option("--out", cfg.out, "Mean table CSV")->required();
    report_cmd->add_option("--histograms", cfg.histograms, "Directory for histogram .dat files");
    report_cmd->add_option("--mape-mode", mape_mode, "mean or paired")
        ->check(CLI::IsMember({"mean", "paired"}))
        ->capture_default_str();
    report_cmd->add_option("--hist-bins", cfg.histogram_bins, "Histogram bins")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* pipe_cmd = app.add_subcommand("pipeline", "fit, generate, powerflow and report in one run");
    pipe_cmd->add_option("--observed", cfg.observed, "Observed network JSON")->required()->check(CLI::ExistingFile);
    pipe_cmd->add_option("--topology", cfg.topology, "Target topology JSON")->required()->check(CLI::ExistingFile);
    pipe_cmd->add_option("--out-dir", cfg.out_dir, "Output directory")->capture_default_str();
    pipe_cmd->add_option("--mape-mode", mape_mode, "mean or paired")
        ->check(CLI::IsMember({"mean", "paired"}))
        ->capture_default_str();
    pipe_cmd->add_option("--hist-bins", cfg.histogram_bins, "Histogram bins")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_fit_options(pipe_cmd);
    add_generation_options(pipe_cmd);
    add_powerflow_options(pipe_cmd);
    cfg.out_dir = "gridsynth_out";

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (!parse_band(band, cfg.band_lo, cfg.band_hi))
            throw CLI::ValidationError("--band", "expected lo:hi with lo < hi, got " + band);
        if (!ratio_mean.empty() || concentration) {
            if (ratio_mean.size() != 3 || !concentration)
                throw CLI::ValidationError("--ratio-mean", "requires three values and --concentration");
            RatioParams r;
            r.mean.v = {ratio_mean[0], ratio_mean[1], ratio_mean[2]};
            r.concentration = *concentration;
            cfg.fallback_ratios = r;
        }
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::Error& e) {
        app.exit(e, out, err);
        return 2;
    }
    cfg.mape_mode = mape_mode == "paired" ? MapeMode::Paired : MapeMode::Mean;
    cfg.subcommand = app.get_subcommands().front()->get_name();

    for (auto& p : cfg.inputs) resolve(p);
    for (fs::path* p : {&cfg.observed, &cfg.topology, &cfg.params, &cfg.sample, &cfg.out, &cfg.out_dir, &cfg.real,
                        &cfg.synthetic_dir, &cfg.histograms, &cfg.report})
        resolve(*p);

    try {
        if (cfg.fallback_ratios) validate(*cfg.fallback_ratios);
        if (cfg.subcommand == "fit") return run_fit(cfg, out, err);
        if (cfg.subcommand == "generate") return run_generate(cfg, out, err);
        if (cfg.subcommand == "check") return run_check(cfg, out, err);
        if (cfg.subcommand == "enforce") return run_enforce(cfg, out, err);
        if (cfg.subcommand == "powerflow") return run_powerflow(cfg, out, err);
        if (cfg.subcommand == "report") return run_report(cfg, out, err);
        return run_pipeline(cfg, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace gridsynth::cli
