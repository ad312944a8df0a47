// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gridsynth/cli.hpp"
#include "gridsynth/consistency.hpp"
#include "gridsynth/distributions.hpp"
#include "gridsynth/estimator.hpp"
#include "gridsynth/io.hpp"
#include "gridsynth/metrics.hpp"
#include "gridsynth/powerflow.hpp"
#include "gridsynth/sampler.hpp"
#include "support/trees.hpp"

using namespace gridsynth;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kRoundTripProbTol = 0.03;
constexpr double kRoundTripMapePct = 8.0;
constexpr double kRoundTripSeconds = 60.0;
constexpr double kPfFreqTol = 0.005;
constexpr double kPfSeconds = 1.0;
constexpr double kReactiveTarget = 0.328684;
constexpr double kReactiveTol = 1e-6;
constexpr double kConsistencySeconds = 5.0;
constexpr double kSimplexTol = 1e-9;
constexpr double kDirichletMeanTol = 0.002;
constexpr double kDirichletVarRel = 0.05;
constexpr double kTruncMeanRel = 0.005;
constexpr double kTwoBusTol = 1e-6;
constexpr double kBandLo = 0.95;
constexpr double kBandHi = 1.04;
constexpr double kGenerateSeconds = 3.1;
constexpr double kFitSeconds = 20.4;
constexpr double kUnbalancedRel = 0.05;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v, const char* format = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

void require(Outcome& o, bool ok, const std::string& what) {
    if (!ok) {
        o.pass = false;
        o.detail += (o.detail.empty() ? "" : "; ") + what;
    }
}

std::shared_ptr<const NetworkTopology> lv_feeder(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return testing::random_tree(rng, {906, 55, 5.0, 30.0, 0.416});
}

Outcome round_trip() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto topo = lv_feeder(1);
    const auto p0 = testing::reference_parameters();

    std::vector<ObservedNetwork> first;
    for (const auto& s : generate(topo, p0, 1000, 42)) first.push_back(to_observed(s));
    const ModelParameters p1 = fit(first, p0.curve.bin_count());

    double worst = 0.0;
    for (Phase p : kAllPhases) {
        worst = std::max(worst, std::abs(p1.phase_choice.p[p] - p0.phase_choice.p[p]));
        worst = std::max(worst, std::abs(p1.ratios.mean[p] - p0.ratios.mean[p]));
    }
    for (std::size_t k = 0; k < p1.curve.bin_count(); ++k)
        if (p1.curve.counts[k].total >= 1000)
            worst = std::max(worst, std::abs(p1.curve.conditional_p3[k] - p0.curve.conditional_p3[k]));
    require(o, worst <= kRoundTripProbTol, "probability error " + num(worst));

    std::vector<ObservedNetwork> second;
    for (const auto& s : generate(topo, p1, 1000, 43)) second.push_back(to_observed(s));
    const auto report = compare_datasets(first, second);
    double worst_mape = 0.0;
    for (const auto& row : report.phases) worst_mape = std::max(worst_mape, row.mape_percent);
    require(o, worst_mape < kRoundTripMapePct, "phase MAPE " + num(worst_mape) + "%");

    const double dt = seconds_since(t0);
    require(o, dt < kRoundTripSeconds, "took " + num(dt) + " s");
    o.detail = "max prob err " + num(worst) + ", max MAPE " + num(worst_mape) + "%, " + num(dt, "%.2f") + " s" +
               (o.detail.empty() ? "" : " [" + o.detail + "]");
    return o;
}

Outcome worked_ratio() {
    Outcome o;
    const PhaseDraw draw{true, std::nullopt, PhaseTriple{{0.5, 0.3, 0.2}}, 50.0};
    const auto d = allocate_demand(draw, 0.95);
    require(o, d.p_kw[Phase::A] == 25.0 && d.p_kw[Phase::B] == 15.0 && d.p_kw[Phase::C] == 10.0,
            "got (" + num(d.p_kw[Phase::A], "%.17g") + ", " + num(d.p_kw[Phase::B], "%.17g") + ", " +
                num(d.p_kw[Phase::C], "%.17g") + ")");
    if (o.pass) o.detail = "(25, 15, 10) kW";
    return o;
}

Outcome power_factor_law() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto table = PowerFactorTable::standard();
    std::array<int, 3> counts{};
    for (std::uint64_t i = 0; i < 100000; ++i) {
        RngStream rng(2024, i, kPowerFactorSubstream);
        const double pf = sample_power_factor(table, rng);
        ++counts[pf == 0.85 ? 0 : pf == 0.90 ? 1 : 2];
    }
    const double dt = seconds_since(t0);
    const std::array<double, 3> expected{0.1649, 0.1051, 0.7300};
    for (int k = 0; k < 3; ++k) {
        const double f = counts[k] / 1e5;
        require(o, std::abs(f - expected[k]) <= kPfFreqTol, "freq " + num(f) + " vs " + num(expected[k]));
        o.detail += (k ? ", " : "") + num(f, "%.4f");
    }
    require(o, dt < kPfSeconds, "took " + num(dt) + " s");
    o.detail += ", " + num(dt, "%.3f") + " s";
    return o;
}

Outcome reactive_rule() {
    Outcome o;
    const long double oracle = std::sqrt(1.0L - 0.95L * 0.95L) / 0.95L;
    auto params = testing::reference_parameters();
    params.pf_table.entries = {{1.0, 0.95}};
    const auto samples = generate(lv_feeder(2), params, 20, 5);
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto& s : samples)
        for (const auto& l : s.loads)
            for (Phase p : kAllPhases)
                if (l.demand.p_kw[p] > 0.0) {
                    const double ratio = l.demand.q_kvar[p] / l.demand.p_kw[p];
                    worst = std::max(worst, std::abs(ratio - kReactiveTarget));
                    worst = std::max(worst, static_cast<double>(std::abs(ratio - oracle)));
                    ++checked;
                }
    require(o, checked > 0, "no loads checked");
    require(o, worst <= kReactiveTol, "max deviation " + num(worst));
    o.detail = std::to_string(checked) + " phase loads, max |Q/P - 0.328684| " + num(worst, "%.2e");
    return o;
}

Outcome consistency() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(5);
    std::size_t bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::uniform_int_distribution<std::size_t> size(1, 50);
        const auto t = testing::random_tree(rng, {size(rng)});
        PhaseAssignment a(t->bus_count());
        std::uniform_int_distribution<unsigned> mask(0, 7);
        for (BusIndex i = 0; i < t->bus_count(); ++i) a[i] = PhaseSet::from_mask(static_cast<std::uint8_t>(mask(rng)));
        const auto r = enforce_consistency(*t, a);
        bool ok = check_consistency(*t, r).empty() && enforce_consistency(*t, r) == r;
        for (BusIndex i = 0; i < t->bus_count(); ++i) ok = ok && a[i].subset_of(r[i]);
        bad += !ok;
    }
    const double dt = seconds_since(t0);
    require(o, bad == 0, std::to_string(bad) + " trees failed");
    require(o, dt < kConsistencySeconds, "took " + num(dt) + " s");
    o.detail = "1000 trees, " + std::to_string(bad) + " failures, " + num(dt, "%.3f") + " s";
    return o;
}

Outcome dirichlet_layer() {
    Outcome o;
    const RatioParams r{PhaseTriple{{0.5, 0.3, 0.2}}, 100.0};
    const int n = 1000000;
    std::array<double, 3> s{}, s2{};
    double worst_sum = 0.0;
    bool non_negative = true;
    for (int k = 0; k < n; ++k) {
        RngStream rng(6, 0, static_cast<std::uint64_t>(k));
        const auto x = sample_phase_ratios(r, rng);
        worst_sum = std::max(worst_sum, std::abs(x.sum() - 1.0));
        for (int i = 0; i < 3; ++i) {
            non_negative = non_negative && x.v[i] >= 0.0;
            s[i] += x.v[i];
            s2[i] += x.v[i] * x.v[i];
        }
    }
    require(o, worst_sum <= kSimplexTol && non_negative, "off simplex by " + num(worst_sum));
    double worst_mean = 0.0;
    double worst_var = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double mean = s[i] / n;
        const double var = s2[i] / n - mean * mean;
        const double a = r.concentration * r.mean.v[i];
        const double k = r.concentration;
        const double analytic = a * (k - a) / (k * k * (k + 1.0));
        worst_mean = std::max(worst_mean, std::abs(mean - r.mean.v[i]));
        worst_var = std::max(worst_var, std::abs(var - analytic) / analytic);
    }
    require(o, worst_mean <= kDirichletMeanTol, "mean error " + num(worst_mean));
    require(o, worst_var <= kDirichletVarRel, "variance error " + num(worst_var));
    o.detail = "simplex " + num(worst_sum, "%.1e") + ", mean err " + num(worst_mean, "%.2e") + ", var rel err " +
               num(worst_var, "%.3f");
    return o;
}

double truncated_mean_by_quadrature(double mu, double sigma) {
    const double hi = mu + 40.0 * sigma;
    const int n = 400000;
    const double h = hi / n;
    double mass = 0.0;
    double moment = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double x = k * h;
        const double z = (x - mu) / sigma;
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        mass += w * std::exp(-0.5 * z * z);
        moment += w * x * std::exp(-0.5 * z * z);
    }
    return moment / mass;
}

Outcome truncated_normal_layer() {
    Outcome o;
    const DemandSlot slot{0.45, 0.2};
    const int n = 1000000;
    double s = 0.0;
    std::size_t non_positive = 0;
    for (int k = 0; k < n; ++k) {
        RngStream rng(7, 0, static_cast<std::uint64_t>(k));
        const double x = sample_total_demand(slot, rng);
        non_positive += !(x > 0.0);
        s += x;
    }
    const double oracle = truncated_mean_by_quadrature(slot.mu, slot.sigma);
    const double rel = std::abs(s / n - oracle) / oracle;
    require(o, non_positive == 0, std::to_string(non_positive) + " non-positive draws");
    require(o, rel <= kTruncMeanRel, "mean rel err " + num(rel));
    o.detail = "mean " + num(s / n) + " vs " + num(oracle) + " (rel " + num(rel, "%.2e") + ")";
    return o;
}

Outcome power_flow() {
    Outcome o;
    // Two-bus: 200 m line, 15 kW + 5 kvar on phase A.
    const auto chain = testing::chain({200.0});
    std::vector<LoadDemand> d(2);
    d[1].p_kw[Phase::A] = 15.0;
    d[1].q_kvar[Phase::A] = 5.0;
    PhaseAssignment all(2);
    all[0] = all[1] = PhaseSet::all();
    const auto v = run_power_flow(chain, d, all);
    const double zb = 0.416 * 0.416;
    const double r = 0.4 * 0.2 / zb;
    const double x = 0.3 * 0.2 / zb;
    const double p = 15.0 / (1000.0 / 3.0);
    const double q = 5.0 / (1000.0 / 3.0);
    const double b = 1.0 - 2.0 * (r * p + x * q);
    const double closed = std::sqrt((b + std::sqrt(b * b - 4.0 * (r * r + x * x) * (p * p + q * q))) / 2.0);
    const double err = std::abs(v.magnitude(1, Phase::A) - closed);
    require(o, err <= kTwoBusTol, "two-bus error " + num(err));

    std::mt19937_64 rng(8);
    const auto tree = testing::random_tree(rng, {100});
    PhaseAssignment full(tree->bus_count());
    for (BusIndex i = 0; i < tree->bus_count(); ++i) full[i] = PhaseSet::all();
    const auto flat = run_power_flow(tree, std::vector<LoadDemand>(tree->bus_count()), full);
    bool exact = flat.iterations == 1;
    for (BusIndex i = 0; i < tree->bus_count(); ++i)
        for (Phase ph : kAllPhases) exact = exact && flat.magnitude(i, ph) == 1.0;
    require(o, exact, "zero-load voltages not exactly 1.0");

    const auto sample = testing::desk_sample(8);
    const auto vs = run_power_flow(sample);
    const auto rows = voltage_table(vs, kBandLo, kBandHi);
    double lo = 1.0;
    std::size_t out = 0;
    for (const auto& row : rows) {
        lo = std::min(lo, row.magnitude);
        out += !row.in_band;
    }
    require(o, out == 0, std::to_string(out) + " desk voltages out of band");
    o.detail = "two-bus err " + num(err, "%.1e") + ", zero-load exact, desk min " + num(lo, "%.4f") + " p.u.";
    return o;
}

Outcome performance() {
    Outcome o;
    const auto topo = lv_feeder(9);
    const auto params = testing::reference_parameters();
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = generate_range(topo, params, 0, 1, 99, {false, 1});
    const double gen = seconds_since(t0);
    require(o, !s.empty() && check_consistency(*topo, s.front().bus_phases).empty(), "sample not consistent");
    require(o, gen <= kGenerateSeconds, "generate took " + num(gen) + " s");

    std::mt19937_64 rng(10);
    const auto big = testing::random_tree(rng, {10001});
    const ObservedNetwork obs = to_observed(generate(big, params, 1, 3).front());
    const auto t1 = std::chrono::steady_clock::now();
    const auto fitted = fit(obs);
    const double fit_s = seconds_since(t1);
    require(o, obs.loads.size() == 10000, "observed network has " + std::to_string(obs.loads.size()) + " loads");
    require(o, fit_s <= kFitSeconds, "fit took " + num(fit_s) + " s");
    o.detail = "906-bus sample " + num(gen * 1000.0, "%.2f") + " ms, fit on 10000 loads " + num(fit_s * 1000.0, "%.2f") +
               " ms";
    (void)fitted;
    return o;
}

std::vector<std::pair<std::string, std::string>> tree_contents(const fs::path& root) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), root).string(), read_text_file(e.path()));
    std::sort(out.begin(), out.end());
    return out;
}

Outcome determinism() {
    Outcome o;
    const fs::path work = fs::absolute("acceptance_determinism");
    fs::remove_all(work);
    fs::create_directories(work);
    std::mt19937_64 rng(11);
    const auto real = generate(testing::random_tree(rng, {300, 40}), testing::reference_parameters(), 1, 1).front();
    write_file_atomic(work / "observed.json", dump_network_document(sample_document(real)));
    write_file_atomic(work / "topology.json", serialize_topology(*lv_feeder(12)));

    const auto run = [&](const std::string& name, const std::string& jobs) {
        const std::vector<std::string> args{"gridsynth", "pipeline", "--observed", (work / "observed.json").string(),
                                            "--topology", (work / "topology.json").string(), "--samples", "40",
                                            "--seed", "42", "--jobs", jobs, "--out-dir", (work / name).string()};
        std::ostringstream out, err;
        return cli::run(args, out, err);
    };
    const int a = run("a", "1");
    const int b = run("b", "1");
    const int c = run("c", "4");
    require(o, a == 0 && b == 0 && c == 0, "pipeline exit codes " + std::to_string(a) + "/" + std::to_string(b) + "/" +
                                               std::to_string(c));
    if (o.pass) {
        const auto ta = tree_contents(work / "a");
        require(o, ta == tree_contents(work / "b"), "repeat run differs");
        require(o, ta == tree_contents(work / "c"), "--jobs 4 differs from --jobs 1");
        o.detail = std::to_string(ta.size()) + " files identical across runs and --jobs 1/4";
    }
    fs::remove_all(work);
    return o;
}

Outcome unbalanced_scenario() {
    Outcome o;
    std::mt19937_64 rng(13);
    const auto topo = testing::random_tree(rng, {100, 60});
    auto params = testing::reference_parameters();
    params.ratios.mean = unbalanced_ratio_means();
    PhaseTriple total;
    for (const auto& s : generate(topo, params, 1000, 14))
        for (const auto& l : s.loads)
            if (l.phases.size() == 3)
                for (Phase p : kAllPhases) total[p] += l.demand.p_kw[p];
    const double unit = total.sum() / 10.0;
    const std::array<double, 3> target{1.0, 6.0, 3.0};
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(total.v[k] / unit - target[k]) / target[k]);
    require(o, worst <= kUnbalancedRel, "relative error " + num(worst));
    o.detail = num(total.v[0] / unit, "%.3f") + " : " + num(total.v[1] / unit, "%.3f") + " : " +
               num(total.v[2] / unit, "%.3f") + " (max rel err " + num(worst, "%.4f") + ")";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"round-trip parameter recovery", round_trip},
        {"worked ratio example", worked_ratio},
        {"power-factor law", power_factor_law},
        {"reactive-power rule", reactive_rule},
        {"phase consistency", consistency},
        {"Dirichlet layer", dirichlet_layer},
        {"truncated-normal layer", truncated_normal_layer},
        {"power flow", power_flow},
        {"performance", performance},
        {"determinism", determinism},
        {"unbalanced scenario", unbalanced_scenario},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("criterion %2zu: %s  %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
