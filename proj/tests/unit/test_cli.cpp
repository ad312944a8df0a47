#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "gridsynth/cli.hpp"
#include "gridsynth/io.hpp"
#include "gridsynth/sampler.hpp"
#include "support/trees.hpp"

using namespace gridsynth;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "gridsynth");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// Observed data and a separate target topology written to a scratch dir.
struct Workspace {
    fs::path dir;
    fs::path observed;
    fs::path topology;

    explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        observed = dir / "observed.json";
        topology = dir / "topology.json";
        auto params = testing::reference_parameters();
        std::mt19937_64 rng(5);
        const auto real = generate(testing::random_tree(rng, {80, 40}), params, 1, 1).front();
        write_file_atomic(observed, dump_network_document(sample_document(real)));
        write_file_atomic(topology, serialize_topology(*testing::random_tree(rng, {60, 30})));
    }
    ~Workspace() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("cli usage errors exit 2") {
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
    Workspace ws("gridsynth_cli_usage");
    const auto r = run_cli({"generate", "--params", ws.observed.string(), "--out-dir", "x"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--topology") != std::string::npos);
    CHECK(run_cli({"--help"}).code == 0);
    CHECK(run_cli({"--version"}).out.find(cli::kVersion) != std::string::npos);
}

TEST_CASE("cli check flags violations and enforce repairs them") {
    Workspace ws("gridsynth_cli_check");
    const auto broken = ws.dir / "broken.json";
    write_file_atomic(broken, R"({"buses": [{"id": "f"}, {"id": "n1"}, {"id": "n2"}],
        "lines": [{"from": "f", "to": "n1", "length_m": 10}, {"from": "n1", "to": "n2", "length_m": 10}],
        "feeder": {"source_bus": "f", "base_kv": 0.416}, "loads": [{"bus": "n1"}, {"bus": "n2"}],
        "observed_loads": [{"bus": "n1", "phases": ["B"], "p_kw": {"B": 1}},
                           {"bus": "n2", "phases": ["A"], "p_kw": {"A": 1}}]})");
    const auto check = run_cli({"check", "--sample", broken.string()});
    CHECK(check.code == 1);
    CHECK(check.out.find("n2 (A) not within n1 (B)") != std::string::npos);

    const auto fixed = ws.dir / "fixed.json";
    CHECK(run_cli({"enforce", "--sample", broken.string(), "--out", fixed.string()}).code == 0);
    CHECK(run_cli({"check", "--sample", fixed.string()}).code == 0);

    const auto pf = run_cli({"powerflow", "--sample", fixed.string(), "--report", (ws.dir / "v.csv").string()});
    CHECK(pf.code == 0);
    CHECK(read_text_file(ws.dir / "v.csv").rfind("bus,phase,v_pu,in_band\n", 0) == 0);
}

TEST_CASE("cli data errors exit 1") {
    Workspace ws("gridsynth_cli_errors");
    const auto bad = ws.dir / "bad.json";
    write_file_atomic(bad, "{not json");
    const auto r = run_cli({"fit", "--input", bad.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("pipeline equals its stages run by hand") {
    Workspace ws("gridsynth_cli_pipeline");
    const auto piped = ws.dir / "piped";
    REQUIRE(run_cli({"pipeline", "--observed", ws.observed.string(), "--topology", ws.topology.string(), "--samples",
                     "5", "--seed", "11", "--out-dir", piped.string()})
                .code == 0);
    for (const char* f : {"params.json", "samples/sample_0.json", "samples/sample_4.json", "voltage_summary.csv",
                          "report.csv", "report.json", "report_parameters.csv", "hist/p_kw_real_A.dat"})
        CHECK(fs::exists(piped / f));
    CHECK(read_text_file(piped / "report.csv").rfind("phase,mean_kw_real,mean_kw_synth,mape_percent\n", 0) == 0);

    const auto manual = ws.dir / "manual";
    REQUIRE(run_cli({"fit", "--input", ws.observed.string(), "--out", (manual / "params.json").string()}).code == 0);
    REQUIRE(run_cli({"generate", "--topology", ws.topology.string(), "--params", (manual / "params.json").string(),
                     "--samples", "5", "--seed", "11", "--out-dir", (manual / "samples").string()})
                .code == 0);
    REQUIRE(run_cli({"report", "--real", ws.observed.string(), "--synthetic-dir", (manual / "samples").string(),
                     "--out", (manual / "report.csv").string()})
                .code == 0);
    for (const char* f : {"params.json", "samples/sample_0.json", "samples/sample_3.json", "report.csv"})
        CHECK(read_text_file(piped / f) == read_text_file(manual / f));
}
