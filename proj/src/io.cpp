#include "gridsynth/io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "gridsynth/error.hpp"

namespace gridsynth {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void check_keys(const json& j, std::string_view ctx, std::initializer_list<std::string_view> required,
                std::initializer_list<std::string_view> optional = {}) {
    if (!j.is_object()) throw ParseError(std::string(ctx) + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        const bool known = std::find(required.begin(), required.end(), k) != required.end() ||
                           std::find(optional.begin(), optional.end(), k) != optional.end();
        if (!known) throw ParseError(std::string(ctx) + ": unknown key \"" + k + "\"");
    }
    for (auto k : required)
        if (!j.contains(std::string(k)))
            throw ParseError(std::string(ctx) + ": missing key \"" + std::string(k) + "\"");
}

const json& array_at(const json& j, const char* key, std::string_view ctx) {
    const json& a = j.at(key);
    if (!a.is_array()) throw ParseError(std::string(ctx) + "." + key + ": expected an array");
    return a;
}

double number(const json& j, std::string_view ctx) {
    if (!j.is_number()) throw ParseError(std::string(ctx) + ": expected a number");
    return j.get<double>();
}

std::uint64_t unsigned_integer(const json& j, std::string_view ctx) {
    if (!j.is_number_unsigned()) throw ParseError(std::string(ctx) + ": expected a non-negative integer");
    return j.get<std::uint64_t>();
}

std::string string(const json& j, std::string_view ctx) {
    if (!j.is_string()) throw ParseError(std::string(ctx) + ": expected a string");
    return j.get<std::string>();
}

PhaseSet phase_set(const json& j, std::string_view ctx) {
    if (!j.is_array()) throw ParseError(std::string(ctx) + ": expected an array of phases");
    PhaseSet s;
    for (const auto& e : j) {
        const auto p = phase_from_string(string(e, ctx));
        if (!p) throw ParseError(std::string(ctx) + ": phase must be one of \"A\", \"B\", \"C\"");
        if (s.contains(*p)) throw ParseError(std::string(ctx) + ": duplicate phase");
        s.insert(*p);
    }
    return s;
}

ordered_json phase_set_json(PhaseSet s) {
    ordered_json a = ordered_json::array();
    for (Phase p : kAllPhases)
        if (s.contains(p)) a.push_back(std::string(1, to_char(p)));
    return a;
}

// {A, B, C} object; missing phases read as zero.
PhaseTriple phase_triple(const json& j, std::string_view ctx, bool all_required = false) {
    if (all_required)
        check_keys(j, ctx, {"A", "B", "C"});
    else
        check_keys(j, ctx, {}, {"A", "B", "C"});
    PhaseTriple t;
    for (Phase p : kAllPhases) {
        const std::string key(1, to_char(p));
        if (j.contains(key)) t[p] = number(j.at(key), std::string(ctx) + "." + key);
    }
    return t;
}

ordered_json phase_triple_json(const PhaseTriple& t) {
    return ordered_json{{"A", t[Phase::A]}, {"B", t[Phase::B]}, {"C", t[Phase::C]}};
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

std::shared_ptr<const NetworkTopology> topology_from_json(const json& j) {
    std::vector<Bus> buses;
    for (const auto& b : array_at(j, "buses", "document")) {
        check_keys(b, "bus", {"id"}, {"x", "y"});
        Bus bus;
        bus.id = string(b.at("id"), "bus.id");
        if (b.contains("x")) bus.x = number(b.at("x"), "bus " + bus.id + ".x");
        if (b.contains("y")) bus.y = number(b.at("y"), "bus " + bus.id + ".y");
        buses.push_back(std::move(bus));
    }

    std::vector<Line> lines;
    for (const auto& l : array_at(j, "lines", "document")) {
        check_keys(l, "line", {"from", "to"}, {"length_m"});
        Line line;
        line.from = string(l.at("from"), "line.from");
        line.to = string(l.at("to"), "line.to");
        if (l.contains("length_m")) line.length_m = number(l.at("length_m"), "line.length_m");
        lines.push_back(std::move(line));
    }

    const json& f = j.at("feeder");
    check_keys(f, "feeder", {"source_bus", "base_kv"});
    Feeder feeder{string(f.at("source_bus"), "feeder.source_bus"), number(f.at("base_kv"), "feeder.base_kv")};

    std::vector<LoadPoint> loads;
    for (const auto& l : array_at(j, "loads", "document")) {
        check_keys(l, "load", {"bus"});
        loads.push_back({string(l.at("bus"), "load.bus")});
    }
    return std::make_shared<const NetworkTopology>(std::move(buses), std::move(lines), std::move(feeder),
                                                   std::move(loads));
}

ordered_json topology_to_json(const NetworkTopology& t) {
    ordered_json j;
    ordered_json buses = ordered_json::array();
    for (const auto& b : t.buses()) {
        ordered_json e{{"id", b.id}};
        if (b.x) {
            e["x"] = *b.x;
            e["y"] = *b.y;
        }
        buses.push_back(std::move(e));
    }
    ordered_json lines = ordered_json::array();
    for (const auto& l : t.lines()) lines.push_back({{"from", l.from}, {"to", l.to}, {"length_m", *l.length_m}});
    ordered_json loads = ordered_json::array();
    for (const auto& l : t.loads()) loads.push_back({{"bus", l.bus}});

    j["buses"] = std::move(buses);
    j["lines"] = std::move(lines);
    j["feeder"] = {{"source_bus", t.feeder().source_bus}, {"base_kv", t.feeder().base_kv}};
    j["loads"] = std::move(loads);
    return j;
}

std::string dump(const ordered_json& j, int indent) {
    std::string out = j.dump(indent);
    out.push_back('\n');
    return out;
}

}  // namespace

ObservedNetwork NetworkDocument::observed() const {
    if (!observed_loads) throw ValidationError("document has no observed_loads");
    ObservedNetwork obs{topology, *observed_loads};
    validate(obs);
    return obs;
}

NetworkDocument parse_network_document(std::string_view json_text) {
    const json j = parse_json(json_text);
    try {
        check_keys(j, "document", {"buses", "lines", "feeder", "loads"}, {"observed_loads", "bus_phases", "sample"});
        NetworkDocument doc;
        doc.topology = topology_from_json(j);

        if (j.contains("observed_loads")) {
            std::vector<ObservedLoad> loads;
            for (const auto& l : array_at(j, "observed_loads", "document")) {
                check_keys(l, "observed_load", {"bus", "phases", "p_kw"}, {"q_kvar"});
                ObservedLoad o;
                o.bus = string(l.at("bus"), "observed_load.bus");
                const std::string ctx = "observed_load " + o.bus;
                o.phases = phase_set(l.at("phases"), ctx + ".phases");
                o.demand.p_kw = phase_triple(l.at("p_kw"), ctx + ".p_kw");
                if (l.contains("q_kvar")) o.demand.q_kvar = phase_triple(l.at("q_kvar"), ctx + ".q_kvar");
                loads.push_back(std::move(o));
            }
            doc.observed_loads = std::move(loads);
            validate(ObservedNetwork{doc.topology, *doc.observed_loads});
        }

        if (j.contains("bus_phases")) {
            const json& bp = j.at("bus_phases");
            if (!bp.is_object()) throw ParseError("bus_phases: expected an object");
            PhaseAssignment a(doc.topology->bus_count());
            for (auto it = bp.begin(); it != bp.end(); ++it) {
                const auto bus = doc.topology->find_bus(it.key());
                if (!bus) throw ValidationError("bus_phases: unknown bus " + it.key());
                a[*bus] = phase_set(it.value(), "bus_phases." + it.key());
            }
            doc.bus_phases = std::move(a);
        }

        if (j.contains("sample")) {
            const json& s = j.at("sample");
            check_keys(s, "sample", {"seed", "index"}, {"power_factor"});
            SampleInfo info;
            info.seed = unsigned_integer(s.at("seed"), "sample.seed");
            info.index = unsigned_integer(s.at("index"), "sample.index");
            if (s.contains("power_factor") && !s.at("power_factor").is_null())
                info.power_factor = number(s.at("power_factor"), "sample.power_factor");
            doc.sample = info;
        }
        return doc;
    } catch (const json::exception& e) {
        throw ParseError(std::string("schema error: ") + e.what());
    }
}

std::string dump_network_document(const NetworkDocument& doc) {
    ordered_json j = topology_to_json(*doc.topology);
    if (doc.observed_loads) {
        ordered_json loads = ordered_json::array();
        for (const auto& l : *doc.observed_loads) {
            loads.push_back({{"bus", l.bus},
                             {"phases", phase_set_json(l.phases)},
                             {"p_kw", phase_triple_json(l.demand.p_kw)},
                             {"q_kvar", phase_triple_json(l.demand.q_kvar)}});
        }
        j["observed_loads"] = std::move(loads);
    }
    if (doc.bus_phases) {
        ordered_json bp = ordered_json::object();
        for (BusIndex b : doc.topology->lexicographic_order())
            if (doc.bus_phases->assigned(b)) bp[doc.topology->bus_id(b)] = phase_set_json((*doc.bus_phases)[b]);
        j["bus_phases"] = std::move(bp);
    }
    if (doc.sample) {
        ordered_json s{{"seed", doc.sample->seed}, {"index", doc.sample->index}};
        s["power_factor"] = doc.sample->power_factor ? ordered_json(*doc.sample->power_factor) : ordered_json(nullptr);
        j["sample"] = std::move(s);
    }
    return dump(j, -1);
}

NetworkDocument read_network_document(const std::filesystem::path& path) {
    return parse_network_document(read_text_file(path));
}

NetworkTopology load_topology(std::istream& in) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return *parse_network_document(text).topology;
}

std::string serialize_topology(const NetworkTopology& t) { return dump(topology_to_json(t), 2); }

NetworkDocument sample_document(const SyntheticSample& s) {
    NetworkDocument doc;
    doc.topology = s.topology;
    doc.observed_loads = to_observed(s).loads;
    doc.bus_phases = s.bus_phases;
    doc.sample = SampleInfo{s.seed, s.sample_index, s.power_factor};
    return doc;
}

ModelParameters parse_parameters(std::string_view json_text) {
    const json j = parse_json(json_text);
    try {
        check_keys(j, "parameters", {"curve", "phase_choice", "demand", "ratios", "pf_table"});
        ModelParameters p;

        const json& c = j.at("curve");
        check_keys(c, "curve", {"bin_edges", "conditional_p3", "joint_mass", "counts"});
        for (const auto& v : array_at(c, "bin_edges", "curve")) p.curve.bin_edges.push_back(number(v, "bin_edges"));
        for (const auto& v : array_at(c, "conditional_p3", "curve"))
            p.curve.conditional_p3.push_back(number(v, "conditional_p3"));
        for (const auto& v : array_at(c, "joint_mass", "curve")) p.curve.joint_mass.push_back(number(v, "joint_mass"));
        for (const auto& v : array_at(c, "counts", "curve")) {
            if (!v.is_array() || v.size() != 2) throw ParseError("curve.counts: expected [three_phase, total] pairs");
            p.curve.counts.push_back({unsigned_integer(v[0], "counts"), unsigned_integer(v[1], "counts")});
        }

        p.phase_choice.p = phase_triple(j.at("phase_choice"), "phase_choice", true);

        const json& d = j.at("demand");
        check_keys(d, "demand", {"three_phase", "per_phase"});
        auto slot = [](const json& s, const std::string& ctx) {
            check_keys(s, ctx, {"mu", "sigma"});
            return DemandSlot{number(s.at("mu"), ctx + ".mu"), number(s.at("sigma"), ctx + ".sigma")};
        };
        p.demand.three_phase = slot(d.at("three_phase"), "demand.three_phase");
        const json& per = d.at("per_phase");
        check_keys(per, "demand.per_phase", {"A", "B", "C"});
        for (Phase ph : kAllPhases) {
            const std::string key(1, to_char(ph));
            p.demand.phase(ph) = slot(per.at(key), "demand.per_phase." + key);
        }

        const json& r = j.at("ratios");
        check_keys(r, "ratios", {"mean", "concentration"});
        p.ratios.mean = phase_triple(r.at("mean"), "ratios.mean", true);
        p.ratios.concentration = number(r.at("concentration"), "ratios.concentration");

        p.pf_table.entries.clear();
        for (const auto& e : array_at(j, "pf_table", "parameters")) {
            check_keys(e, "pf_table entry", {"threshold", "pf"});
            p.pf_table.entries.push_back({number(e.at("threshold"), "threshold"), number(e.at("pf"), "pf")});
        }
        validate(p);
        return p;
    } catch (const json::exception& e) {
        throw ParseError(std::string("schema error: ") + e.what());
    }
}

ModelParameters read_parameters(const std::filesystem::path& path) { return parse_parameters(read_text_file(path)); }

std::string dump_parameters(const ModelParameters& p) {
    ordered_json counts = ordered_json::array();
    for (const auto& n : p.curve.counts) counts.push_back({n.three_phase, n.total});
    ordered_json pf = ordered_json::array();
    for (const auto& e : p.pf_table.entries) pf.push_back({{"threshold", e.threshold}, {"pf", e.pf}});
    auto slot = [](const DemandSlot& s) { return ordered_json{{"mu", s.mu}, {"sigma", s.sigma}}; };

    ordered_json j;
    j["curve"] = {{"bin_edges", p.curve.bin_edges},
                  {"conditional_p3", p.curve.conditional_p3},
                  {"joint_mass", p.curve.joint_mass},
                  {"counts", std::move(counts)}};
    j["phase_choice"] = phase_triple_json(p.phase_choice.p);
    j["demand"] = {{"three_phase", slot(p.demand.three_phase)},
                   {"per_phase",
                    {{"A", slot(p.demand.phase(Phase::A))},
                     {"B", slot(p.demand.phase(Phase::B))},
                     {"C", slot(p.demand.phase(Phase::C))}}}};
    j["ratios"] = {{"mean", phase_triple_json(p.ratios.mean)}, {"concentration", p.ratios.concentration}};
    j["pf_table"] = std::move(pf);
    return dump(j, 2);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace gridsynth
