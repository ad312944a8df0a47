#include "gridsynth/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "gridsynth/distributions.hpp"
#include "gridsynth/error.hpp"

namespace gridsynth {

bool sample_phase_count(double d, const DistanceBinCurve& curve, RngStream& rng) {
    return rng.uniform() < curve.p3_at(d);
}

Phase sample_phase_choice(const PhaseChoiceProbs& p, RngStream& rng) {
    const double u = rng.uniform();
    if (u < p.p[Phase::A]) return Phase::A;
    if (u < p.p[Phase::A] + p.p[Phase::B]) return Phase::B;
    return Phase::C;
}

PhaseTriple sample_phase_ratios(const RatioParams& r, RngStream& rng) {
    PhaseTriple alpha;
    for (std::size_t i = 0; i < 3; ++i) alpha.v[i] = std::max(r.concentration * r.mean.v[i], kMinDirichletShape);
    return dirichlet(alpha, rng);
}

double sample_total_demand(const DemandSlot& m, RngStream& rng) {
    return positive_truncated_normal(m.mu, m.sigma, rng);
}

double sample_power_factor(const PowerFactorTable& table, RngStream& rng) { return table.lookup(rng.uniform()); }

double reactive_ratio(double pf) { return std::tan(std::acos(pf)); }

PhaseDraw draw_load(double d, const ModelParameters& params, RngStream& rng) {
    PhaseDraw draw;
    draw.is_three_phase = sample_phase_count(d, params.curve, rng);
    if (draw.is_three_phase) {
        draw.ratios = sample_phase_ratios(params.ratios, rng);
        draw.total_kw = sample_total_demand(params.demand.three_phase, rng);
    } else {
        draw.single_phase = sample_phase_choice(params.phase_choice, rng);
        draw.total_kw = sample_total_demand(params.demand.phase(*draw.single_phase), rng);
    }
    return draw;
}

LoadDemand allocate_demand(const PhaseDraw& draw, double pf) {
    LoadDemand out;
    if (draw.is_three_phase) {
        for (Phase p : kAllPhases) out.p_kw[p] = (*draw.ratios)[p] * draw.total_kw;
    } else {
        out.p_kw[*draw.single_phase] = draw.total_kw;
    }
    const double k = reactive_ratio(pf);
    for (Phase p : kAllPhases) out.q_kvar[p] = out.p_kw[p] * k;
    return out;
}

SyntheticSample allocate_loads(std::shared_ptr<const NetworkTopology> t, const ModelParameters& params,
                               std::uint64_t seed, std::uint64_t sample_index, const SamplerOptions& options) {
    if (!t) throw ValidationError("allocate_loads: no topology");
    const NetworkTopology& topo = *t;

    SyntheticSample s;
    s.seed = seed;
    s.sample_index = sample_index;
    s.bus_phases = PhaseAssignment(topo.bus_count());
    s.bus_phases[topo.source()] = PhaseSet::all();

    double network_pf = 0.0;
    if (!options.per_load_power_factor) {
        RngStream pf_rng(seed, sample_index, kPowerFactorSubstream);
        network_pf = sample_power_factor(params.pf_table, pf_rng);
        s.power_factor = network_pf;
    }

    s.loads.reserve(topo.loads().size());
    for (std::size_t j = 0; j < topo.loads().size(); ++j) {
        const BusIndex bus = topo.load_bus(j);
        RngStream rng(seed, sample_index, j);
        const PhaseDraw draw = draw_load(normalized_distance(topo, bus), params, rng);
        const double pf = options.per_load_power_factor ? sample_power_factor(params.pf_table, rng) : network_pf;

        SampledLoad load;
        load.bus = topo.bus_id(bus);
        load.phases = draw.is_three_phase ? PhaseSet::all() : PhaseSet{*draw.single_phase};
        load.demand = allocate_demand(draw, pf);
        load.power_factor = pf;
        s.bus_phases[bus] |= load.phases;
        s.loads.push_back(std::move(load));
    }
    s.topology = std::move(t);
    return s;
}

std::vector<SyntheticSample> generate_range(std::shared_ptr<const NetworkTopology> t,
                                            const ModelParameters& params, std::uint64_t first,
                                            std::size_t count, std::uint64_t seed,
                                            const SamplerOptions& options) {
    if (!t) throw ValidationError("generate: no topology");
    validate(params);

    std::vector<SyntheticSample> out(count);
    auto produce = [&](std::size_t k) {
        SyntheticSample s = allocate_loads(t, params, seed, first + k, options);
        s.bus_phases = enforce_consistency(*t, std::move(s.bus_phases));
        out[k] = std::move(s);
    };

    unsigned jobs = options.jobs == 0 ? std::max(1U, std::thread::hardware_concurrency()) : options.jobs;
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    if (jobs <= 1) {
        for (std::size_t k = 0; k < count; ++k) produce(k);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(jobs);
        for (unsigned w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (std::size_t k = next++; k < count; k = next++) {
                    try {
                        produce(k);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<SyntheticSample> generate(std::shared_ptr<const NetworkTopology> t, const ModelParameters& params,
                                      std::size_t n_samples, std::uint64_t seed, const SamplerOptions& options) {
    if (n_samples == 0) throw ValidationError("generate: n_samples must be >= 1");
    return generate_range(std::move(t), params, 0, n_samples, seed, options);
}

ObservedNetwork to_observed(const SyntheticSample& s) {
    ObservedNetwork obs;
    obs.topology = s.topology;
    obs.loads.reserve(s.loads.size());
    for (const auto& l : s.loads) obs.loads.push_back({l.bus, l.phases, l.demand});
    return obs;
}

PhaseTriple balanced_ratio_means() { return {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}; }

PhaseTriple unbalanced_ratio_means() { return {{0.1, 0.6, 0.3}}; }

}  // namespace gridsynth
