#include "support/trees.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace gridsynth::testing {

std::shared_ptr<const NetworkTopology> random_tree(std::mt19937_64& rng, const TreeShape& shape) {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::uniform_real_distribution<double> length(shape.min_length_m, shape.max_length_m);
    for (std::size_t i = 0; i < shape.buses; ++i) {
        buses.push_back({"b" + std::to_string(i), std::nullopt, std::nullopt});
        if (i == 0) continue;
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        const std::size_t parent = pick(rng);
        lines.push_back({buses[parent].id, buses[i].id, length(rng)});
    }

    std::vector<std::size_t> candidates(shape.buses > 0 ? shape.buses - 1 : 0);
    std::iota(candidates.begin(), candidates.end(), std::size_t{1});
    if (shape.loads > 0 && shape.loads < candidates.size()) {
        std::shuffle(candidates.begin(), candidates.end(), rng);
        candidates.resize(shape.loads);
        std::sort(candidates.begin(), candidates.end());
    }
    std::vector<LoadPoint> loads;
    for (std::size_t i : candidates) loads.push_back({buses[i].id});
    if (loads.empty()) loads.push_back({buses[0].id});

    return std::make_shared<const NetworkTopology>(std::move(buses), std::move(lines), Feeder{"b0", shape.base_kv},
                                                   std::move(loads));
}

std::shared_ptr<const NetworkTopology> chain(const std::vector<double>& lengths_m, double base_kv) {
    std::vector<Bus> buses{{"f", std::nullopt, std::nullopt}};
    std::vector<Line> lines;
    for (std::size_t k = 0; k < lengths_m.size(); ++k) {
        buses.push_back({"n" + std::to_string(k + 1), std::nullopt, std::nullopt});
        lines.push_back({buses[k].id, buses[k + 1].id, lengths_m[k]});
    }
    std::vector<LoadPoint> loads{{buses.back().id}};
    return std::make_shared<const NetworkTopology>(std::move(buses), std::move(lines), Feeder{"f", base_kv},
                                                   std::move(loads));
}

ModelParameters reference_parameters(std::size_t n_bins) {
    ModelParameters p;
    p.curve = DistanceBinCurve::constant(n_bins, 0.0);
    for (std::size_t k = 0; k < n_bins; ++k) {
        const double t = n_bins > 1 ? static_cast<double>(k) / static_cast<double>(n_bins - 1) : 0.0;
        p.curve.conditional_p3[k] = 0.4 - 0.35 * t;
    }
    p.phase_choice.p = PhaseTriple{{0.3350, 0.3296, 0.3354}};
    p.demand = DemandMoments::uniform({0.45, 0.15});
    p.ratios = RatioParams{PhaseTriple{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, 100.0};
    p.pf_table = PowerFactorTable::standard();
    return p;
}

SyntheticSample desk_sample(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto t = random_tree(rng, TreeShape{100, 60, 5.0, 30.0, 0.416});
    return generate(t, reference_parameters(), 1, seed).front();
}

}  // namespace gridsynth::testing
