#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridsynth/consistency.hpp"
#include "gridsynth/model.hpp"
#include "gridsynth/network.hpp"
#include "gridsynth/sampler.hpp"
#include "gridsynth/topology.hpp"

namespace gridsynth {

/// Provenance of a generated sample file.
struct SampleInfo {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    std::optional<double> power_factor;

    bool operator==(const SampleInfo&) const = default;
};

/// Contents of a network JSON document. `buses`, `lines`, `feeder` and
/// `loads` are required; `observed_loads`, `bus_phases` and `sample` are
/// optional. Any other key is rejected.
struct NetworkDocument {
    std::shared_ptr<const NetworkTopology> topology;
    std::optional<std::vector<ObservedLoad>> observed_loads;
    std::optional<PhaseAssignment> bus_phases;
    std::optional<SampleInfo> sample;

    /// Throws ValidationError when there are no observed loads.
    ObservedNetwork observed() const;
};

/// Throws ParseError on malformed JSON or schema violations and
/// ValidationError on topology/observation invariants.
NetworkDocument parse_network_document(std::string_view json_text);
NetworkDocument read_network_document(const std::filesystem::path& path);
std::string dump_network_document(const NetworkDocument& doc);

NetworkTopology load_topology(std::istream& in);
std::string serialize_topology(const NetworkTopology& t);

/// Sample as an observed-network document carrying its repaired bus phases.
NetworkDocument sample_document(const SyntheticSample& s);

ModelParameters parse_parameters(std::string_view json_text);
ModelParameters read_parameters(const std::filesystem::path& path);
std::string dump_parameters(const ModelParameters& p);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace gridsynth
