#include "gridsynth/phase.hpp"

namespace gridsynth {

std::optional<Phase> phase_from_string(std::string_view s) noexcept {
    if (s == "A") return Phase::A;
    if (s == "B") return Phase::B;
    if (s == "C") return Phase::C;
    return std::nullopt;
}

std::string PhaseSet::to_string() const {
    if (empty()) return "-";
    std::string out;
    for (Phase p : kAllPhases)
        if (contains(p)) out.push_back(to_char(p));
    return out;
}

}  // namespace gridsynth
