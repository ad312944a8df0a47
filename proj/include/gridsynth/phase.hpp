#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

namespace gridsynth {

enum class Phase : std::uint8_t { A = 0, B = 1, C = 2 };

inline constexpr std::array<Phase, 3> kAllPhases{Phase::A, Phase::B, Phase::C};

constexpr std::size_t index(Phase p) noexcept { return static_cast<std::size_t>(p); }

constexpr char to_char(Phase p) noexcept { return "ABC"[index(p)]; }

std::optional<Phase> phase_from_string(std::string_view s) noexcept;

/// Subset of {A, B, C}, stored as a three-bit mask.
class PhaseSet {
public:
    constexpr PhaseSet() noexcept = default;
    constexpr PhaseSet(std::initializer_list<Phase> phases) noexcept {
        for (Phase p : phases) insert(p);
    }

    static constexpr PhaseSet all() noexcept { return from_mask(0b111); }
    static constexpr PhaseSet from_mask(std::uint8_t mask) noexcept {
        PhaseSet s;
        s.mask_ = mask & 0b111;
        return s;
    }

    constexpr bool contains(Phase p) const noexcept { return (mask_ >> index(p)) & 1U; }
    constexpr void insert(Phase p) noexcept { mask_ |= static_cast<std::uint8_t>(1U << index(p)); }
    constexpr bool empty() const noexcept { return mask_ == 0; }
    constexpr int size() const noexcept { return (mask_ & 1) + ((mask_ >> 1) & 1) + ((mask_ >> 2) & 1); }
    constexpr std::uint8_t mask() const noexcept { return mask_; }

    constexpr bool subset_of(PhaseSet other) const noexcept { return (mask_ & ~other.mask_) == 0; }

    constexpr PhaseSet operator|(PhaseSet other) const noexcept { return from_mask(mask_ | other.mask_); }
    constexpr PhaseSet& operator|=(PhaseSet other) noexcept {
        mask_ |= other.mask_;
        return *this;
    }
    constexpr bool operator==(const PhaseSet&) const noexcept = default;

    /// Canonical "A", "AB", "ABC", ... ; empty set is "-".
    std::string to_string() const;

private:
    std::uint8_t mask_ = 0;
};

/// Quantity indexed by phase.
struct PhaseTriple {
    std::array<double, 3> v{0.0, 0.0, 0.0};

    constexpr double& operator[](Phase p) noexcept { return v[index(p)]; }
    constexpr double operator[](Phase p) const noexcept { return v[index(p)]; }
    constexpr double sum() const noexcept { return v[0] + v[1] + v[2]; }
    constexpr bool operator==(const PhaseTriple&) const noexcept = default;
};

}  // namespace gridsynth
