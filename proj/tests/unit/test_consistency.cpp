#include <catch_amalgamated.hpp>

#include <algorithm>

#include "gridsynth/consistency.hpp"
#include "support/trees.hpp"

using namespace gridsynth;

namespace {

PhaseSet random_set(std::mt19937_64& rng, bool allow_empty) {
    std::uniform_int_distribution<unsigned> mask(allow_empty ? 0 : 1, 7);
    return PhaseSet::from_mask(static_cast<std::uint8_t>(mask(rng)));
}

PhaseAssignment random_assignment(const NetworkTopology& t, std::mt19937_64& rng, bool allow_empty) {
    PhaseAssignment a(t.bus_count());
    for (BusIndex i = 0; i < t.bus_count(); ++i) a[i] = random_set(rng, allow_empty);
    return a;
}

// All (n, m) with m a strict ancestor of n, found by walking parent links.
std::vector<ConsistencyViolation> brute_force(const NetworkTopology& t, const PhaseAssignment& a) {
    std::vector<ConsistencyViolation> out;
    std::vector<BusIndex> ids(t.bus_count());
    for (BusIndex i = 0; i < ids.size(); ++i) ids[i] = i;
    std::sort(ids.begin(), ids.end(), [&](BusIndex x, BusIndex y) { return t.bus_id(x) < t.bus_id(y); });
    for (BusIndex n : ids) {
        if (a[n].empty()) continue;
        for (BusIndex m = t.parent(n); m != kNoBus; m = t.parent(m))
            if (!a[m].empty() && !a[n].subset_of(a[m]))
                out.push_back({t.bus_id(n), t.bus_id(m), a[n], a[m]});
    }
    return out;
}

// Own set plus every descendant set; empty childless buses count as {A}.
PhaseAssignment subtree_union(const NetworkTopology& t, PhaseAssignment a) {
    const auto order = t.breadth_first_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (a[*it].empty()) a[*it] = PhaseSet::from_mask(1);
        if (t.parent(*it) != kNoBus) a[t.parent(*it)] |= a[*it];
    }
    a[t.source()] = PhaseSet::all();
    return a;
}

}  // namespace

TEST_CASE("check_consistency examples") {
    const auto t = testing::chain({1.0, 1.0});
    PhaseAssignment a(3);
    for (BusIndex i = 0; i < 3; ++i) a[i] = PhaseSet::all();
    CHECK(check_consistency(*t, a).empty());

    a[t->bus_index("n1")] = PhaseSet::from_mask(0b010);
    a[t->bus_index("n2")] = PhaseSet::from_mask(0b001);
    const auto v = check_consistency(*t, a);
    REQUIRE(v.size() == 1);
    CHECK(v[0].downstream == "n2");
    CHECK(v[0].upstream == "n1");
}

TEST_CASE("check_consistency agrees with the all-pairs oracle") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        std::uniform_int_distribution<std::size_t> size(1, 50);
        const auto t = testing::random_tree(rng, {size(rng)});
        const auto a = random_assignment(*t, rng, true);
        REQUIRE(check_consistency(*t, a) == brute_force(*t, a));
    }
}

TEST_CASE("enforce: equal cardinality widens the parent") {
    const auto t = testing::chain({1.0, 1.0});
    PhaseAssignment a(3);
    a[t->bus_index("f")] = PhaseSet::all();
    a[t->bus_index("n1")] = PhaseSet::from_mask(0b010);
    a[t->bus_index("n2")] = PhaseSet::from_mask(0b001);
    const auto r = enforce_consistency(*t, a);
    CHECK(r[t->bus_index("n1")].to_string() == "AB");
    CHECK(r[t->bus_index("n2")].to_string() == "A");
}

TEST_CASE("enforce: narrower parent widens the whole path") {
    const auto t = testing::chain({1.0, 1.0, 1.0});
    PhaseAssignment a(4);
    a[t->bus_index("n1")] = PhaseSet::from_mask(0b001);
    a[t->bus_index("n2")] = PhaseSet::from_mask(0b001);
    a[t->bus_index("n3")] = PhaseSet::all();
    const auto r = enforce_consistency(*t, a);
    for (const char* id : {"f", "n1", "n2", "n3"}) CHECK(r[t->bus_index(id)] == PhaseSet::all());
}

TEST_CASE("enforce leaves a consistent assignment alone") {
    const auto t = testing::chain({1.0, 1.0});
    PhaseAssignment a(3);
    a[0] = PhaseSet::all();
    a[1] = PhaseSet::from_mask(0b011);
    a[2] = PhaseSet::from_mask(0b010);
    CHECK(enforce_consistency(*t, a) == a);
}

TEST_CASE("enforce properties on random trees") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 1000; ++trial) {
        std::uniform_int_distribution<std::size_t> size(1, 50);
        const auto t = testing::random_tree(rng, {size(rng)});
        const auto a = random_assignment(*t, rng, trial % 2 == 0);
        const auto r = enforce_consistency(*t, a);
        REQUIRE(check_consistency(*t, r).empty());
        REQUIRE(enforce_consistency(*t, r) == r);
        const auto bound = subtree_union(*t, a);
        for (BusIndex i = 0; i < t->bus_count(); ++i) {
            REQUIRE(a[i].subset_of(r[i]));
            REQUIRE(r[i].subset_of(bound[i]));
        }
    }
}
