#include <doctest.h>

#include <set>
#include <vector>

#include "gridlab/rng.hpp"

using gridlab::SplitMix64;

TEST_CASE("identical seeds give identical streams") {
    SplitMix64 a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different streams") {
    SplitMix64 a(1), b(2);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64() ? 1 : 0;
    CHECK(same == 0);
}

TEST_CASE("below stays in range and covers all residues") {
    SplitMix64 rng(7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t v = rng.below(6);
        CHECK(v < 6);
        seen.insert(v);
    }
    CHECK(seen.size() == 6);
    CHECK(rng.below(1) == 0);
}

TEST_CASE("below is roughly uniform") {
    SplitMix64 rng(99);
    std::vector<int> counts(4, 0);
    const int draws = 40000;
    for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(rng.below(4))];
    for (int c : counts) {
        CHECK(c > draws / 4 - 1000);
        CHECK(c < draws / 4 + 1000);
    }
}

TEST_CASE("next_double lies in the unit interval") {
    SplitMix64 rng(5);
    for (int i = 0; i < 10000; ++i) {
        double v = rng.next_double();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("derive depends on every id") {
    const std::uint64_t base = 1234;
    const std::uint64_t a = SplitMix64::derive(base, {1, 2});
    const std::uint64_t b = SplitMix64::derive(base, {1, 3});
    const std::uint64_t c = SplitMix64::derive(base, {2, 2});
    const std::uint64_t d = SplitMix64::derive(base + 1, {1, 2});
    CHECK(a != b);
    CHECK(a != c);
    CHECK(a != d);
    CHECK(a == SplitMix64::derive(base, {1, 2}));
}

TEST_CASE("hash_tag is deterministic and discriminating") {
    CHECK(SplitMix64::hash_tag("maze") == SplitMix64::hash_tag("maze"));
    CHECK(SplitMix64::hash_tag("maze") != SplitMix64::hash_tag("sokoban"));
    CHECK(SplitMix64::hash_tag("") != SplitMix64::hash_tag("a"));
}

TEST_CASE("split produces an independent stream") {
    SplitMix64 parent(11);
    SplitMix64 child = parent.split();
    int same = 0;
    for (int i = 0; i < 64; ++i) same += parent.next_u64() == child.next_u64() ? 1 : 0;
    CHECK(same == 0);
}

TEST_CASE("chance respects probability bounds") {
    SplitMix64 rng(3);
    int hits = 0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) hits += rng.chance(0.25) ? 1 : 0;
    CHECK(hits > draws / 4 - 800);
    CHECK(hits < draws / 4 + 800);
}
