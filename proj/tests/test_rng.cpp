#include "doctest.h"

#include <set>

#include "sveda/rng.hpp"

using namespace sveda;

TEST_CASE("counter rng is a pure function of key and position")
{
    CounterRng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto va = a();
        CHECK(va == b());
        CHECK(va != c());
    }
    CHECK(a.position() == 100);
}

TEST_CASE("known first outputs pin the generator across platforms")
{
    // SplitMix64 seeded with 0 starts 0xE220A8397B1DCDAF.
    CounterRng rng(0);
    CHECK(rng() == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("uniform01 stays in [0, 1) and below() stays under its bound")
{
    CounterRng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(rng.below(3) < 3);
    }
}

TEST_CASE("derive_key separates tag sequences")
{
    std::set<std::uint64_t> keys;
    for (std::uint64_t a = 0; a < 50; ++a)
        for (std::uint64_t b = 0; b < 50; ++b)
            keys.insert(derive_key(1, {a, b}));
    CHECK(keys.size() == 2500);
    CHECK(derive_key(1, {1, 2}) != derive_key(1, {2, 1}));
}
