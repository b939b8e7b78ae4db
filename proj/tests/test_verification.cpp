#include "tokenfin/verification.hpp"

#include <doctest.h>

#include <algorithm>

using namespace tokenfin;

TEST_CASE("every check passes at the default point") {
    const auto checks = run_verification(ModelParams{});
    CHECK(checks.size() >= 12);
    for (const CheckResult& c : checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
        CHECK_FALSE(c.skipped);
    }
}

TEST_CASE("non-applicable ordering is skipped, not failed") {
    ModelParams p;
    p.liquid_share_t1 = 0.0;
    const auto checks = run_verification(p);
    const auto it = std::find_if(checks.begin(), checks.end(), [](const CheckResult& c) {
        return c.name == "equity declines more than token over sigma";
    });
    REQUIRE(it != checks.end());
    CHECK(it->skipped);
    for (const CheckResult& c : checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }
}

TEST_CASE("invalid base is rejected") {
    ModelParams p;
    p.wealth = 1.0;
    CHECK_THROWS_AS(run_verification(p), ModelError);
}
