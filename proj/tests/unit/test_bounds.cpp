#include <doctest.h>

#include <cmath>
#include <vector>

#include "herdsim/bounds.hpp"
#include "herdsim/exact_oracle.hpp"
#include "herdsim/tree_protocol.hpp"

using namespace herdsim;

namespace {
const std::vector<SignalParams> kGrid{{0.4, 0.6}, {0.3, 0.7}, {0.45, 0.55}, {0.1, 0.9}};
}

TEST_CASE("reveal_bound") {
    CHECK(reveal_bound(1, 0.1) == 1.0);
    CHECK(reveal_bound(1, 0.37) == 1.0);
    CHECK(reveal_bound(1024, 0.1) == doctest::Approx(0.5));
    CHECK(stricter_reveal_bound(1024, 0.1) < reveal_bound(1024, 0.1));
    CHECK_THROWS_AS(reveal_bound(0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(reveal_bound(2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(reveal_bound(2, 0.6), std::invalid_argument);
}

TEST_CASE("correctness_bound") {
    CHECK(correctness_bound(1, 0.1) == -1.0);
    CHECK(correctness_bound(1, 0.5) == -1.0);
    // 2^62 at eps = 1/4: 1 - 2 * 2^(-62/16).
    CHECK(std::abs(correctness_bound(std::uint64_t{1} << 62, 0.25) - (1.0 - 2.0 * std::pow(2.0, -62.0 / 16))) < 1e-12);
}

TEST_CASE("chernoff_check") {
    for (double eps : {0.01, 0.05, 0.1, 0.2, 0.25, 0.5}) {
        for (unsigned k = 1; k <= 63; ++k) {
            const auto c = chernoff_check(k, eps);
            CHECK(c.dominates);
            CHECK(c.bound == doctest::Approx(std::exp(-2.0 * k * eps * eps)));
        }
    }
    CHECK(chernoff_check(1, 0.1).bound < 1.0);
    CHECK_THROWS_AS(chernoff_check(0, 0.1), std::invalid_argument);
}

TEST_CASE("level-k vote misclassification stays under exp(-2 k eps*^2)") {
    for (const auto& p : kGrid) {
        const double eps = derive_params(p).epsilon_star;
        for (Theta theta : {Theta::zero, Theta::one}) {
            for (unsigned k = 1; k <= 60; ++k) {
                CHECK(vote_misclassification(k, p, theta) <= chernoff_check(k, eps).bound);
            }
        }
    }
}

TEST_CASE("make_report classifies vacuous and violated checks") {
    auto r = make_report(CheckKind::Correctness, 4, Theta::one, 0.1, 0.2);
    CHECK(r.vacuous);
    CHECK(r.satisfied);

    r = make_report(CheckKind::Reveal, 1, Theta::one, 0.1, 1.0);
    CHECK(r.vacuous);
    CHECK(r.satisfied);

    r = make_report(CheckKind::Reveal, 2, Theta::one, 0.1, 1.0);
    CHECK_FALSE(r.vacuous);
    CHECK_FALSE(r.satisfied);
    CHECK(r.bound() == doctest::Approx(std::pow(2.0, -0.1)));

    // One-sided slack.
    r = make_report(CheckKind::Reveal, 2, Theta::one, 0.1, 0.94, 0.01);
    CHECK(r.satisfied);

    r = make_report(CheckKind::Correctness, std::uint64_t{1} << 40, Theta::zero, 0.25, 0.5);
    CHECK_FALSE(r.vacuous);
    CHECK_FALSE(r.satisfied);
}

TEST_CASE("tree verify in exact mode passes for (0.4, 0.6) up to 2^12") {
    VerifyConfig c;
    c.n_max = 4096;
    std::vector<std::uint64_t> all(4096);
    for (std::uint64_t i = 0; i < 4096; ++i) all[i] = i + 1;
    c.probes = all;
    const auto reports = verify(c);
    const auto s = summarize(reports);
    CHECK(s.total == 4096 * 2 * 3 * 2);
    CHECK(s.ok());
}

TEST_CASE("herding verify flags a violation; vacuous ranges are not failures") {
    VerifyConfig c;
    c.protocol = ProtocolKind::RationalHerding;
    c.n_max = 15;
    const auto reports = verify(c);
    CHECK_FALSE(summarize(reports).ok());
    for (const auto& r : reports) {
        if (r.check == CheckKind::Correctness) CHECK(r.vacuous);
    }

    VerifyConfig tiny;
    tiny.n_max = 1;
    const auto only = verify(tiny);
    CHECK(summarize(only).all_vacuous() == false);  // the Chernoff bound at k=1 is < 1
    bool correctness_vacuous = true;
    for (const auto& r : only) {
        if (r.check != CheckKind::Chernoff) correctness_vacuous = correctness_vacuous && r.vacuous;
    }
    CHECK(correctness_vacuous);
}

TEST_CASE("verify rejects exact mode for the randomized protocol and honors the cap") {
    VerifyConfig c;
    c.protocol = ProtocolKind::RandomizedReveal;
    CHECK_THROWS_AS(verify(c), std::invalid_argument);
    c.protocol = ProtocolKind::RationalHerding;
    c.n_max = 64;
    CHECK_THROWS_AS(verify(c), CapExceeded);
}

TEST_CASE("montecarlo verify of the tree protocol passes with CI slack") {
    VerifyConfig c;
    c.mode = VerifyMode::MonteCarlo;
    c.n_max = 1024;
    c.trials = 20000;
    c.seed = 4;
    c.workers = 2;
    CHECK(summarize(verify(c)).ok());
}

TEST_CASE("p_n >= 1 - delta once n >= (2/delta)^(1/eps*^2)") {
    // eps* = 1/4 is the largest value any parameter pair admits.
    const SignalParams p(0.25, 0.75);
    const double eps = derive_params(p).epsilon_star;
    REQUIRE(eps == doctest::Approx(0.25));
    for (double delta : {1.0, 0.5, 0.25}) {
        const double start = std::pow(2.0 / delta, 1.0 / (eps * eps));
        const auto first_level = static_cast<unsigned>(std::ceil(std::log2(start)));
        for (Theta theta : {Theta::zero, Theta::one}) {
            const TreeLevelTable table(p, theta, 63);
            for (unsigned k = first_level; k <= 62; ++k) {
                const std::uint64_t n = std::uint64_t{1} << k;
                CHECK(table.correct_prob(n) >= 1.0 - delta);
                CHECK(table.correct_prob(n - 1) >= 1.0 - delta);
            }
        }
    }
}
