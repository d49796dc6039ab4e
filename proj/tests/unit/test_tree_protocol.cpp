#include <doctest.h>

#include <set>
#include <stdexcept>
#include <vector>

#include "herdsim/tree_protocol.hpp"

using namespace herdsim;

namespace {

RevealTranscript transcript_of(std::uint64_t bits, unsigned len) {
    std::vector<Bit> v;
    for (unsigned j = 0; j < len; ++j) v.push_back(static_cast<Bit>((bits >> j) & 1U));
    return RevealTranscript(v);
}

// Replays the tree protocol on a fixed signal vector.
Trace replay(const std::vector<Bit>& signals, double q_bar) {
    Trace t;
    RevealTranscript tr;
    for (std::size_t i = 1; i <= signals.size(); ++i) {
        const Decision d = act(i, tr, signals[i - 1], q_bar);
        if (d.revealed) tr.push(d.action);
        t.signals.push_back(signals[i - 1]);
        t.actions.push_back(d.action);
        t.revealed.push_back(d.revealed);
    }
    return t;
}

}  // namespace

TEST_CASE("level_of") {
    CHECK(level_of(1) == AgentIndex{1, 1, 0});
    CHECK(level_of(5) == AgentIndex{5, 3, 1});
    CHECK(level_of(8) == AgentIndex{8, 4, 0});
    CHECK(level_of(7) == AgentIndex{7, 3, 3});
    CHECK(level_of((std::uint64_t{1} << 63) - 1).level == 63);
    CHECK_THROWS_AS(level_of(0), std::invalid_argument);
    CHECK_THROWS_AS(level_of(std::uint64_t{1} << 63), std::invalid_argument);
}

TEST_CASE("reveal_index") {
    CHECK(reveal_index(1, RevealTranscript{}) == 1);
    CHECK(reveal_index(2, RevealTranscript({0})) == 2);
    CHECK(reveal_index(2, RevealTranscript({1})) == 3);
    CHECK(reveal_index(3, RevealTranscript({1, 0})) == 5);
    // Only the first k-1 entries are read.
    CHECK(reveal_index(2, RevealTranscript({1, 1, 1})) == 3);
    CHECK_THROWS_AS(reveal_index(3, RevealTranscript({1})), std::invalid_argument);
    CHECK_THROWS_AS(reveal_index(0, RevealTranscript{}), std::invalid_argument);
}

TEST_CASE("reveal_index maps level-k prefixes bijectively onto level k") {
    for (unsigned k = 1; k <= 12; ++k) {
        std::set<std::uint64_t> hit;
        const std::uint64_t prefixes = std::uint64_t{1} << (k - 1);
        for (std::uint64_t x = 0; x < prefixes; ++x) {
            const auto t = reveal_index(k, transcript_of(x, k - 1));
            REQUIRE(t >= (std::uint64_t{1} << (k - 1)));
            REQUIRE(t < (std::uint64_t{1} << k));
            hit.insert(t);
        }
        CHECK(hit.size() == prefixes);
    }
}

TEST_CASE("is_revealing") {
    CHECK(is_revealing(1, RevealTranscript{}));
    CHECK(is_revealing(5, RevealTranscript({1, 0})));
    CHECK_FALSE(is_revealing(5, RevealTranscript({0, 0})));
    CHECK_THROWS_AS(is_revealing(5, RevealTranscript({1})), std::invalid_argument);

    // Exactly one revealer per level, and it is the agent whose offset the
    // prefix spells.
    for (unsigned k = 1; k <= 8; ++k) {
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << (k - 1)); ++x) {
            const auto tr = transcript_of(x, k - 1);
            int count = 0;
            for (std::uint64_t i = std::uint64_t{1} << (k - 1); i < (std::uint64_t{1} << k); ++i) {
                if (is_revealing(i, tr)) {
                    ++count;
                    CHECK(level_of(i).offset == x);
                }
            }
            CHECK(count == 1);
        }
    }
}

TEST_CASE("threshold_rule") {
    const std::vector<Bit> a{1, 0};
    const std::vector<Bit> b{1, 1, 0};
    const std::vector<Bit> c{0, 0, 1};
    CHECK(threshold_rule(a, 0.5) == 0);  // tie goes to 0
    CHECK(threshold_rule(b, 0.5) == 1);
    CHECK(threshold_rule(c, 0.5) == 0);
    CHECK_THROWS_AS(threshold_rule(std::span<const Bit>{}, 0.5), std::invalid_argument);
}

TEST_CASE("act") {
    CHECK(act(1, RevealTranscript{}, 1, 0.5) == Decision{1, true});
    CHECK(act(2, RevealTranscript({1}), 0, 0.5) == Decision{0, false});
    CHECK(act(3, RevealTranscript({1}), 0, 0.5) == Decision{0, true});
    CHECK_THROWS_AS(act(4, RevealTranscript({1}), 0, 0.5), std::invalid_argument);
}

TEST_CASE("run_tree_trace structure") {
    const SignalParams p(0.4, 0.6);
    SeededRng rng(1, 0);
    const Trace one = run_tree_trace(p, Theta::one, 1, rng);
    REQUIRE(one.size() == 1);
    CHECK(one.actions[0] == one.signals[0]);
    CHECK(one.revealed[0]);

    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SeededRng r(seed, 5);
        const Trace t = run_tree_trace(p, seed % 2 ? Theta::one : Theta::zero, 7, r);
        CHECK(t.revealed[0]);
        CHECK(t.revealed[1] + t.revealed[2] == 1);
        CHECK(t.revealed[3] + t.revealed[4] + t.revealed[5] + t.revealed[6] == 1);
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t.revealed[i]) CHECK(t.actions[i] == t.signals[i]);
        }
    }
}

TEST_CASE("all-ones signals reveal at 1, 3, 7") {
    const Trace t = replay(std::vector<Bit>(7, 1), 0.5);
    CHECK(t.revealed == std::vector<bool>{true, false, true, false, false, false, true});
    CHECK(t.actions == std::vector<Bit>(7, 1));
}

TEST_CASE("non-revealing actions ignore other non-revealing agents' signals") {
    const SignalParams p(0.35, 0.7);
    const double q_bar = derive_params(p).q_bar;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SeededRng rng(seed, 0);
        const Trace base = run_tree_trace(p, Theta::one, 63, rng);
        for (std::size_t j = 0; j < base.size(); ++j) {
            if (base.revealed[j]) continue;
            auto signals = base.signals;
            signals[j] ^= 1;
            const Trace flipped = replay(signals, q_bar);
            for (std::size_t i = 0; i < base.size(); ++i) {
                if (i == j) continue;
                REQUIRE(flipped.actions[i] == base.actions[i]);
                REQUIRE(flipped.revealed[i] == base.revealed[i]);
            }
        }
    }
}

TEST_CASE("transcript reconstruction from the action history matches the kept transcript") {
    const SignalParams p(0.4, 0.6);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SeededRng rng(seed, 9);
        const Trace t = run_tree_trace(p, Theta::zero, 300, rng);
        std::vector<Bit> kept;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t.revealed[i]) kept.push_back(t.actions[i]);
        }
        CHECK(transcript_from_history(t.actions) == RevealTranscript(kept));
    }
}

TEST_CASE("run_tree_trace is reproducible") {
    const SignalParams p(0.4, 0.6);
    SeededRng a(99, 1);
    SeededRng b(99, 1);
    const Trace x = run_tree_trace(p, Theta::one, 500, a);
    const Trace y = run_tree_trace(p, Theta::one, 500, b);
    CHECK(x.signals == y.signals);
    CHECK(x.actions == y.actions);
    CHECK(x.revealed == y.revealed);
}
