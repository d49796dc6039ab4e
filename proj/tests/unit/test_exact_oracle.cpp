#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "herdsim/exact_oracle.hpp"
#include "herdsim/tree_protocol.hpp"

using namespace herdsim;

namespace {

const std::vector<SignalParams> kGrid{{0.4, 0.6}, {0.3, 0.7}, {0.45, 0.55}, {0.1, 0.9}, {0.2, 0.75}, {0.05, 0.3}};

struct BruteForce {
    std::vector<double> reveal;
    std::vector<double> correct;
};

// Plain loop over all 2^n signal vectors. Revealing agents are located by
// reading the revealed signals as a binary number (first revealer = least
// significant bit); everyone else compares the mean of the revealed signals
// plus her own with (q0+q1)/2.
BruteForce brute_force_tree(const SignalParams& p, Theta theta, unsigned n) {
    BruteForce out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    const double q = p.q(theta);
    const double q_bar = (p.q0() + p.q1()) / 2.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        double w = 1.0;
        for (unsigned i = 0; i < n; ++i) w *= ((mask >> i) & 1U) ? q : 1.0 - q;
        std::vector<int> revealed;
        for (unsigned i = 1; i <= n; ++i) {
            const int s = static_cast<int>((mask >> (i - 1)) & 1U);
            unsigned k = 0;
            while ((1U << k) <= i) ++k;
            unsigned t = 1U << (k - 1);
            for (unsigned j = 0; j + 1 < k; ++j) t += static_cast<unsigned>(revealed[j]) << j;
            int a;
            if (t == i) {
                a = s;
                revealed.push_back(s);
                out.reveal[i - 1] += w;
            } else {
                int ones = s;
                for (unsigned j = 0; j + 1 < k; ++j) ones += revealed[j];
                a = static_cast<double>(ones) / k <= q_bar ? 0 : 1;
            }
            if (a == static_cast<int>(theta)) out.correct[i - 1] += w;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("tree_reveal_prob examples") {
    const SignalParams p(0.4, 0.6);
    CHECK(tree_reveal_prob(1, p, Theta::one) == 1.0);
    CHECK(tree_reveal_prob(2, p, Theta::one) == doctest::Approx(0.4));
    CHECK(tree_reveal_prob(3, p, Theta::one) == doctest::Approx(0.6));
    const auto bf = brute_force_tree(p, Theta::one, 3);
    CHECK(bf.reveal[1] == doctest::Approx(0.4));
    CHECK(bf.reveal[2] == doctest::Approx(0.6));
}

TEST_CASE("tree_correct_prob examples") {
    const SignalParams p(0.4, 0.6);
    CHECK(tree_correct_prob(1, p, Theta::one) == doctest::Approx(0.6));
    const auto bf = brute_force_tree(p, Theta::one, 2);
    CHECK(bf.correct[1] == doctest::Approx(0.4 * 0.6 + 0.6 * 0.6));
    CHECK(tree_correct_prob(2, p, Theta::one) == doctest::Approx(0.6));
}

TEST_CASE("reveal probabilities sum to one across each level") {
    for (const auto& p : kGrid) {
        for (Theta theta : {Theta::zero, Theta::one}) {
            for (unsigned k = 1; k <= 16; ++k) {
                double sum = 0.0;
                for (std::uint64_t i = std::uint64_t{1} << (k - 1); i < (std::uint64_t{1} << k); ++i) {
                    sum += tree_reveal_prob(i, p, theta);
                }
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("direct sums, level table, full enumeration and brute force agree") {
    for (const auto& p : kGrid) {
        for (Theta theta : {Theta::zero, Theta::one}) {
            const auto bf = brute_force_tree(p, theta, 12);
            const auto en = full_enumeration(ProtocolKind::TreeDeterministic, p, theta, 12);
            const TreeLevelTable table(p, theta, 4);
            for (std::uint64_t n = 1; n <= 12; ++n) {
                CAPTURE(n);
                const double direct = tree_correct_prob(n, p, theta);
                CHECK(std::abs(direct - bf.correct[n - 1]) < 1e-12);
                CHECK(std::abs(direct - en[n - 1].p_correct) < 1e-12);
                CHECK(std::abs(direct - table.correct_prob(n)) < 1e-12);
                CHECK(std::abs(tree_reveal_prob(n, p, theta) - bf.reveal[n - 1]) < 1e-12);
                CHECK(std::abs(tree_reveal_prob(n, p, theta) - en[n - 1].p_reveal) < 1e-12);
                CHECK(en[n - 1].method == ExactMethod::FullEnumeration);
            }
        }
    }
}

TEST_CASE("level table matches direct summation at deep levels") {
    for (const auto& p : kGrid) {
        for (Theta theta : {Theta::zero, Theta::one}) {
            const TreeLevelTable table(p, theta, 20);
            for (std::uint64_t n : {std::uint64_t{1000}, std::uint64_t{4095}, std::uint64_t{65536},
                                    std::uint64_t{(1 << 19) + 12345}}) {
                // The direct sum adds up to 2^19 terms, so allow accumulated rounding.
                CHECK(std::abs(table.correct_prob(n) - tree_correct_prob(n, p, theta)) < 1e-10);
            }
        }
    }
}

TEST_CASE("vote_misclassification matches the binomial distribution") {
    for (const auto& p : kGrid) {
        const double q_bar = derive_params(p).q_bar;
        for (unsigned k = 1; k <= 40; ++k) {
            // Largest count the vote maps to 0.
            int c_star = -1;
            for (unsigned c = 0; c <= k; ++c) {
                if (static_cast<double>(c) / k <= q_bar) c_star = static_cast<int>(c);
            }
            const boost::math::binomial b1(k, p.q1());
            const boost::math::binomial b0(k, p.q0());
            const double err1 = c_star < 0 ? 0.0 : boost::math::cdf(b1, c_star);
            const double err0 = c_star < 0 ? 1.0 : boost::math::cdf(boost::math::complement(b0, c_star));
            CHECK(vote_misclassification(k, p, Theta::one) == doctest::Approx(err1).epsilon(1e-10));
            CHECK(vote_misclassification(k, p, Theta::zero) == doctest::Approx(err0).epsilon(1e-10));
        }
    }
}

TEST_CASE("full_enumeration edge cases") {
    const SignalParams p(0.3, 0.9);
    const auto one = full_enumeration(ProtocolKind::TreeDeterministic, p, Theta::zero, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].p_correct == doctest::Approx(signal_match_prob(p, Theta::zero)));
    CHECK_THROWS_AS(full_enumeration(ProtocolKind::TreeDeterministic, p, Theta::zero, 21), CapExceeded);
    CHECK_NOTHROW(full_enumeration(ProtocolKind::TreeDeterministic, p, Theta::zero, 3, 0.5, 3));
    CHECK_THROWS_AS(full_enumeration(ProtocolKind::RandomizedReveal, p, Theta::zero, 3), std::invalid_argument);
}

TEST_CASE("herding enumeration shows a plateau strictly below one") {
    const SignalParams p(0.4, 0.6);
    const auto ex = full_enumeration(ProtocolKind::RationalHerding, p, Theta::one, 15);
    for (const auto& r : ex) {
        CHECK(r.p_correct >= 0.6 - 1e-12);
        CHECK(r.p_correct < 0.7);
        CHECK(r.p_reveal <= 1.0);
    }
    // Probabilities are nondecreasing and the increments shrink geometrically.
    for (std::size_t i = 2; i < ex.size(); ++i) CHECK(ex[i].p_correct >= ex[i - 1].p_correct - 1e-12);
    CHECK(ex[14].p_correct - ex[12].p_correct < 0.01);
}

TEST_CASE("prior_weighted") {
    CHECK(prior_weighted(0.6, 0.6, 0.5) == doctest::Approx(0.6));
    CHECK(prior_weighted(1.0, 0.0, 0.5) == doctest::Approx(0.5));
    CHECK(prior_weighted(0.8, 0.6, 0.25) == doctest::Approx(0.75));
}

TEST_CASE("vote error trend across levels") {
    // The tail is not monotone in k (parity and ties at k*q_bar), so flag
    // increases instead of assuming them away; the overall trend must fall.
    for (const auto& p : kGrid) {
        for (Theta theta : {Theta::zero, Theta::one}) {
            const TreeLevelTable table(p, theta, 40);
            int increases = 0;
            for (unsigned k = 1; k < 40; ++k) {
                if (table.vote_error(k + 1) > table.vote_error(k) + 1e-15) ++increases;
            }
            if (increases > 0) MESSAGE("q0=" << p.q0() << " q1=" << p.q1() << " theta=" << int(theta)
                                             << ": " << increases << " non-monotone steps");
            CHECK(table.vote_error(40) < table.vote_error(1));
        }
    }
}
