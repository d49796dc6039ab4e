#pragma once

// Exact reveal and correctness probabilities.
//
// Three independent routes are provided for the tree protocol:
//   * tree_reveal_prob / tree_correct_prob evaluate the defining sums over
//     the revealed-signal prefix x in {0,1}^(k-1) directly;
//   * TreeLevelTable uses the per-level binomial vote distribution plus a
//     correction for the single candidate whose prefix would make it reveal;
//   * full_enumeration replays any deterministic protocol on all 2^n signal
//     vectors.

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "herdsim/signal_model.hpp"
#include "herdsim/trace.hpp"

namespace herdsim {

enum class ExactMethod { TreeClosedForm, FullEnumeration };

std::string_view to_string(ExactMethod method) noexcept;

struct ExactResult {
    std::uint64_t n;
    Theta theta;
    double p_reveal;
    double p_correct;
    ExactMethod method;
};

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deepest level the direct-sum routes accept; their cost is O(2^(k-1)).
inline constexpr unsigned kDirectSumMaxLevel = 32;

/// P[agent n reveals | theta]: the probability that the first k-1 revealed
/// signals spell the offset of n, least-significant bit first.
double tree_reveal_prob(std::uint64_t n, const SignalParams& params, Theta theta);

/// P[a_n = theta | theta] by direct summation over revealed prefixes.
double tree_correct_prob(std::uint64_t n, const SignalParams& params, Theta theta);

/// Exact probability that the threshold vote over k i.i.d. samples from
/// D_theta differs from theta.
double vote_misclassification(unsigned k, const SignalParams& params, Theta theta);

/// Per-level tables for O(1) lookups of exact tree probabilities up to
/// max_level (at most 63).
class TreeLevelTable {
public:
    TreeLevelTable(const SignalParams& params, Theta theta, unsigned max_level);

    unsigned max_level() const noexcept { return max_level_; }
    double vote_error(unsigned level) const;
    double reveal_prob(std::uint64_t n) const;
    double correct_prob(std::uint64_t n) const;
    ExactResult result(std::uint64_t n) const;

private:
    // P[threshold_vote(c + s, k) == theta] over the agent's own signal s.
    double own_vote_correct(std::uint64_t ones, unsigned level) const noexcept;

    SignalParams params_;
    Theta theta_;
    unsigned max_level_;
    double q_bar_;
    std::vector<double> vote_error_;  // index = level
};

inline constexpr unsigned kDefaultEnumerationCap = 20;

/// Exact p_reveal and p_correct for agents 1..n of a deterministic protocol
/// by enumerating every signal vector. Throws CapExceeded when n > cap and
/// std::invalid_argument for the randomized protocol.
std::vector<ExactResult> full_enumeration(ProtocolKind kind, const SignalParams& params, Theta theta,
                                          std::uint64_t n, double prior = 0.5,
                                          unsigned cap = kDefaultEnumerationCap);

/// (1 - prior) * p0 + prior * p1, with prior = P[theta = 1].
double prior_weighted(double p0, double p1, double prior) noexcept;

}  // namespace herdsim
