#pragma once

// Finite-n guarantees of the tree protocol and the machinery that checks
// exact or estimated values against them.
//
//   reveal:       P[agent n reveals]              <= n^-eps
//   chernoff:     P[level-k vote misclassifies]    <= exp(-2 k eps^2)
//   correctness:  P[a_n = theta]                   >= 1 - 2 n^-(eps^2)

#include <cstdint>
#include <string_view>
#include <vector>

#include "herdsim/signal_model.hpp"
#include "herdsim/trace.hpp"

namespace herdsim {

double reveal_bound(std::uint64_t n, double epsilon);

/// n^(-eps log2 e), the tighter intermediate form of the reveal bound.
double stricter_reveal_bound(std::uint64_t n, double epsilon);

/// 1 - 2 n^(-eps^2); non-positive (vacuous) for small n.
double correctness_bound(std::uint64_t n, double epsilon);

struct ChernoffCheck {
    double bound;            // exp(-2 k eps^2)
    double weakest_n_bound;  // (2^k - 1)^(-eps^2), the smallest n^(-eps^2) over n < 2^k
    bool dominates;          // bound <= weakest_n_bound
};

ChernoffCheck chernoff_check(unsigned k, double epsilon);

enum class CheckKind { Correctness, Reveal, Chernoff };

std::string_view to_string(CheckKind kind) noexcept;

struct BoundReport {
    CheckKind check;
    std::uint64_t n;
    Theta theta;
    double epsilon;
    double reveal_bound;
    double correct_bound;
    double chernoff_bound;  // for the level of n
    double value;           // exact or estimated quantity under test
    double slack;           // one-sided allowance (CI half-width), 0 in exact mode
    bool satisfied;
    bool vacuous;

    /// The bound relevant to `check`.
    double bound() const noexcept;
};

/// Evaluates every bound at (n, epsilon) and decides the given check.
/// Vacuous bounds (correctness <= 0, reveal >= 1) count as satisfied.
BoundReport make_report(CheckKind check, std::uint64_t n, Theta theta, double epsilon, double value,
                        double slack = 0.0);

enum class VerifyMode { Exact, MonteCarlo };

struct VerifyConfig {
    ProtocolKind protocol = ProtocolKind::TreeDeterministic;
    SignalParams params{0.4, 0.6};
    std::uint64_t n_max = 4096;
    VerifyMode mode = VerifyMode::Exact;
    std::vector<std::uint64_t> probes;  // empty: default_probes(n_max)
    /// Multiples of eps* to check at; 1/2 adds a robustness margin.
    std::vector<double> epsilon_scales{1.0, 0.5};
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    unsigned enumeration_cap = 20;
    double prior = 0.5;  // herding agents' prior
};

/// One report per (check, probe, theta, epsilon). The Chernoff check applies
/// to the tree protocol in exact mode only. Throws CapExceeded when exact
/// herding exceeds the enumeration cap and std::invalid_argument for exact
/// mode on the randomized protocol.
std::vector<BoundReport> verify(const VerifyConfig& config);

struct VerifySummary {
    std::size_t total = 0;
    std::size_t vacuous = 0;
    std::size_t violations = 0;

    bool ok() const noexcept { return violations == 0; }
    bool all_vacuous() const noexcept { return total > 0 && vacuous == total; }
};

VerifySummary summarize(const std::vector<BoundReport>& reports) noexcept;

}  // namespace herdsim
