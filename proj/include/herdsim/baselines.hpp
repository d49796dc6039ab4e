#pragma once

// Contrast protocols run under the same Trace contract as the tree protocol:
//
//  * randomized reveal: agent i reveals her signal with probability 1/i,
//    otherwise votes on every publicly revealed signal plus her own;
//  * rational herding: every agent takes the action maximizing her posterior
//    probability of matching theta, knowing that predecessors do the same.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

#include "herdsim/signal_model.hpp"
#include "herdsim/trace.hpp"

namespace herdsim {

Decision randomized_act(std::uint64_t i, std::span<const Bit> revealed_so_far, Bit own_signal,
                        double reveal_coin, double q_bar);

/// Agent i's signal is drawn at step 2(i-1) and her reveal coin at 2(i-1)+1.
Trace run_randomized_trace(const SignalParams& params, Theta theta, std::uint64_t n, SeededRng& rng);

/// Log-likelihood ratio log P[history | theta=1] / P[history | theta=0]
/// accumulated over the informative actions seen so far.
struct BeliefState {
    double log_likelihood_ratio = 0.0;
    std::int64_t informative_count = 0;
};

BeliefState belief_update(BeliefState state, Bit observation, const SignalParams& params) noexcept;

/// Posterior log-odds within this distance of zero count as a tie.
inline constexpr double kHerdingTieTolerance = 1e-9;

struct InconsistentHistory : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Public belief of a population of rational agents. An action is
/// informative exactly when the two possible signals would lead to
/// different actions; in that case action == signal and the observer
/// updates on it. Otherwise the population is in a cascade and the belief is
/// frozen.
class HerdingBelief {
public:
    /// prior is P[theta = 1]; must lie in (0, 1).
    HerdingBelief(const SignalParams& params, double prior);

    /// Action of the next agent given her signal. `revealed` is true when
    /// the action depends on the signal (no cascade).
    Decision decide(Bit own_signal) const noexcept;

    /// The signal-independent action if the belief is in a cascade.
    std::optional<Bit> cascade_action() const noexcept;

    /// Incorporates the next public action. Throws InconsistentHistory if
    /// the action contradicts a cascade.
    void observe(Bit action);

    double public_log_odds() const noexcept { return prior_log_odds_ + state_.log_likelihood_ratio; }
    const BeliefState& state() const noexcept { return state_; }

private:
    Bit action_for(Bit signal) const noexcept;

    SignalParams params_;
    double prior_log_odds_;
    double llr_one_;
    double llr_zero_;
    BeliefState state_;
};

/// Action of rational agent i after observing history = (a_1, ..., a_{i-1}).
/// Ties in the posterior follow the agent's own signal. Throws
/// InconsistentHistory when the history is unreachable and
/// std::invalid_argument when history.size() != i - 1.
Bit rational_act(std::uint64_t i, std::span<const Bit> history, Bit own_signal,
                 const SignalParams& params, double prior);

/// Agent i's signal is drawn at step i-1.
Trace run_herding_trace(const SignalParams& params, Theta theta, std::uint64_t n, double prior,
                        SeededRng& rng);

}  // namespace herdsim
