#include "herdsim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "herdsim/tree_protocol.hpp"

namespace herdsim {

Decision randomized_act(std::uint64_t i, std::span<const Bit> revealed_so_far, Bit own_signal,
                        double reveal_coin, double q_bar) {
    if (i == 0) throw std::invalid_argument("agent indices start at 1");
    if (reveal_coin < 1.0 / static_cast<double>(i)) {
        return {own_signal, true};
    }
    const auto ones = static_cast<std::uint64_t>(
        std::count(revealed_so_far.begin(), revealed_so_far.end(), Bit{1}));
    return {threshold_vote(ones + own_signal, revealed_so_far.size() + 1, q_bar), false};
}

Trace run_randomized_trace(const SignalParams& params, Theta theta, std::uint64_t n, SeededRng& rng) {
    const double q_bar = derive_params(params).q_bar;
    Trace trace;
    trace.theta = theta;
    std::vector<Bit> revealed_signals;
    for (std::uint64_t i = 1; i <= n; ++i) {
        const Bit s = draw_signal(params, theta, rng);
        const double coin = rng.next_uniform();
        const Decision d = randomized_act(i, revealed_signals, s, coin, q_bar);
        if (d.revealed) revealed_signals.push_back(d.action);
        trace.signals.push_back(s);
        trace.actions.push_back(d.action);
        trace.revealed.push_back(d.revealed);
    }
    return trace;
}

BeliefState belief_update(BeliefState state, Bit observation, const SignalParams& params) noexcept {
    state.log_likelihood_ratio += observation ? std::log(params.q1() / params.q0())
                                              : std::log((1.0 - params.q1()) / (1.0 - params.q0()));
    ++state.informative_count;
    return state;
}

HerdingBelief::HerdingBelief(const SignalParams& params, double prior)
    : params_(params),
      prior_log_odds_(0.0),
      llr_one_(std::log(params.q1() / params.q0())),
      llr_zero_(std::log((1.0 - params.q1()) / (1.0 - params.q0()))) {
    if (!(prior > 0.0 && prior < 1.0)) {
        throw std::invalid_argument("prior must lie in (0, 1)");
    }
    prior_log_odds_ = std::log(prior / (1.0 - prior));
}

Bit HerdingBelief::action_for(Bit signal) const noexcept {
    const double posterior = public_log_odds() + (signal ? llr_one_ : llr_zero_);
    if (posterior > kHerdingTieTolerance) return 1;
    if (posterior < -kHerdingTieTolerance) return 0;
    return signal;
}

Decision HerdingBelief::decide(Bit own_signal) const noexcept {
    const Bit a0 = action_for(0);
    const Bit a1 = action_for(1);
    return {own_signal ? a1 : a0, a0 != a1};
}

std::optional<Bit> HerdingBelief::cascade_action() const noexcept {
    const Bit a0 = action_for(0);
    if (a0 == action_for(1)) return a0;
    return std::nullopt;
}

void HerdingBelief::observe(Bit action) {
    if (const auto cascade = cascade_action()) {
        if (*cascade != action) {
            throw InconsistentHistory("action " + std::to_string(action) +
                                      " contradicts a cascade on " + std::to_string(*cascade));
        }
        return;
    }
    state_ = belief_update(state_, action, params_);
}

Bit rational_act(std::uint64_t i, std::span<const Bit> history, Bit own_signal,
                 const SignalParams& params, double prior) {
    if (i == 0 || history.size() != i - 1) {
        throw std::invalid_argument("rational agent i must observe exactly i-1 actions");
    }
    HerdingBelief belief(params, prior);
    for (Bit a : history) belief.observe(a);
    return belief.decide(own_signal).action;
}

Trace run_herding_trace(const SignalParams& params, Theta theta, std::uint64_t n, double prior,
                        SeededRng& rng) {
    Trace trace;
    trace.theta = theta;
    HerdingBelief belief(params, prior);
    for (std::uint64_t i = 1; i <= n; ++i) {
        const Bit s = draw_signal(params, theta, rng);
        const Decision d = belief.decide(s);
        belief.observe(d.action);
        trace.signals.push_back(s);
        trace.actions.push_back(d.action);
        trace.revealed.push_back(d.revealed);
    }
    return trace;
}

}  // namespace herdsim
