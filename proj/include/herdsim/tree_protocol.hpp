#pragma once

// The deterministic tree-reveal protocol.
//
// Agents are laid out level by level on a complete binary tree: level k
// holds indices [2^(k-1), 2^k). Exactly one agent per level reveals her
// signal; which one is chosen by the signals already revealed, read as a
// binary number with the first revealer as the least-significant bit:
//
//     t_k = sum_{j=1}^{k-1} a_{t_j} * 2^(j-1) + 2^(k-1)
//
// Every other agent at level k votes with the threshold rule over the k-1
// revealed signals plus her own.

#include <cstdint>
#include <span>
#include <vector>

#include "herdsim/signal_model.hpp"
#include "herdsim/trace.hpp"

namespace herdsim {

/// Deepest level an AgentIndex can describe (indices fit in 63 bits).
inline constexpr unsigned kMaxLevel = 63;

struct AgentIndex {
    std::uint64_t index;
    unsigned level;        // 2^(level-1) <= index < 2^level
    std::uint64_t offset;  // index - 2^(level-1)

    friend bool operator==(const AgentIndex&, const AgentIndex&) = default;
};

/// Throws std::invalid_argument for i == 0 or i >= 2^63.
AgentIndex level_of(std::uint64_t i);

/// Actions of the revealing agents in order: entry j-1 is a_{t_j}.
class RevealTranscript {
public:
    RevealTranscript() = default;
    explicit RevealTranscript(std::vector<Bit> actions);

    void push(Bit action);
    std::size_t size() const noexcept { return actions_.size(); }
    Bit operator[](std::size_t j) const { return actions_[j]; }
    std::span<const Bit> prefix(std::size_t len) const;
    std::span<const Bit> actions() const noexcept { return actions_; }

    friend bool operator==(const RevealTranscript&, const RevealTranscript&) = default;

private:
    std::vector<Bit> actions_;
};

/// t_k from the first k-1 transcript entries. Throws std::invalid_argument
/// if the transcript is too short or k is outside [1, kMaxLevel].
std::uint64_t reveal_index(unsigned level, const RevealTranscript& transcript);

bool is_revealing(std::uint64_t i, const RevealTranscript& transcript);

/// Vote on `ones` successes out of `count` samples: 0 when the empirical
/// mean is at most q_bar, otherwise 1.
Bit threshold_vote(std::uint64_t ones, std::uint64_t count, double q_bar) noexcept;

/// threshold_vote over an explicit sample. Throws on empty input.
Bit threshold_rule(std::span<const Bit> observed, double q_bar);

/// Strategy of agent i given the transcript of levels < level_of(i).
Decision act(std::uint64_t i, const RevealTranscript& transcript, Bit own_signal, double q_bar);

/// Rebuilds the transcript from a full action history a_1..a_m by following
/// t_1, t_2, ... through the history.
RevealTranscript transcript_from_history(std::span<const Bit> actions);

/// Agent i's signal is drawn at rng step i-1.
Trace run_tree_trace(const SignalParams& params, Theta theta, std::uint64_t n, SeededRng& rng);

}  // namespace herdsim
