#include "herdsim/tree_protocol.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace herdsim {

AgentIndex level_of(std::uint64_t i) {
    if (i == 0) {
        throw std::invalid_argument("agent indices start at 1");
    }
    const auto level = static_cast<unsigned>(std::bit_width(i));
    if (level > kMaxLevel) {
        throw std::invalid_argument("agent index exceeds 2^63 - 1");
    }
    const std::uint64_t first = std::uint64_t{1} << (level - 1);
    return {i, level, i - first};
}

RevealTranscript::RevealTranscript(std::vector<Bit> actions) : actions_(std::move(actions)) {
    for (Bit b : actions_) {
        if (b > 1) throw std::invalid_argument("transcript entries must be 0 or 1");
    }
}

void RevealTranscript::push(Bit action) {
    if (action > 1) throw std::invalid_argument("transcript entries must be 0 or 1");
    actions_.push_back(action);
}

std::span<const Bit> RevealTranscript::prefix(std::size_t len) const {
    if (len > actions_.size()) {
        throw std::invalid_argument("transcript has " + std::to_string(actions_.size()) +
                                    " entries, " + std::to_string(len) + " required");
    }
    return std::span<const Bit>(actions_).first(len);
}

std::uint64_t reveal_index(unsigned level, const RevealTranscript& transcript) {
    if (level == 0 || level > kMaxLevel) {
        throw std::invalid_argument("level must lie in [1, 63]");
    }
    const auto bits = transcript.prefix(level - 1);
    std::uint64_t t = std::uint64_t{1} << (level - 1);
    for (std::size_t j = 0; j < bits.size(); ++j) {
        t += static_cast<std::uint64_t>(bits[j]) << j;
    }
    return t;
}

bool is_revealing(std::uint64_t i, const RevealTranscript& transcript) {
    return reveal_index(level_of(i).level, transcript) == i;
}

Bit threshold_vote(std::uint64_t ones, std::uint64_t count, double q_bar) noexcept {
    const double mean = static_cast<double>(ones) / static_cast<double>(count);
    return mean <= q_bar ? 0 : 1;
}

Bit threshold_rule(std::span<const Bit> observed, double q_bar) {
    if (observed.empty()) {
        throw std::invalid_argument("threshold rule needs at least one observation");
    }
    const auto ones = static_cast<std::uint64_t>(std::count(observed.begin(), observed.end(), Bit{1}));
    return threshold_vote(ones, observed.size(), q_bar);
}

Decision act(std::uint64_t i, const RevealTranscript& transcript, Bit own_signal, double q_bar) {
    const unsigned level = level_of(i).level;
    if (reveal_index(level, transcript) == i) {
        return {own_signal, true};
    }
    const auto seen = transcript.prefix(level - 1);
    const auto ones = static_cast<std::uint64_t>(std::count(seen.begin(), seen.end(), Bit{1}));
    return {threshold_vote(ones + own_signal, level, q_bar), false};
}

RevealTranscript transcript_from_history(std::span<const Bit> actions) {
    RevealTranscript transcript;
    for (unsigned level = 1; level <= kMaxLevel; ++level) {
        const std::uint64_t t = reveal_index(level, transcript);
        if (t > actions.size()) break;
        transcript.push(actions[t - 1]);
    }
    return transcript;
}

Trace run_tree_trace(const SignalParams& params, Theta theta, std::uint64_t n, SeededRng& rng) {
    const double q_bar = derive_params(params).q_bar;
    Trace trace;
    trace.theta = theta;
    trace.signals.reserve(n);
    trace.actions.reserve(n);
    trace.revealed.reserve(n);

    RevealTranscript transcript;
    for (std::uint64_t i = 1; i <= n; ++i) {
        const Bit s = draw_signal(params, theta, rng);
        const Decision d = act(i, transcript, s, q_bar);
        if (d.revealed) transcript.push(d.action);
        trace.signals.push_back(s);
        trace.actions.push_back(d.action);
        trace.revealed.push_back(d.revealed);
    }
    return trace;
}

}  // namespace herdsim
