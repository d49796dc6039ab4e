#include "herdsim/exact_oracle.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "herdsim/baselines.hpp"
#include "herdsim/tree_protocol.hpp"

namespace herdsim {

namespace {

// Distribution of the number of ones among k samples from D_theta.
std::vector<double> count_distribution(unsigned k, double q) {
    std::vector<double> dist(k + 1, 0.0);
    dist[0] = 1.0;
    for (unsigned m = 1; m <= k; ++m) {
        for (unsigned c = m; c > 0; --c) {
            dist[c] = dist[c] * (1.0 - q) + dist[c - 1] * q;
        }
        dist[0] *= 1.0 - q;
    }
    return dist;
}

double vote_error_from(const std::vector<double>& dist, unsigned k, double q_bar, Theta theta) {
    double err = 0.0;
    for (unsigned c = 0; c <= k; ++c) {
        if (threshold_vote(c, k, q_bar) != to_bit(theta)) err += dist[c];
    }
    return err;
}

struct Accumulator {
    std::vector<double> reveal;
    std::vector<double> correct;
};

template <class State, class Step>
void enumerate_from(const State& state, std::uint64_t i, std::uint64_t n, double weight,
                    const SignalParams& params, Theta theta, Accumulator& acc, const Step& step) {
    for (Bit s = 0; s <= 1; ++s) {
        const double w = weight * signal_prob(params, theta, s);
        State next = state;
        const Decision d = step(next, i, s);
        if (d.revealed) acc.reveal[i - 1] += w;
        if (d.action == to_bit(theta)) acc.correct[i - 1] += w;
        if (i < n) enumerate_from(next, i + 1, n, w, params, theta, acc, step);
    }
}

}  // namespace

std::string_view to_string(ExactMethod method) noexcept {
    return method == ExactMethod::TreeClosedForm ? "tree_closed_form" : "full_enumeration";
}

double tree_reveal_prob(std::uint64_t n, const SignalParams& params, Theta theta) {
    const AgentIndex idx = level_of(n);
    double p = 1.0;
    for (unsigned j = 0; j + 1 < idx.level; ++j) {
        p *= signal_prob(params, theta, static_cast<Bit>((idx.offset >> j) & 1U));
    }
    return p;
}

double tree_correct_prob(std::uint64_t n, const SignalParams& params, Theta theta) {
    const AgentIndex idx = level_of(n);
    if (idx.level > kDirectSumMaxLevel) {
        throw std::invalid_argument("direct summation supports levels up to " +
                                    std::to_string(kDirectSumMaxLevel));
    }
    const unsigned k = idx.level;
    const double q = params.q(theta);
    const double q_bar = derive_params(params).q_bar;
    const Bit target = to_bit(theta);

    std::vector<double> prefix_prob(k);  // indexed by popcount of x
    for (unsigned c = 0; c < k; ++c) {
        prefix_prob[c] = std::pow(q, c) * std::pow(1.0 - q, k - 1 - c);
    }

    double total = 0.0;
    const std::uint64_t prefixes = std::uint64_t{1} << (k - 1);
    for (std::uint64_t x = 0; x < prefixes; ++x) {
        const auto ones = static_cast<unsigned>(std::popcount(x));
        double conditional;
        if (x == idx.offset) {
            conditional = signal_match_prob(params, theta);
        } else {
            conditional = 0.0;
            for (Bit s = 0; s <= 1; ++s) {
                if (threshold_vote(ones + s, k, q_bar) == target) {
                    conditional += signal_prob(params, theta, s);
                }
            }
        }
        total += prefix_prob[ones] * conditional;
    }
    return total;
}

double vote_misclassification(unsigned k, const SignalParams& params, Theta theta) {
    if (k == 0) throw std::invalid_argument("vote needs at least one sample");
    return vote_error_from(count_distribution(k, params.q(theta)), k, derive_params(params).q_bar,
                           theta);
}

TreeLevelTable::TreeLevelTable(const SignalParams& params, Theta theta, unsigned max_level)
    : params_(params),
      theta_(theta),
      max_level_(max_level),
      q_bar_(derive_params(params).q_bar),
      vote_error_(max_level + 1, 0.0) {
    if (max_level == 0 || max_level > kMaxLevel) {
        throw std::invalid_argument("max_level must lie in [1, 63]");
    }
    const double q = params.q(theta);
    // Reuse one running distribution so the whole table costs O(max_level^2).
    std::vector<double> dist{1.0};
    for (unsigned k = 1; k <= max_level; ++k) {
        dist.push_back(0.0);
        for (unsigned c = k; c > 0; --c) {
            dist[c] = dist[c] * (1.0 - q) + dist[c - 1] * q;
        }
        dist[0] *= 1.0 - q;
        vote_error_[k] = vote_error_from(dist, k, q_bar_, theta);
    }
}

double TreeLevelTable::vote_error(unsigned level) const {
    if (level == 0 || level > max_level_) throw std::out_of_range("level outside table");
    return vote_error_[level];
}

double TreeLevelTable::reveal_prob(std::uint64_t n) const {
    return tree_reveal_prob(n, params_, theta_);
}

double TreeLevelTable::own_vote_correct(std::uint64_t ones, unsigned level) const noexcept {
    double p = 0.0;
    for (Bit s = 0; s <= 1; ++s) {
        if (threshold_vote(ones + s, level, q_bar_) == to_bit(theta_)) {
            p += signal_prob(params_, theta_, s);
        }
    }
    return p;
}

double TreeLevelTable::correct_prob(std::uint64_t n) const {
    const AgentIndex idx = level_of(n);
    if (idx.level > max_level_) throw std::out_of_range("agent beyond table depth");
    // Every prefix votes except the one that selects n; swap that prefix's
    // vote contribution for the revealed signal.
    const double on_path = reveal_prob(n);
    const auto ones = static_cast<std::uint64_t>(std::popcount(idx.offset));
    const double vote_ok = 1.0 - vote_error_[idx.level];
    return vote_ok + on_path * (signal_match_prob(params_, theta_) - own_vote_correct(ones, idx.level));
}

ExactResult TreeLevelTable::result(std::uint64_t n) const {
    return {n, theta_, reveal_prob(n), correct_prob(n), ExactMethod::TreeClosedForm};
}

std::vector<ExactResult> full_enumeration(ProtocolKind kind, const SignalParams& params, Theta theta,
                                          std::uint64_t n, double prior, unsigned cap) {
    if (n == 0) throw std::invalid_argument("n must be at least 1");
    if (n > cap) {
        throw CapExceeded("full enumeration of " + std::to_string(n) + " agents exceeds cap " +
                          std::to_string(cap));
    }
    Accumulator acc{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};

    switch (kind) {
        case ProtocolKind::TreeDeterministic: {
            const double q_bar = derive_params(params).q_bar;
            auto step = [q_bar](RevealTranscript& tr, std::uint64_t i, Bit s) {
                const Decision d = act(i, tr, s, q_bar);
                if (d.revealed) tr.push(d.action);
                return d;
            };
            enumerate_from(RevealTranscript{}, 1, n, 1.0, params, theta, acc, step);
            break;
        }
        case ProtocolKind::RationalHerding: {
            auto step = [](HerdingBelief& belief, std::uint64_t, Bit s) {
                const Decision d = belief.decide(s);
                belief.observe(d.action);
                return d;
            };
            enumerate_from(HerdingBelief(params, prior), 1, n, 1.0, params, theta, acc, step);
            break;
        }
        case ProtocolKind::RandomizedReveal:
            throw std::invalid_argument("the randomized protocol has no signal-only enumeration");
    }

    std::vector<ExactResult> out;
    out.reserve(n);
    for (std::uint64_t i = 1; i <= n; ++i) {
        out.push_back({i, theta, acc.reveal[i - 1], acc.correct[i - 1], ExactMethod::FullEnumeration});
    }
    return out;
}

double prior_weighted(double p0, double p1, double prior) noexcept {
    return (1.0 - prior) * p0 + prior * p1;
}

}  // namespace herdsim
