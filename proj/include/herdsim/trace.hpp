#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "herdsim/signal_model.hpp"

namespace herdsim {

enum class ProtocolKind { TreeDeterministic, RandomizedReveal, RationalHerding };

/// CLI names: "tree", "randomized", "herding".
std::string_view to_string(ProtocolKind kind) noexcept;
std::optional<ProtocolKind> parse_protocol(std::string_view name) noexcept;

/// One realization of a protocol run. Vectors are indexed by agent - 1.
struct Trace {
    Theta theta = Theta::zero;
    std::vector<Bit> signals;
    std::vector<Bit> actions;
    std::vector<bool> revealed;

    std::size_t size() const noexcept { return signals.size(); }
    bool correct(std::size_t agent) const { return actions.at(agent - 1) == to_bit(theta); }
};

/// Agent i's decision: the action taken and whether it publicly equals the
/// agent's private signal.
struct Decision {
    Bit action;
    bool revealed;

    friend bool operator==(const Decision&, const Decision&) = default;
};

/// Runs n agents of the given protocol on signals from rng. `prior` is the
/// prior P[theta = 1] held by rational-herding agents; ignored otherwise.
Trace run_trace(ProtocolKind kind, const SignalParams& params, Theta theta, std::uint64_t n,
                SeededRng& rng, double prior = 0.5);

}  // namespace herdsim
