#include "herdsim/trace.hpp"

#include "herdsim/baselines.hpp"
#include "herdsim/tree_protocol.hpp"

namespace herdsim {

std::string_view to_string(ProtocolKind kind) noexcept {
    switch (kind) {
        case ProtocolKind::TreeDeterministic: return "tree";
        case ProtocolKind::RandomizedReveal: return "randomized";
        case ProtocolKind::RationalHerding: return "herding";
    }
    return "?";
}

std::optional<ProtocolKind> parse_protocol(std::string_view name) noexcept {
    if (name == "tree") return ProtocolKind::TreeDeterministic;
    if (name == "randomized") return ProtocolKind::RandomizedReveal;
    if (name == "herding") return ProtocolKind::RationalHerding;
    return std::nullopt;
}

Trace run_trace(ProtocolKind kind, const SignalParams& params, Theta theta, std::uint64_t n,
                SeededRng& rng, double prior) {
    switch (kind) {
        case ProtocolKind::TreeDeterministic: return run_tree_trace(params, theta, n, rng);
        case ProtocolKind::RandomizedReveal: return run_randomized_trace(params, theta, n, rng);
        case ProtocolKind::RationalHerding: return run_herding_trace(params, theta, n, prior, rng);
    }
    return {};
}

}  // namespace herdsim
