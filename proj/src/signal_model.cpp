#include "herdsim/signal_model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace herdsim {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::string_view to_string(Theta theta) noexcept {
    return theta == Theta::one ? "1" : "0";
}

SignalParams::SignalParams(double q0, double q1) : q0_(q0), q1_(q1) {
    // Negated comparisons also reject NaN.
    if (!(q0 > 0.0) || !(q1 < 1.0) || !(q0 < q1)) {
        throw std::invalid_argument("signal parameters must satisfy 0 < q0 < q1 < 1 (got q0=" +
                                    std::to_string(q0) + ", q1=" + std::to_string(q1) + ")");
    }
}

DerivedParams derive_params(const SignalParams& params) {
    const double q0 = params.q0();
    const double q1 = params.q1();
    return {std::min({q0, 1.0 - q1, (q1 - q0) / 2.0}), (q0 + q1) / 2.0};
}

double signal_match_prob(const SignalParams& params, Theta theta) noexcept {
    return theta == Theta::one ? params.q1() : 1.0 - params.q0();
}

double signal_prob(const SignalParams& params, Theta theta, Bit bit) noexcept {
    const double q = params.q(theta);
    return bit ? q : 1.0 - q;
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_id_(stream_id), key_(mix64(mix64(seed + kGolden) ^ mix64(~stream_id))) {}

std::uint64_t SeededRng::u64_at(std::uint64_t counter) const noexcept {
    return mix64(key_ + (counter + 1) * kGolden);
}

double SeededRng::uniform_at(std::uint64_t counter) const noexcept {
    return static_cast<double>(u64_at(counter) >> 11) * 0x1.0p-53;
}

Bit draw_signal(const SignalParams& params, Theta theta, SeededRng& rng) noexcept {
    return rng.next_uniform() < params.q(theta) ? 1 : 0;
}

Bit signal_at(const SignalParams& params, Theta theta, const SeededRng& rng,
              std::uint64_t counter) noexcept {
    return rng.uniform_at(counter) < params.q(theta) ? 1 : 0;
}

}  // namespace herdsim
