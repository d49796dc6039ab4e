#pragma once

// State of nature, Bernoulli signal model, derived constants and the
// counter-based random stream every simulation draws from.

#include <cstdint>
#include <string_view>

namespace herdsim {

/// A single binary signal or action.
using Bit = std::uint8_t;

enum class Theta : std::uint8_t { zero = 0, one = 1 };

constexpr Bit to_bit(Theta theta) noexcept { return static_cast<Bit>(theta); }
constexpr Theta theta_from_bit(Bit b) noexcept { return b ? Theta::one : Theta::zero; }
std::string_view to_string(Theta theta) noexcept;

/// Success parameters of the two signal distributions. D0 emits 1 with
/// probability q0, D1 with probability q1. Construction enforces
/// 0 < q0 < q1 < 1.
class SignalParams {
public:
    SignalParams(double q0, double q1);

    double q0() const noexcept { return q0_; }
    double q1() const noexcept { return q1_; }

    /// P[s = 1 | theta]
    double q(Theta theta) const noexcept { return theta == Theta::one ? q1_ : q0_; }

    friend bool operator==(const SignalParams&, const SignalParams&) = default;

private:
    double q0_;
    double q1_;
};

struct DerivedParams {
    /// Largest epsilon satisfying eps <= q0, q1 <= 1 - eps, q1 - q0 >= 2 eps.
    double epsilon_star;
    /// Decision threshold (q0 + q1) / 2.
    double q_bar;
};

DerivedParams derive_params(const SignalParams& params);

/// P[s = theta | theta]: q1 for theta = 1, 1 - q0 for theta = 0.
double signal_match_prob(const SignalParams& params, Theta theta) noexcept;

/// P[s = bit | theta].
double signal_prob(const SignalParams& params, Theta theta, Bit bit) noexcept;

/// Counter-based stream keyed by (seed, stream_id). Output at counter c is
/// a pure function of (seed, stream_id, c), so streams can be read
/// sequentially or by random access and replay identically under any
/// execution order.
class SeededRng {
public:
    SeededRng(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    /// Number of steps consumed by the sequential interface.
    std::uint64_t position() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept { return u64_at(counter_++); }
    double next_uniform() noexcept { return uniform_at(counter_++); }

    std::uint64_t u64_at(std::uint64_t counter) const noexcept;
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform_at(std::uint64_t counter) const noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Draws s ~ D_theta; consumes exactly one step of rng.
Bit draw_signal(const SignalParams& params, Theta theta, SeededRng& rng) noexcept;

/// The signal draw_signal would return if rng were positioned at counter.
Bit signal_at(const SignalParams& params, Theta theta, const SeededRng& rng,
              std::uint64_t counter) noexcept;

}  // namespace herdsim
