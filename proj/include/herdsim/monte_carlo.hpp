#pragma once

// Trial engine. Trial t reads only SeededRng(seed, t), and per-probe counts
// are integers summed after all workers finish, so results do not depend on
// the number of workers or their schedule.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "herdsim/signal_model.hpp"
#include "herdsim/trace.hpp"

namespace herdsim {

struct ThetaMode {
    enum class Kind { Fixed0, Fixed1, Prior };

    Kind kind = Kind::Fixed1;
    double prior = 0.5;  // P[theta = 1]; used by Prior

    static ThetaMode fixed(Theta theta) noexcept {
        return {theta == Theta::one ? Kind::Fixed1 : Kind::Fixed0, 0.5};
    }
    static ThetaMode with_prior(double p);

    /// "fixed0", "fixed1" or "prior(<p>)".
    std::string label() const;
    /// Prior belief of rational agents: the true prior in Prior mode, else 1/2.
    double agent_prior() const noexcept { return kind == Kind::Prior ? prior : 0.5; }
};

/// Rng step reserved for the per-trial theta draw in Prior mode.
inline constexpr std::uint64_t kThetaCounter = std::uint64_t{1} << 63;

Theta draw_theta(const ThetaMode& mode, const SeededRng& rng) noexcept;

/// Powers of two up to n, plus n itself.
std::vector<std::uint64_t> default_probes(std::uint64_t n);

struct TrialConfig {
    ProtocolKind protocol = ProtocolKind::TreeDeterministic;
    SignalParams params{0.4, 0.6};
    ThetaMode theta_mode{};
    std::uint64_t n = 4096;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> probes;  // empty: default_probes(n)
    unsigned workers = 1;               // 0: hardware concurrency
};

struct Interval {
    double low;
    double high;
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence);

struct ProbeEstimate {
    std::uint64_t index;
    std::uint64_t correct;   // trials with a_index == theta
    std::uint64_t revealed;  // trials where agent `index` revealed
    double p_hat;
    Interval p_ci;
    double ci_half_width;
    double reveal_hat;
    Interval reveal_ci;
    double reveal_ci_half_width;
};

struct EstimateSeries {
    ProtocolKind protocol;
    ThetaMode theta_mode;
    std::uint64_t trials;
    std::uint64_t seed;
    std::vector<ProbeEstimate> probes;

    const ProbeEstimate& at(std::uint64_t index) const;
};

inline constexpr double kDefaultConfidence = 0.95;

EstimateSeries run_trials(const TrialConfig& config);

/// One trial restricted to the sorted probe indices: writes a_p == theta and
/// the reveal flag of each probe. Draws the same signals run_trace would for
/// the same rng. Returns the transcript length kept for the tree protocol
/// (0 for the baselines, which keep O(1) counters).
std::size_t simulate_probes(ProtocolKind kind, const SignalParams& params, Theta theta,
                            std::span<const std::uint64_t> probes, const SeededRng& rng, double prior,
                            std::span<Bit> correct, std::span<Bit> revealed);

}  // namespace herdsim
