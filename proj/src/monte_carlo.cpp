#include "herdsim/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "herdsim/baselines.hpp"
#include "herdsim/tree_protocol.hpp"

namespace herdsim {

ThetaMode ThetaMode::with_prior(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("prior must lie in [0, 1]");
    return {Kind::Prior, p};
}

std::string ThetaMode::label() const {
    switch (kind) {
        case Kind::Fixed0: return "fixed0";
        case Kind::Fixed1: return "fixed1";
        case Kind::Prior: return fmt::format("prior({})", prior);
    }
    return "?";
}

Theta draw_theta(const ThetaMode& mode, const SeededRng& rng) noexcept {
    switch (mode.kind) {
        case ThetaMode::Kind::Fixed0: return Theta::zero;
        case ThetaMode::Kind::Fixed1: return Theta::one;
        case ThetaMode::Kind::Prior: break;
    }
    return rng.uniform_at(kThetaCounter) < mode.prior ? Theta::one : Theta::zero;
}

std::vector<std::uint64_t> default_probes(std::uint64_t n) {
    std::vector<std::uint64_t> probes;
    for (std::uint64_t p = 1; p != 0 && p <= n; p <<= 1) probes.push_back(p);
    if (n > 0 && probes.back() != n) probes.push_back(n);
    return probes;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence) {
    if (trials == 0 || successes > trials) {
        throw std::invalid_argument("wilson_interval needs 0 <= successes <= trials, trials >= 1");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("confidence must lie in (0, 1)");
    }
    const double z = boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    double low = std::max(0.0, center - half);
    double high = std::min(1.0, center + half);
    if (successes == 0) low = 0.0;
    if (successes == trials) high = 1.0;
    return {low, high};
}

const ProbeEstimate& EstimateSeries::at(std::uint64_t index) const {
    for (const auto& p : probes) {
        if (p.index == index) return p;
    }
    throw std::out_of_range("index " + std::to_string(index) + " was not probed");
}

namespace {

std::size_t tree_probes(const SignalParams& params, Theta theta, std::span<const std::uint64_t> probes,
                        const SeededRng& rng, std::span<Bit> correct, std::span<Bit> revealed) {
    const double q_bar = derive_params(params).q_bar;
    RevealTranscript transcript;
    for (std::size_t j = 0; j < probes.size(); ++j) {
        const std::uint64_t i = probes[j];
        const unsigned level = level_of(i).level;
        while (transcript.size() + 1 < level) {
            const std::uint64_t t = reveal_index(static_cast<unsigned>(transcript.size() + 1), transcript);
            transcript.push(signal_at(params, theta, rng, t - 1));
        }
        const Decision d = act(i, transcript, signal_at(params, theta, rng, i - 1), q_bar);
        correct[j] = d.action == to_bit(theta);
        revealed[j] = d.revealed;
    }
    return transcript.size();
}

void randomized_probes(const SignalParams& params, Theta theta, std::span<const std::uint64_t> probes,
                       const SeededRng& rng, std::span<Bit> correct, std::span<Bit> revealed) {
    const double q_bar = derive_params(params).q_bar;
    std::uint64_t ones = 0;
    std::uint64_t count = 0;
    std::size_t next = 0;
    for (std::uint64_t i = 1; next < probes.size(); ++i) {
        const bool reveals = rng.uniform_at(2 * (i - 1) + 1) < 1.0 / static_cast<double>(i);
        const bool probed = probes[next] == i;
        if (!reveals && !probed) continue;
        const Bit s = signal_at(params, theta, rng, 2 * (i - 1));
        if (probed) {
            const Bit action = reveals ? s : threshold_vote(ones + s, count + 1, q_bar);
            correct[next] = action == to_bit(theta);
            revealed[next] = reveals;
            ++next;
        }
        if (reveals) {
            ones += s;
            ++count;
        }
    }
}

void herding_probes(const SignalParams& params, Theta theta, std::span<const std::uint64_t> probes,
                    const SeededRng& rng, double prior, std::span<Bit> correct, std::span<Bit> revealed) {
    HerdingBelief belief(params, prior);
    std::size_t next = 0;
    for (std::uint64_t i = 1; next < probes.size(); ++i) {
        if (const auto cascade = belief.cascade_action()) {
            // Frozen belief: every remaining agent copies the cascade.
            for (; next < probes.size(); ++next) {
                correct[next] = *cascade == to_bit(theta);
                revealed[next] = 0;
            }
            break;
        }
        const Decision d = belief.decide(signal_at(params, theta, rng, i - 1));
        if (probes[next] == i) {
            correct[next] = d.action == to_bit(theta);
            revealed[next] = d.revealed;
            ++next;
        }
        belief.observe(d.action);
    }
}

}  // namespace

std::size_t simulate_probes(ProtocolKind kind, const SignalParams& params, Theta theta,
                            std::span<const std::uint64_t> probes, const SeededRng& rng, double prior,
                            std::span<Bit> correct, std::span<Bit> revealed) {
    switch (kind) {
        case ProtocolKind::TreeDeterministic:
            return tree_probes(params, theta, probes, rng, correct, revealed);
        case ProtocolKind::RandomizedReveal:
            randomized_probes(params, theta, probes, rng, correct, revealed);
            return 0;
        case ProtocolKind::RationalHerding:
            herding_probes(params, theta, probes, rng, prior, correct, revealed);
            return 0;
    }
    return 0;
}

EstimateSeries run_trials(const TrialConfig& config) {
    if (config.trials == 0) throw std::invalid_argument("trials must be at least 1");
    if (config.n == 0) throw std::invalid_argument("n must be at least 1");
    std::vector<std::uint64_t> probes = config.probes.empty() ? default_probes(config.n) : config.probes;
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
    if (probes.front() == 0 || probes.back() > config.n) {
        throw std::invalid_argument("probe indices must lie in [1, n]");
    }

    unsigned workers = config.workers == 0 ? std::max(1U, std::thread::hardware_concurrency())
                                           : config.workers;
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, config.trials));

    const std::size_t m = probes.size();
    std::vector<std::vector<std::uint64_t>> correct_counts(workers, std::vector<std::uint64_t>(m, 0));
    std::vector<std::vector<std::uint64_t>> reveal_counts(workers, std::vector<std::uint64_t>(m, 0));
    const double agent_prior = config.theta_mode.agent_prior();

    auto work = [&](unsigned w) {
        const std::uint64_t begin = config.trials * w / workers;
        const std::uint64_t end = config.trials * (w + 1) / workers;
        std::vector<Bit> correct(m);
        std::vector<Bit> revealed(m);
        for (std::uint64_t t = begin; t < end; ++t) {
            const SeededRng rng(config.seed, t);
            const Theta theta = draw_theta(config.theta_mode, rng);
            simulate_probes(config.protocol, config.params, theta, probes, rng, agent_prior, correct,
                            revealed);
            for (std::size_t j = 0; j < m; ++j) {
                correct_counts[w][j] += correct[j];
                reveal_counts[w][j] += revealed[j];
            }
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    EstimateSeries series{config.protocol, config.theta_mode, config.trials, config.seed, {}};
    series.probes.reserve(m);
    const double trials = static_cast<double>(config.trials);
    for (std::size_t j = 0; j < m; ++j) {
        std::uint64_t correct = 0;
        std::uint64_t revealed = 0;
        for (unsigned w = 0; w < workers; ++w) {
            correct += correct_counts[w][j];
            revealed += reveal_counts[w][j];
        }
        const Interval p_ci = wilson_interval(correct, config.trials, kDefaultConfidence);
        const Interval r_ci = wilson_interval(revealed, config.trials, kDefaultConfidence);
        series.probes.push_back({probes[j], correct, revealed, static_cast<double>(correct) / trials, p_ci,
                                 (p_ci.high - p_ci.low) / 2.0, static_cast<double>(revealed) / trials,
                                 r_ci, (r_ci.high - r_ci.low) / 2.0});
    }
    return series;
}

}  // namespace herdsim
