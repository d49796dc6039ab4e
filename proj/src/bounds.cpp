#include "herdsim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "herdsim/exact_oracle.hpp"
#include "herdsim/monte_carlo.hpp"
#include "herdsim/tree_protocol.hpp"

namespace herdsim {

namespace {

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2]");
}

void require_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("agent indices start at 1");
}

}  // namespace

double reveal_bound(std::uint64_t n, double epsilon) {
    require_index(n);
    require_epsilon(epsilon);
    return std::pow(static_cast<double>(n), -epsilon);
}

double stricter_reveal_bound(std::uint64_t n, double epsilon) {
    require_index(n);
    require_epsilon(epsilon);
    return std::pow(static_cast<double>(n), -epsilon * std::numbers::log2e);
}

double correctness_bound(std::uint64_t n, double epsilon) {
    require_index(n);
    require_epsilon(epsilon);
    return 1.0 - 2.0 * std::pow(static_cast<double>(n), -epsilon * epsilon);
}

ChernoffCheck chernoff_check(unsigned k, double epsilon) {
    if (k == 0 || k > kMaxLevel) throw std::invalid_argument("level must lie in [1, 63]");
    require_epsilon(epsilon);
    const double eps2 = epsilon * epsilon;
    const double bound = std::exp(-2.0 * k * eps2);
    const double last_index = std::ldexp(1.0, static_cast<int>(k)) - 1.0;
    const double weakest = std::pow(last_index, -eps2);
    return {bound, weakest, bound <= weakest};
}

std::string_view to_string(CheckKind kind) noexcept {
    switch (kind) {
        case CheckKind::Correctness: return "correctness";
        case CheckKind::Reveal: return "reveal";
        case CheckKind::Chernoff: return "chernoff";
    }
    return "?";
}

double BoundReport::bound() const noexcept {
    switch (check) {
        case CheckKind::Correctness: return correct_bound;
        case CheckKind::Reveal: return reveal_bound;
        case CheckKind::Chernoff: return chernoff_bound;
    }
    return 0.0;
}

BoundReport make_report(CheckKind check, std::uint64_t n, Theta theta, double epsilon, double value,
                        double slack) {
    BoundReport r{check,
                  n,
                  theta,
                  epsilon,
                  reveal_bound(n, epsilon),
                  correctness_bound(n, epsilon),
                  chernoff_check(level_of(n).level, epsilon).bound,
                  value,
                  slack,
                  false,
                  false};
    switch (check) {
        case CheckKind::Correctness:
            r.vacuous = r.correct_bound <= 0.0;
            r.satisfied = r.vacuous || value >= r.correct_bound - slack;
            break;
        case CheckKind::Reveal:
            r.vacuous = r.reveal_bound >= 1.0;
            r.satisfied = r.vacuous || value <= r.reveal_bound + slack;
            break;
        case CheckKind::Chernoff:
            r.vacuous = r.chernoff_bound >= 1.0;
            r.satisfied = r.vacuous || value <= r.chernoff_bound + slack;
            break;
    }
    return r;
}

std::vector<BoundReport> verify(const VerifyConfig& config) {
    if (config.n_max == 0) throw std::invalid_argument("n_max must be at least 1");
    const std::vector<std::uint64_t> probes =
        config.probes.empty() ? default_probes(config.n_max) : config.probes;
    for (auto p : probes) {
        if (p == 0 || p > config.n_max) throw std::invalid_argument("probe indices must lie in [1, n_max]");
    }
    const double eps_star = derive_params(config.params).epsilon_star;

    std::vector<BoundReport> reports;
    auto add_all = [&](CheckKind check, std::uint64_t n, Theta theta, double value, double slack) {
        for (double scale : config.epsilon_scales) {
            reports.push_back(make_report(check, n, theta, eps_star * scale, value, slack));
        }
    };

    for (Theta theta : {Theta::zero, Theta::one}) {
        if (config.mode == VerifyMode::MonteCarlo) {
            TrialConfig tc;
            tc.protocol = config.protocol;
            tc.params = config.params;
            tc.theta_mode = ThetaMode::fixed(theta);
            tc.n = config.n_max;
            tc.trials = config.trials;
            tc.seed = config.seed;
            tc.probes = probes;
            tc.workers = config.workers;
            const EstimateSeries series = run_trials(tc);
            for (const auto& est : series.probes) {
                add_all(CheckKind::Correctness, est.index, theta, est.p_hat, est.ci_half_width);
                add_all(CheckKind::Reveal, est.index, theta, est.reveal_hat, est.reveal_ci_half_width);
            }
            continue;
        }

        switch (config.protocol) {
            case ProtocolKind::TreeDeterministic: {
                std::uint64_t deepest = 1;
                for (auto p : probes) deepest = std::max(deepest, p);
                const TreeLevelTable table(config.params, theta, level_of(deepest).level);
                for (auto n : probes) {
                    add_all(CheckKind::Correctness, n, theta, table.correct_prob(n), 0.0);
                    add_all(CheckKind::Reveal, n, theta, table.reveal_prob(n), 0.0);
                    add_all(CheckKind::Chernoff, n, theta, table.vote_error(level_of(n).level), 0.0);
                }
                break;
            }
            case ProtocolKind::RationalHerding: {
                const auto exact = full_enumeration(config.protocol, config.params, theta, config.n_max,
                                                    config.prior, config.enumeration_cap);
                for (auto n : probes) {
                    add_all(CheckKind::Correctness, n, theta, exact[n - 1].p_correct, 0.0);
                    add_all(CheckKind::Reveal, n, theta, exact[n - 1].p_reveal, 0.0);
                }
                break;
            }
            case ProtocolKind::RandomizedReveal:
                throw std::invalid_argument("exact verification is unavailable for the randomized protocol");
        }
    }
    return reports;
}

VerifySummary summarize(const std::vector<BoundReport>& reports) noexcept {
    VerifySummary s;
    for (const auto& r : reports) {
        ++s.total;
        if (r.vacuous) ++s.vacuous;
        if (!r.satisfied) ++s.violations;
    }
    return s;
}

}  // namespace herdsim
