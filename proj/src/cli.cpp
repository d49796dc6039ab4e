#include "herdsim/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "herdsim/bounds.hpp"
#include "herdsim/exact_oracle.hpp"
#include "herdsim/monte_carlo.hpp"
#include "herdsim/series_io.hpp"
#include "herdsim/tree_protocol.hpp"

namespace herdsim::cli {

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Options {
    std::string protocol = "tree";
    std::vector<std::string> protocols{"tree", "herding"};
    double q0 = 0.4;
    double q1 = 0.6;
    std::uint64_t n = 4096;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    std::string theta = "1";
    double prior = 0.5;
    std::vector<std::uint64_t> probes;
    std::string format = "csv";
    std::string output;
    std::string mode = "exact";
    std::string method = "auto";
    unsigned cap = kDefaultEnumerationCap;
};

// Validated run configuration shared by all commands.
struct RunConfig {
    ProtocolKind protocol;
    SignalParams params;
    std::uint64_t n;
    std::uint64_t trials;
    std::uint64_t seed;
    ThetaMode theta_mode;
    std::vector<std::uint64_t> probes;
    unsigned cap;
    unsigned workers;
};

ProtocolKind protocol_or_throw(const std::string& name) {
    const auto kind = parse_protocol(name);
    if (!kind) throw UsageError("unknown protocol '" + name + "'");
    return *kind;
}

RunConfig make_config(const Options& o) {
    std::optional<SignalParams> params;
    try {
        params.emplace(o.q0, o.q1);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (o.n == 0) throw UsageError("--n must be at least 1");
    if (o.trials == 0) throw UsageError("--trials must be at least 1");

    ThetaMode theta_mode;
    if (o.theta == "0") {
        theta_mode = ThetaMode::fixed(Theta::zero);
    } else if (o.theta == "1") {
        theta_mode = ThetaMode::fixed(Theta::one);
    } else {
        if (!(o.prior > 0.0 && o.prior < 1.0)) throw UsageError("--prior must lie in (0, 1)");
        theta_mode = ThetaMode::with_prior(o.prior);
    }

    std::vector<std::uint64_t> probes = o.probes.empty() ? default_probes(o.n) : o.probes;
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
    if (probes.front() == 0 || probes.back() > o.n) throw UsageError("--probes must lie in [1, n]");

    unsigned workers;
    try {
        workers = workers_from_env();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return {protocol_or_throw(o.protocol), *params, o.n, o.trials, o.seed, theta_mode, std::move(probes),
            o.cap, workers};
}

nlohmann::ordered_json config_json(const RunConfig& c, bool with_trials) {
    nlohmann::ordered_json j;
    j["protocol"] = std::string(to_string(c.protocol));
    j["q0"] = c.params.q0();
    j["q1"] = c.params.q1();
    j["n"] = c.n;
    if (with_trials) {
        j["trials"] = c.trials;
        j["seed"] = c.seed;
    }
    j["theta_mode"] = c.theta_mode.label();
    j["probes"] = c.probes;
    return j;
}

TrialConfig trial_config(const RunConfig& c, ProtocolKind kind) {
    TrialConfig tc;
    tc.protocol = kind;
    tc.params = c.params;
    tc.theta_mode = c.theta_mode;
    tc.n = c.n;
    tc.trials = c.trials;
    tc.seed = c.seed;
    tc.probes = c.probes;
    tc.workers = c.workers;
    return tc;
}

bool row_satisfied(std::uint64_t n, double epsilon, double p, double p_slack, double reveal,
                   double reveal_slack) {
    return make_report(CheckKind::Correctness, n, Theta::one, epsilon, p, p_slack).satisfied &&
           make_report(CheckKind::Reveal, n, Theta::one, epsilon, reveal, reveal_slack).satisfied;
}

void emit_series(std::ostream& out, const Options& o, const std::string& command, const RunConfig& c,
                 const std::vector<SeriesRow>& rows, bool with_trials) {
    if (o.format == "json") {
        write_json(out, command, config_json(c, with_trials), rows);
    } else {
        write_csv(out, rows);
    }
}

std::vector<SeriesRow> simulate_rows(const RunConfig& c) {
    const double eps = derive_params(c.params).epsilon_star;
    const EstimateSeries series = run_trials(trial_config(c, c.protocol));
    std::vector<SeriesRow> rows;
    for (const auto& est : series.probes) {
        rows.push_back({est.index, c.theta_mode.label(), est.p_hat, est.p_ci.low, est.p_ci.high, est.reveal_hat,
                        reveal_bound(est.index, eps), correctness_bound(est.index, eps),
                        row_satisfied(est.index, eps, est.p_hat, est.ci_half_width, est.reveal_hat,
                                      est.reveal_ci_half_width),
                        "monte_carlo"});
    }
    return rows;
}

// Exact per-theta results at the configured probes, or nullopt when the
// protocol has no exact route at this size.
struct ExactSeries {
    std::vector<ExactResult> theta0;
    std::vector<ExactResult> theta1;
};

ExactSeries exact_series(const RunConfig& c, ProtocolKind kind, const std::string& method) {
    if (kind == ProtocolKind::RandomizedReveal) {
        throw UsageError("the randomized protocol has no exact oracle; use simulate");
    }
    bool closed_form = kind == ProtocolKind::TreeDeterministic;
    if (method == "closed-form" && kind != ProtocolKind::TreeDeterministic) {
        throw UsageError("closed-form exact results exist only for the tree protocol");
    }
    if (method == "enumeration") closed_form = false;

    ExactSeries out;
    for (Theta theta : {Theta::zero, Theta::one}) {
        auto& dst = theta == Theta::zero ? out.theta0 : out.theta1;
        if (closed_form) {
            const TreeLevelTable table(c.params, theta, level_of(c.probes.back()).level);
            for (auto n : c.probes) dst.push_back(table.result(n));
        } else {
            const auto all = full_enumeration(kind, c.params, theta, c.n, c.theta_mode.agent_prior(), c.cap);
            for (auto n : c.probes) dst.push_back(all[n - 1]);
        }
    }
    return out;
}

std::vector<SeriesRow> exact_rows(const RunConfig& c, const std::string& method) {
    const double eps = derive_params(c.params).epsilon_star;
    const ExactSeries ex = exact_series(c, c.protocol, method);
    std::vector<SeriesRow> rows;
    auto push = [&](std::uint64_t n, const std::string& label, double p, double reveal, ExactMethod m) {
        rows.push_back({n, label, p, p, p, reveal, reveal_bound(n, eps), correctness_bound(n, eps),
                        row_satisfied(n, eps, p, 0.0, reveal, 0.0), std::string(to_string(m))});
    };
    for (std::size_t j = 0; j < c.probes.size(); ++j) {
        const auto& r0 = ex.theta0[j];
        const auto& r1 = ex.theta1[j];
        push(r0.n, "fixed0", r0.p_correct, r0.p_reveal, r0.method);
        push(r1.n, "fixed1", r1.p_correct, r1.p_reveal, r1.method);
        if (c.theta_mode.kind == ThetaMode::Kind::Prior) {
            const double w = c.theta_mode.prior;
            push(r0.n, c.theta_mode.label(), prior_weighted(r0.p_correct, r1.p_correct, w),
                 prior_weighted(r0.p_reveal, r1.p_reveal, w), r0.method);
        }
    }
    return rows;
}

void write_verify_table(std::ostream& out, const std::vector<BoundReport>& reports) {
    out << fmt::format("{:<12} {:>10} {:>5} {:>9} {:>12} {:>12} {:>10}  {}\n", "check", "n", "theta",
                       "epsilon", "value", "bound", "slack", "status");
    for (const auto& r : reports) {
        const char* status = r.vacuous ? "vacuous" : (r.satisfied ? "ok" : "VIOLATED");
        out << fmt::format("{:<12} {:>10} {:>5} {:>9.6f} {:>12.6e} {:>12.6e} {:>10.3e}  {}\n",
                           to_string(r.check), r.n, to_string(r.theta), r.epsilon, r.value, r.bound(), r.slack,
                           status);
    }
}

std::vector<SeriesRow> verify_rows(const std::vector<BoundReport>& reports, double eps_star, bool montecarlo,
                                   ProtocolKind kind) {
    // One row per (n, theta) from the eps* reports; satisfied covers every
    // check at every epsilon.
    std::map<std::pair<std::uint64_t, int>, SeriesRow> by_key;
    for (const auto& r : reports) {
        auto key = std::make_pair(r.n, static_cast<int>(r.theta));
        auto [it, inserted] = by_key.try_emplace(key);
        SeriesRow& row = it->second;
        if (inserted) {
            row.index = r.n;
            row.theta_mode = r.theta == Theta::one ? "fixed1" : "fixed0";
            row.reveal_bound = reveal_bound(r.n, eps_star);
            row.correct_bound = correctness_bound(r.n, eps_star);
            row.satisfied = true;
            row.method = montecarlo ? "monte_carlo"
                                    : std::string(to_string(kind == ProtocolKind::TreeDeterministic
                                                                ? ExactMethod::TreeClosedForm
                                                                : ExactMethod::FullEnumeration));
        }
        row.satisfied = row.satisfied && r.satisfied;
        if (r.epsilon == eps_star && r.check == CheckKind::Correctness) {
            row.p = r.value;
            row.ci_low = std::max(0.0, r.value - r.slack);
            row.ci_high = std::min(1.0, r.value + r.slack);
        }
        if (r.epsilon == eps_star && r.check == CheckKind::Reveal) row.p_reveal = r.value;
    }
    std::vector<SeriesRow> rows;
    for (auto& [key, row] : by_key) rows.push_back(std::move(row));
    return rows;
}

void write_compare(std::ostream& out, const Options& o, const RunConfig& c,
                   const std::vector<ProtocolKind>& kinds) {
    struct Column {
        ProtocolKind kind;
        std::vector<double> p;
        std::string method;
    };
    std::vector<Column> columns;
    for (ProtocolKind kind : kinds) {
        Column col{kind, {}, {}};
        const bool has_exact = kind == ProtocolKind::TreeDeterministic ||
                               (kind == ProtocolKind::RationalHerding && c.n <= c.cap);
        if (has_exact) {
            const ExactSeries ex = exact_series(c, kind, "auto");
            for (std::size_t j = 0; j < c.probes.size(); ++j) {
                double p = ex.theta1[j].p_correct;
                switch (c.theta_mode.kind) {
                    case ThetaMode::Kind::Fixed0: p = ex.theta0[j].p_correct; break;
                    case ThetaMode::Kind::Fixed1: break;
                    case ThetaMode::Kind::Prior:
                        p = prior_weighted(ex.theta0[j].p_correct, p, c.theta_mode.prior);
                        break;
                }
                col.p.push_back(p);
            }
            col.method = std::string(to_string(ex.theta1.front().method));
        } else {
            const EstimateSeries series = run_trials(trial_config(c, kind));
            for (const auto& est : series.probes) col.p.push_back(est.p_hat);
            col.method = "monte_carlo";
        }
        columns.push_back(std::move(col));
    }

    if (o.format == "json") {
        nlohmann::ordered_json doc;
        doc["schema"] = "herdsim.compare/1";
        doc["config"] = config_json(c, true);
        doc["config"].erase("protocol");
        doc["config"]["protocols"] = nlohmann::ordered_json::array();
        for (auto kind : kinds) doc["config"]["protocols"].push_back(std::string(to_string(kind)));
        doc["rows"] = nlohmann::ordered_json::array();
        for (std::size_t j = 0; j < c.probes.size(); ++j) {
            nlohmann::ordered_json row;
            row["index"] = c.probes[j];
            for (const auto& col : columns) {
                const std::string name(to_string(col.kind));
                row[name + "_p"] = col.p[j];
                row[name + "_method"] = col.method;
            }
            doc["rows"].push_back(std::move(row));
        }
        out << doc.dump(2) << '\n';
        return;
    }

    out << "index";
    for (const auto& col : columns) out << ',' << to_string(col.kind) << "_p," << to_string(col.kind) << "_method";
    out << '\n';
    for (std::size_t j = 0; j < c.probes.size(); ++j) {
        out << c.probes[j];
        for (const auto& col : columns) out << ',' << format_real(col.p[j]) << ',' << col.method;
        out << '\n';
    }
}

void add_run_options(CLI::App* sub, Options& o, bool trials) {
    sub->add_option("--protocol", o.protocol, "tree | randomized | herding")
        ->check(CLI::IsMember({"tree", "randomized", "herding"}))
        ->capture_default_str();
    sub->add_option("--q0", o.q0, "P[s=1 | theta=0]")->capture_default_str();
    sub->add_option("--q1", o.q1, "P[s=1 | theta=1]")->capture_default_str();
    sub->add_option("--n", o.n, "largest agent index")->capture_default_str();
    if (trials) {
        sub->add_option("--trials", o.trials, "Monte Carlo trials")->capture_default_str();
        sub->add_option("--seed", o.seed, "base seed")->capture_default_str();
    }
    sub->add_option("--theta", o.theta, "0 | 1 | prior")
        ->check(CLI::IsMember({"0", "1", "prior"}))
        ->capture_default_str();
    sub->add_option("--prior", o.prior, "P[theta=1] when --theta prior")->capture_default_str();
    sub->add_option("--probes", o.probes, "agent indices to report (default: powers of two and n)")
        ->delimiter(',');
    sub->add_option("--format", o.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_option("--output,-o", o.output, "output file (default: stdout)");
}

}  // namespace

unsigned workers_from_env() {
    const char* raw = std::getenv("HERDSIM_THREADS");
    if (raw == nullptr || *raw == '\0') return 0;
    const std::string_view text(raw);
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("HERDSIM_THREADS must be a non-negative integer");
    }
    return value;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sequential social learning protocol laboratory", "herdsim"};
    app.require_subcommand(1);
    Options o;

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates of p_n and reveal frequency");
    add_run_options(simulate, o, true);

    auto* exact = app.add_subcommand("exact", "exact p_n and reveal probability per theta");
    add_run_options(exact, o, false);
    exact->add_option("--method", o.method, "auto | closed-form | enumeration")
        ->check(CLI::IsMember({"auto", "closed-form", "enumeration"}))
        ->capture_default_str();
    exact->add_option("--cap", o.cap, "largest n for full enumeration")->capture_default_str();

    auto* verify_cmd = app.add_subcommand("verify", "check exact or estimated values against the bounds");
    add_run_options(verify_cmd, o, true);
    verify_cmd->add_option("--mode", o.mode, "exact | montecarlo")
        ->check(CLI::IsMember({"exact", "montecarlo"}))
        ->capture_default_str();
    verify_cmd->add_option("--cap", o.cap, "largest n for full enumeration")->capture_default_str();

    auto* compare = app.add_subcommand("compare", "aligned p_n table across protocols");
    add_run_options(compare, o, true);
    compare->add_option("--protocols", o.protocols, "comma-separated protocol list")
        ->delimiter(',')
        ->check(CLI::IsMember({"tree", "randomized", "herding"}))
        ->capture_default_str();
    compare->add_option("--cap", o.cap, "largest n for full enumeration")->capture_default_str();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    std::ostringstream buffer;
    int code = kExitOk;
    try {
        const RunConfig config = make_config(o);
        if (simulate->parsed()) {
            emit_series(buffer, o, "simulate", config, simulate_rows(config), true);
        } else if (exact->parsed()) {
            emit_series(buffer, o, "exact", config, exact_rows(config, o.method), false);
        } else if (verify_cmd->parsed()) {
            VerifyConfig vc;
            vc.protocol = config.protocol;
            vc.params = config.params;
            vc.n_max = config.n;
            vc.mode = o.mode == "montecarlo" ? VerifyMode::MonteCarlo : VerifyMode::Exact;
            vc.probes = config.probes;
            vc.trials = config.trials;
            vc.seed = config.seed;
            vc.workers = config.workers;
            vc.enumeration_cap = config.cap;
            vc.prior = config.theta_mode.agent_prior();
            if (vc.mode == VerifyMode::Exact && vc.protocol == ProtocolKind::RandomizedReveal) {
                throw UsageError("exact verification is unavailable for the randomized protocol");
            }
            const auto reports = verify(vc);
            const VerifySummary summary = summarize(reports);
            const double eps_star = derive_params(config.params).epsilon_star;

            std::ostream& table = o.output.empty() ? buffer : out;
            write_verify_table(table, reports);
            table << fmt::format("{} reports, {} vacuous, {} violations\n", summary.total, summary.vacuous,
                                 summary.violations);
            if (summary.all_vacuous()) table << "note: all bounds vacuous in this range\n";
            for (const auto& r : reports) {
                if (r.satisfied) continue;
                err << fmt::format("violation: {} bound at n={} theta={} epsilon={}: value {} vs bound {}\n",
                                   to_string(r.check), r.n, to_string(r.theta), r.epsilon, r.value, r.bound());
            }
            if (!o.output.empty()) {
                emit_series(buffer, o, "verify", config,
                            verify_rows(reports, eps_star, vc.mode == VerifyMode::MonteCarlo, vc.protocol), true);
            }
            code = summary.ok() ? kExitOk : kExitViolation;
        } else if (compare->parsed()) {
            std::vector<ProtocolKind> kinds;
            for (const auto& name : o.protocols) kinds.push_back(protocol_or_throw(name));
            if (kinds.empty()) throw UsageError("--protocols must name at least one protocol");
            write_compare(buffer, o, config, kinds);
        }
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kExitCap;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (o.output.empty()) {
        out << buffer.str();
    } else {
        std::ofstream file(o.output, std::ios::binary | std::ios::trunc);
        file << buffer.str();
        if (!file.good()) {
            err << "error: cannot write " << o.output << '\n';
            return kExitUsage;
        }
    }
    return code;
}

}  // namespace herdsim::cli
