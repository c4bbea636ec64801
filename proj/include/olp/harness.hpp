#pragma once

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <future>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "olp/input_gen.hpp"
#include "olp/metrics.hpp"
#include "olp/planner.hpp"
#include "olp/policies.hpp"

namespace olp {

struct FrequencyRule {
    enum class Kind { Fixed, Power };
    Kind kind = Kind::Fixed;
    std::int64_t fixed_f = 1;
    double beta = 1.0 / 3.0;  // f = ceil(T^beta)

    static FrequencyRule fixed(std::int64_t f) { return {Kind::Fixed, f, 0.0}; }
    static FrequencyRule power(double beta) { return {Kind::Power, 0, beta}; }

    std::int64_t frequency_for(std::int64_t T) const {
        if (kind == Kind::Fixed) {
            if (fixed_f < 1 || fixed_f > T)
                throw std::invalid_argument("frequency rule: fixed f out of [1, T]");
            return fixed_f;
        }
        if (!(beta > 0.0 && beta <= 1.0))
            throw std::invalid_argument("frequency rule: beta must be in (0, 1]");
        const long double raw =
            std::pow(static_cast<long double>(T), static_cast<long double>(beta));
        auto f = static_cast<std::int64_t>(std::ceil(raw - 1e-9L));
        return std::clamp<std::int64_t>(f, 1, T);
    }

    std::string label() const {
        char buf[48];
        if (kind == Kind::Fixed)
            std::snprintf(buf, sizeof(buf), "f=%lld", static_cast<long long>(fixed_f));
        else
            std::snprintf(buf, sizeof(buf), "f=ceil(T^%.4g)", beta);
        return buf;
    }
};

struct ExperimentSpec {
    std::vector<std::int64_t> horizons{1000};
    std::int64_t m = 1;
    InputModel model = InputModel::InputI;
    std::vector<PolicyKind> algorithms{PolicyKind::Hybrid};
    std::vector<FrequencyRule> freq_rules{FrequencyRule::power(1.0 / 3.0)};
    std::int64_t trials = 10;
    std::uint64_t base_seed = 42;
    GuardMode guard = GuardMode::Hard;
    std::optional<StepSchedule> step_override;  // absent: per-policy default
    std::optional<double> delta_guard;
    double d_lo = 1.0 / 3.0;
    double d_hi = 2.0 / 3.0;
    std::optional<double> clip;  // input II truncation
    double lp_tol = 1e-9;
    int workers = 1;
};

struct TrialOutcome {
    RegretReport report;
    std::int64_t lp_solves = 0;
    double wall_seconds = 0.0;  // run_policy only; generation and oracle excluded
};

struct CellResult {
    std::int64_t T = 0;
    PolicyKind algo = PolicyKind::Hybrid;
    FrequencyRule rule;
    std::int64_t f = 1;  // resolved frequency (hybrids), 0 for AHDL/FirstOrder
    AggregateReport agg;
    double mean_gap = 0.0;
    double mean_violation = 0.0;
    double mean_offline = 0.0;
    double mean_wall = 0.0;
    std::vector<TrialOutcome> trials;
};

// Trial seeds depend on the instance-defining cell identity only (not the
// algorithm or frequency), so all policies face identical instances and
// adding algorithms to a spec never changes other cells' results.
inline std::uint64_t trial_instance_seed(const ExperimentSpec& spec, std::int64_t T,
                                         std::int64_t trial) {
    return derive_seed(spec.base_seed,
                       {static_cast<std::uint64_t>(T), static_cast<std::uint64_t>(spec.m),
                        spec.model == InputModel::InputI ? 1ULL : 2ULL,
                        std::bit_cast<std::uint64_t>(spec.d_lo),
                        std::bit_cast<std::uint64_t>(spec.d_hi),
                        spec.clip ? std::bit_cast<std::uint64_t>(*spec.clip) : 0ULL,
                        static_cast<std::uint64_t>(trial)});
}

inline PolicyConfig make_policy_config(const ExperimentSpec& spec, PolicyKind kind,
                                       std::int64_t f) {
    PolicyConfig cfg(kind, f);
    if (spec.step_override) cfg.step_schedule = *spec.step_override;
    cfg.guard = spec.guard;
    cfg.delta_guard = spec.delta_guard;
    cfg.lp_tol = spec.lp_tol;
    return cfg;
}

namespace detail {

template <class Fn>
void parallel_trials(std::int64_t trials, int workers, Fn&& fn) {
    if (workers <= 1) {
        for (std::int64_t i = 0; i < trials; ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> futs;
    const int lanes = std::min<std::int64_t>(workers, trials);
    for (int lane = 0; lane < lanes; ++lane)
        futs.push_back(std::async(std::launch::async, [&fn, lane, lanes, trials] {
            for (std::int64_t i = lane; i < trials; i += lanes) fn(i);
        }));
    for (auto& f : futs) f.get();
}

}  // namespace detail

/// Runs all trials of one (T, algorithm, frequency) cell. Results are keyed
/// by trial index, so the outcome is identical for any worker count.
inline CellResult run_cell(const ExperimentSpec& spec, std::int64_t T, PolicyKind algo,
                           const FrequencyRule& rule, OracleCache& cache) {
    const bool uses_f = algo == PolicyKind::Hybrid || algo == PolicyKind::EnhancedHybrid;
    CellResult cell;
    cell.T = T;
    cell.algo = algo;
    cell.rule = rule;
    cell.f = uses_f ? rule.frequency_for(T) : 0;
    cell.trials.resize(spec.trials);

    GenConfig gen;
    gen.d_lo = spec.d_lo;
    gen.d_hi = spec.d_hi;
    gen.clip = spec.clip;
    const PolicyConfig cfg = make_policy_config(spec, algo, uses_f ? cell.f : 1);

    detail::parallel_trials(spec.trials, spec.workers, [&](std::int64_t i) {
        const std::uint64_t seed = trial_instance_seed(spec, T, i);
        const Instance inst = generate_instance(T, spec.m, spec.model, seed, gen);
        const auto start = std::chrono::steady_clock::now();
        const Trajectory traj = run_policy(inst, cfg);
        const auto stop = std::chrono::steady_clock::now();
        TrialOutcome& out = cell.trials[i];
        out.wall_seconds = std::chrono::duration<double>(stop - start).count();
        out.lp_solves = traj.lp_solve_count;
        out.report = evaluate(traj, inst, spec.lp_tol, &cache);
    });

    std::vector<RegretReport> reports;
    reports.reserve(spec.trials);
    for (const TrialOutcome& t : cell.trials) reports.push_back(t.report);
    cell.agg = aggregate(reports);
    for (const TrialOutcome& t : cell.trials) {
        cell.mean_gap += t.report.optimality_gap;
        cell.mean_violation += t.report.violation;
        cell.mean_offline += t.report.offline_objective;
        cell.mean_wall += t.wall_seconds;
    }
    const auto n = static_cast<double>(spec.trials);
    cell.mean_gap /= n;
    cell.mean_violation /= n;
    cell.mean_offline /= n;
    cell.mean_wall /= n;
    return cell;
}

inline void validate_spec(const ExperimentSpec& spec) {
    if (spec.trials < 1) throw std::invalid_argument("spec: trials must be >= 1");
    if (spec.horizons.empty()) throw std::invalid_argument("spec: no horizons");
    for (std::int64_t T : spec.horizons)
        if (T < 1) throw std::invalid_argument("spec: horizons must be positive");
    if (spec.m < 1) throw std::invalid_argument("spec: m must be >= 1");
    if (spec.algorithms.empty()) throw std::invalid_argument("spec: no algorithms");
    if (spec.freq_rules.empty()) throw std::invalid_argument("spec: no frequency rules");
    for (const FrequencyRule& r : spec.freq_rules)
        if (r.kind == FrequencyRule::Kind::Power && !(r.beta > 0.0 && r.beta <= 1.0))
            throw std::invalid_argument("spec: beta must be in (0, 1]");
    if (spec.workers < 1) throw std::invalid_argument("spec: workers must be >= 1");
}

struct CellError {
    std::int64_t T = 0;
    PolicyKind algo = PolicyKind::Hybrid;
    std::string rule_label;
    std::string message;
};

/// Runs the full grid and streams per-trial CSV rows in deterministic order.
/// A failing cell is recorded in `errors` (when given) and skipped instead
/// of aborting the remaining grid.
inline std::vector<CellResult> run_experiment(const ExperimentSpec& spec, std::ostream& csv,
                                              std::vector<CellError>* errors = nullptr) {
    validate_spec(spec);
    OracleCache cache;
    std::vector<CellResult> cells;
    write_csv_header(csv);
    for (std::int64_t T : spec.horizons) {
        for (PolicyKind algo : spec.algorithms) {
            const bool uses_f =
                algo == PolicyKind::Hybrid || algo == PolicyKind::EnhancedHybrid;
            // AHDL and FirstOrder ignore the frequency; run them once per T
            const std::size_t rule_count = uses_f ? spec.freq_rules.size() : 1;
            for (std::size_t ri = 0; ri < rule_count; ++ri) {
                try {
                    CellResult cell = run_cell(spec, T, algo, spec.freq_rules[ri], cache);
                    for (const TrialOutcome& t : cell.trials)
                        write_csv_row(csv, t.report, T, spec.m, cell.f, policy_name(algo),
                                      t.lp_solves, t.wall_seconds);
                    cells.push_back(std::move(cell));
                } catch (const std::exception& e) {
                    if (!errors) throw;
                    errors->push_back(
                        {T, algo, spec.freq_rules[ri].label(), e.what()});
                }
            }
        }
    }
    return cells;
}

// Table with one row per horizon and one mean-regret column per frequency
// regime, preceded by the mean hindsight objective.
inline void print_frequency_table(const std::vector<CellResult>& cells, PolicyKind algo,
                                  const ExperimentSpec& spec, std::ostream& out) {
    const bool uses_f = algo == PolicyKind::Hybrid || algo == PolicyKind::EnhancedHybrid;
    out << "algorithm: " << policy_name(algo) << "\n";
    out << "         T |      Offline";
    if (uses_f) {
        for (const FrequencyRule& r : spec.freq_rules) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), " | %14s", r.label().c_str());
            out << buf;
        }
    } else {
        out << " |         regret";
    }
    out << '\n';
    for (std::int64_t T : spec.horizons) {
        char head[32];
        std::snprintf(head, sizeof(head), "%10lld |", static_cast<long long>(T));
        out << head;
        bool offline_done = false;
        std::string row;
        for (const CellResult& c : cells) {
            if (c.T != T || c.algo != algo) continue;
            char buf[64];
            if (!offline_done) {
                std::snprintf(buf, sizeof(buf), " %12.2f", c.mean_offline);
                out << buf;
                offline_done = true;
            }
            std::snprintf(buf, sizeof(buf), " | %14.2f", c.agg.mean_total);
            row += buf;
        }
        out << row << '\n';
    }
}

// Comparison layout: per horizon, one row per algorithm with mean regret,
// LP solve count and mean wall time.
inline void print_comparison_table(const std::vector<CellResult>& cells, std::ostream& out) {
    out << "         T | algorithm       |       regret | lp_solves | wall_time_s\n";
    for (const CellResult& c : cells) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%10lld | %-15s | %12.2f | %9lld | %11.4f\n",
                      static_cast<long long>(c.T), policy_name(c.algo), c.agg.mean_total,
                      static_cast<long long>(c.trials.empty() ? 0 : c.trials[0].lp_solves),
                      c.mean_wall);
        out << buf;
    }
}

}  // namespace olp
