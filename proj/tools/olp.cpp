// Command-line harness: generate instances, run policy benchmarks, compare
// algorithms, plan re-solving frequencies and replay saved instances.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "olp/harness.hpp"

namespace {

struct CommonOpts {
    std::vector<std::int64_t> horizons{1000};
    std::int64_t m = 1;
    std::string model = "input1";
    std::vector<std::string> algos{"hybrid"};
    std::vector<std::int64_t> freqs;
    std::vector<double> betas;
    std::int64_t trials = 10;
    std::uint64_t seed = 42;
    std::string guard = "hard";
    std::string steps;
    std::optional<double> delta_guard;
    double d_lo = 1.0 / 3.0;
    double d_hi = 2.0 / 3.0;
    std::optional<double> clip;
    double lp_tol = 1e-9;
    int workers = 1;
    std::string out;
};

olp::InputModel parse_model(const std::string& s) {
    if (s == "input1") return olp::InputModel::InputI;
    if (s == "input2") return olp::InputModel::InputII;
    throw CLI::ValidationError("--model", "expected input1 or input2");
}

olp::PolicyKind parse_algo(const std::string& s) {
    if (s == "ahdl") return olp::PolicyKind::AHDL;
    if (s == "first-order") return olp::PolicyKind::FirstOrder;
    if (s == "hybrid") return olp::PolicyKind::Hybrid;
    if (s == "enhanced-hybrid") return olp::PolicyKind::EnhancedHybrid;
    throw CLI::ValidationError("--algo",
                               "expected ahdl, first-order, hybrid or enhanced-hybrid");
}

olp::GuardMode parse_guard(const std::string& s) {
    if (s == "hard") return olp::GuardMode::Hard;
    if (s == "theoretical") return olp::GuardMode::Theoretical;
    throw CLI::ValidationError("--guard", "expected hard or theoretical");
}

std::optional<olp::StepSchedule> parse_steps(const std::string& s) {
    if (s.empty()) return std::nullopt;  // per-policy default
    if (s == "harmonic") return olp::StepSchedule::Harmonic;
    if (s == "batch-const") return olp::StepSchedule::ConstantPerBatch;
    throw CLI::ValidationError("--steps", "expected harmonic or batch-const");
}

void add_common_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--T", o.horizons, "Horizon(s) to run")->delimiter(',');
    cmd->add_option("--m", o.m, "Number of resources");
    cmd->add_option("--model", o.model, "Stochastic input model (input1|input2)");
    cmd->add_option("--algo", o.algos,
                    "Algorithms: ahdl, first-order, hybrid, enhanced-hybrid")
        ->delimiter(',');
    cmd->add_option("--freq", o.freqs, "Fixed re-solving frequencies")->delimiter(',');
    cmd->add_option("--beta", o.betas, "Power frequencies f = ceil(T^beta)")->delimiter(',');
    cmd->add_option("--trials", o.trials, "Independent trials per cell");
    cmd->add_option("--seed", o.seed, "Base seed");
    cmd->add_option("--guard", o.guard, "Resource guard (hard|theoretical)");
    cmd->add_option("--steps", o.steps, "Step schedule override (harmonic|batch-const)");
    cmd->add_option("--delta-guard", o.delta_guard,
                    "Theoretical-guard drift latch width (off when omitted)");
    cmd->add_option("--d-lo", o.d_lo, "Lower bound of the capacity draw");
    cmd->add_option("--d-hi", o.d_hi, "Upper bound of the capacity draw");
    cmd->add_option("--clip", o.clip, "Truncate input2 demands to [-clip, clip]");
    cmd->add_option("--lp-tol", o.lp_tol, "LP solver tolerance");
    cmd->add_option("--workers", o.workers, "Concurrent trials");
    cmd->add_option("--out", o.out, "Output CSV path");
    cmd->set_config("--config", "", "Flat key=value config file; flags win");
}

olp::ExperimentSpec build_spec(const CommonOpts& o) {
    olp::ExperimentSpec spec;
    spec.horizons = o.horizons;
    spec.m = o.m;
    spec.model = parse_model(o.model);
    spec.algorithms.clear();
    for (const std::string& a : o.algos) spec.algorithms.push_back(parse_algo(a));
    spec.freq_rules.clear();
    for (std::int64_t f : o.freqs) spec.freq_rules.push_back(olp::FrequencyRule::fixed(f));
    for (double b : o.betas) spec.freq_rules.push_back(olp::FrequencyRule::power(b));
    if (spec.freq_rules.empty())
        spec.freq_rules.push_back(olp::FrequencyRule::power(1.0 / 3.0));
    spec.trials = o.trials;
    spec.base_seed = o.seed;
    spec.guard = parse_guard(o.guard);
    spec.step_override = parse_steps(o.steps);
    spec.delta_guard = o.delta_guard;
    spec.d_lo = o.d_lo;
    spec.d_hi = o.d_hi;
    spec.clip = o.clip;
    spec.lp_tol = o.lp_tol;
    spec.workers = o.workers;
    return spec;
}

int run_grid(const CommonOpts& opts, bool comparison) {
    const olp::ExperimentSpec spec = build_spec(opts);
    if (comparison && spec.algorithms.size() < 2) {
        std::cerr << "compare: need at least two --algo entries\n";
        return 1;
    }
    const std::string out_path = opts.out.empty() ? "olp_results.csv" : opts.out;
    std::ofstream csv(out_path);
    if (!csv) {
        std::cerr << "cannot open " << out_path << " for writing\n";
        return 1;
    }
    std::vector<olp::CellError> errors;
    const auto cells = olp::run_experiment(spec, csv, &errors);
    if (comparison) {
        olp::print_comparison_table(cells, std::cout);
    } else {
        for (olp::PolicyKind algo : spec.algorithms)
            olp::print_frequency_table(cells, algo, spec, std::cout);
    }
    std::cout << "per-trial rows written to " << out_path << "\n";
    if (!errors.empty()) {
        std::cerr << "failed cells:\n";
        for (const olp::CellError& e : errors)
            std::cerr << "  T=" << e.T << " algo=" << olp::policy_name(e.algo) << " "
                      << e.rule_label << ": " << e.message << "\n";
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online linear programming policy benchmarks"};
    app.require_subcommand(1);

    CommonOpts run_opts;
    CLI::App* run = app.add_subcommand("run", "Run a benchmark grid and emit CSV + table");
    add_common_options(run, run_opts);

    CommonOpts cmp_opts;
    cmp_opts.algos = {"ahdl", "first-order", "hybrid"};
    CLI::App* compare =
        app.add_subcommand("compare", "Compare algorithms on the same instances");
    add_common_options(compare, cmp_opts);

    CLI::App* plan = app.add_subcommand("plan", "Pick the re-solving frequency for a budget");
    std::int64_t plan_T = 1000, plan_m = 1;
    double plan_R = std::numeric_limits<double>::infinity();
    plan->add_option("--T", plan_T, "Horizon");
    plan->add_option("--m", plan_m, "Number of resources");
    plan->add_option("--R", plan_R, "Compute budget (abstract units, default unlimited)");

    CLI::App* gen = app.add_subcommand("gen", "Generate and dump one instance");
    CommonOpts gen_opts;
    gen->add_option("--T", gen_opts.horizons, "Horizon")->delimiter(',');
    gen->add_option("--m", gen_opts.m, "Number of resources");
    gen->add_option("--model", gen_opts.model, "input1|input2");
    gen->add_option("--seed", gen_opts.seed, "Instance seed");
    gen->add_option("--d-lo", gen_opts.d_lo, "Lower capacity bound");
    gen->add_option("--d-hi", gen_opts.d_hi, "Upper capacity bound");
    gen->add_option("--clip", gen_opts.clip, "Truncate input2 demands");
    gen->add_option("--out", gen_opts.out, "Output path (stdout when omitted)");

    CLI::App* replay = app.add_subcommand("replay", "Re-run a serialized instance");
    CommonOpts rep_opts;
    std::string rep_in, rep_traj;
    replay->add_option("--in", rep_in, "Instance file")->required();
    replay->add_option("--algo", rep_opts.algos, "Algorithm to run")->delimiter(',');
    replay->add_option("--freq", rep_opts.freqs, "Fixed frequency")->delimiter(',');
    replay->add_option("--beta", rep_opts.betas, "Power frequency")->delimiter(',');
    replay->add_option("--guard", rep_opts.guard, "hard|theoretical");
    replay->add_option("--steps", rep_opts.steps, "harmonic|batch-const");
    replay->add_option("--delta-guard", rep_opts.delta_guard, "Drift latch width");
    replay->add_option("--lp-tol", rep_opts.lp_tol, "LP solver tolerance");
    replay->add_option("--traj", rep_traj, "Write the trajectory to this path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_grid(run_opts, false);
        if (compare->parsed()) return run_grid(cmp_opts, true);

        if (plan->parsed()) {
            const olp::FrequencyPlan picked =
                olp::optimal_frequency(olp::BudgetModel{plan_T, plan_m, plan_R});
            std::printf("f=%lld  bound=log(T/f)+sqrt(f)=%.6f  feasible=%s\n",
                        static_cast<long long>(picked.f), picked.bound_value,
                        picked.feasible ? "yes" : "no");
            if (!picked.feasible) {
                std::fprintf(stderr,
                             "warning: no frequency fits the budget; reporting the "
                             "unconstrained minimizer\n");
                return 2;
            }
            return 0;
        }

        if (gen->parsed()) {
            olp::GenConfig g;
            g.d_lo = gen_opts.d_lo;
            g.d_hi = gen_opts.d_hi;
            g.clip = gen_opts.clip;
            const olp::Instance inst = olp::generate_instance(
                gen_opts.horizons.at(0), gen_opts.m, parse_model(gen_opts.model),
                gen_opts.seed, g);
            if (gen_opts.out.empty()) {
                olp::save_instance(inst, std::cout);
            } else {
                std::ofstream out(gen_opts.out);
                if (!out) {
                    std::cerr << "cannot open " << gen_opts.out << "\n";
                    return 1;
                }
                olp::save_instance(inst, out);
            }
            return 0;
        }

        if (replay->parsed()) {
            std::ifstream in(rep_in);
            if (!in) {
                std::cerr << "cannot open " << rep_in << "\n";
                return 1;
            }
            const olp::Instance inst = olp::load_instance(in);
            const olp::PolicyKind kind = parse_algo(rep_opts.algos.at(0));
            std::int64_t f = 1;
            if (!rep_opts.freqs.empty())
                f = olp::FrequencyRule::fixed(rep_opts.freqs[0]).frequency_for(inst.horizon);
            else if (!rep_opts.betas.empty())
                f = olp::FrequencyRule::power(rep_opts.betas[0]).frequency_for(inst.horizon);
            olp::PolicyConfig cfg(kind, f);
            if (auto s = parse_steps(rep_opts.steps)) cfg.step_schedule = *s;
            cfg.guard = parse_guard(rep_opts.guard);
            cfg.delta_guard = rep_opts.delta_guard;
            cfg.lp_tol = rep_opts.lp_tol;

            const olp::Trajectory traj = olp::run_policy(inst, cfg);
            const olp::RegretReport rep = olp::evaluate(traj, inst, cfg.lp_tol);
            std::printf("algorithm=%s T=%lld m=%lld f=%lld\n", olp::policy_name(kind),
                        static_cast<long long>(inst.horizon),
                        static_cast<long long>(inst.resource_count),
                        static_cast<long long>(f));
            std::printf("revenue=%.6f offline=%.6f gap=%.6f violation=%.6f total=%.6f "
                        "lp_solves=%lld\n",
                        rep.online_revenue, rep.offline_objective, rep.optimality_gap,
                        rep.violation, rep.total, static_cast<long long>(traj.lp_solve_count));
            if (!rep_traj.empty()) {
                std::ofstream out(rep_traj);
                if (!out) {
                    std::cerr << "cannot open " << rep_traj << "\n";
                    return 1;
                }
                olp::save_trajectory(traj, inst, out);
            }
            return 0;
        }
    } catch (const olp::PolicyError& e) {
        std::cerr << "trial failed: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
