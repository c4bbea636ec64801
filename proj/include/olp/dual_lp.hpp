#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "olp/instance.hpp"
#include "olp/simplex.hpp"

namespace olp {

// The t-sample dual problem at capacity d:
//     minimize_{p >= 0}  d'p + (1/t) sum_j (r_j - a_j'p)^+
struct SampledDualProblem {
    std::vector<double> target_capacity;  // d (or d_t)
    std::span<const Order> samples;       // history (r_j, a_j), j <= t
};

struct LpSolution {
    std::vector<double> prices;
    double objective = 0.0;
    SolveStatus status = SolveStatus::InternalError;
    std::int64_t iterations = 0;
};

struct OfflineSolution {
    std::vector<double> allocation;    // x in [0,1]^T
    double objective = 0.0;            // r'x
    std::vector<double> dual_prices;   // feasible dual certificate
    double dual_objective = 0.0;       // b'p + sum_t (r_t - a_t'p)^+
    SolveStatus status = SolveStatus::InternalError;
    std::int64_t iterations = 0;
};

/// The sampled dual objective evaluated exactly as written.
inline double dual_objective(std::span<const double> p, const SampledDualProblem& prob) {
    const std::int64_t m = static_cast<std::int64_t>(prob.target_capacity.size());
    double value = 0.0;
    for (std::int64_t i = 0; i < m; ++i) value += prob.target_capacity[i] * p[i];
    double sum = 0.0;
    for (const Order& o : prob.samples) {
        double slack = o.reward;
        for (std::int64_t i = 0; i < m; ++i) slack -= o.demand[i] * p[i];
        if (slack > 0.0) sum += slack;
    }
    return value + sum / static_cast<double>(prob.samples.size());
}

namespace detail {

inline void validate_problem(const SampledDualProblem& prob) {
    if (prob.samples.empty())
        throw std::invalid_argument("solve_sampled_dual: samples must be nonempty");
    if (prob.target_capacity.empty())
        throw std::invalid_argument("solve_sampled_dual: empty capacity");
    for (double d : prob.target_capacity)
        if (!std::isfinite(d))
            throw std::invalid_argument("solve_sampled_dual: capacity must be finite");
}

inline std::vector<double> clamped_duals(const PackingLpSolver& solver) {
    std::vector<double> p = solver.duals();
    for (double& v : p) v = std::max(v, 0.0);
    return p;
}

}  // namespace detail

/// Minimizes the sampled dual objective over p >= 0 by solving the
/// equivalent packing LP  max r'z, A z <= t*d, 0 <= z <= 1  and reading the
/// optimal row multipliers. Negative capacity makes the dual unbounded and
/// is reported as such (an internal error when it reaches this layer).
inline LpSolution solve_sampled_dual(const SampledDualProblem& prob, double tol = 1e-9,
                                     std::int64_t max_iters = -1) {
    detail::validate_problem(prob);
    if (!(tol > 0.0)) throw std::invalid_argument("solve_sampled_dual: tol must be > 0");

    const std::int64_t m = static_cast<std::int64_t>(prob.target_capacity.size());
    const auto t = static_cast<double>(prob.samples.size());
    for (double d : prob.target_capacity)
        if (d < 0.0)
            return {std::vector<double>(m, 0.0), -std::numeric_limits<double>::infinity(),
                    SolveStatus::Unbounded, 0};

    PackingLpSolver solver(m);
    solver.reserve(static_cast<std::int64_t>(prob.samples.size()));
    for (const Order& o : prob.samples) solver.add_order(o);
    std::vector<double> cap(m);
    for (std::int64_t i = 0; i < m; ++i) cap[i] = t * prob.target_capacity[i];
    solver.set_capacity(cap);

    const SolveInfo info = solver.optimize(tol, max_iters);
    LpSolution sol;
    sol.status = info.status;
    sol.iterations = info.iterations;
    sol.prices = detail::clamped_duals(solver);
    sol.objective = dual_objective(sol.prices, prob);
    return sol;
}

/// Hindsight LP  max r'x, A x <= b, 0 <= x <= 1  with a dual certificate.
inline OfflineSolution solve_offline_primal(const Instance& inst, double tol = 1e-9,
                                            std::int64_t max_iters = -1) {
    if (inst.orders.empty()) throw std::invalid_argument("solve_offline_primal: empty instance");
    PackingLpSolver solver(inst.resource_count);
    solver.reserve(inst.horizon);
    for (const Order& o : inst.orders) solver.add_order(o);
    solver.set_capacity(inst.capacity);

    const SolveInfo info = solver.optimize(tol, max_iters);
    OfflineSolution sol;
    sol.status = info.status;
    sol.iterations = info.iterations;
    sol.allocation = solver.primal();
    sol.objective = solver.primal_objective();
    sol.dual_prices = detail::clamped_duals(solver);
    sol.dual_objective = 0.0;
    for (std::int64_t i = 0; i < inst.resource_count; ++i)
        sol.dual_objective += inst.capacity[i] * sol.dual_prices[i];
    for (const Order& o : inst.orders) {
        double slack = o.reward;
        for (std::int64_t i = 0; i < inst.resource_count; ++i)
            slack -= o.demand[i] * sol.dual_prices[i];
        if (slack > 0.0) sol.dual_objective += slack;
    }
    return sol;
}

// Incremental re-solving session used by the LP-driven policies: orders are
// appended as they arrive and each resolve() reuses the previous basis.
// Results match cold solve_sampled_dual calls up to solver tolerance.
class ResolvingDualSolver {
public:
    ResolvingDualSolver(std::int64_t m, double tol = 1e-9, bool warm = true)
        : solver_(m), m_(m), tol_(tol), warm_(warm) {}

    void observe(const Order& o) { solver_.add_order(o); }

    std::int64_t history_size() const { return solver_.columns(); }

    /// Re-solves on the history so far with average capacity d (>= 0),
    /// reusing the previous basis and bound statuses unless warm starting
    /// was disabled for the session.
    LpSolution resolve(const std::vector<double>& avg_capacity) {
        const auto t = static_cast<double>(solver_.columns());
        std::vector<double> cap(m_);
        for (std::int64_t i = 0; i < m_; ++i) cap[i] = t * avg_capacity[i];
        solver_.set_capacity(cap);
        if (!warm_) solver_.reset_state();  // per-call cold solves on request
        const SolveInfo info = solver_.optimize(tol_);
        LpSolution sol;
        sol.status = info.status;
        sol.iterations = info.iterations;
        sol.prices = detail::clamped_duals(solver_);
        sol.objective = solver_.primal_objective() / t;  // equals the dual value at optimality
        return sol;
    }

private:
    PackingLpSolver solver_;
    std::int64_t m_;
    double tol_;
    bool warm_;
};

}  // namespace olp
