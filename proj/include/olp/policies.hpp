#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "olp/dual_lp.hpp"
#include "olp/instance.hpp"

namespace olp {

using DualPrice = std::vector<double>;

enum class PolicyKind { AHDL, FirstOrder, Hybrid, EnhancedHybrid };
enum class StepSchedule { Harmonic, ConstantPerBatch, Custom };
enum class GuardMode { Hard, Theoretical };

inline const char* policy_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::AHDL: return "ahdl";
        case PolicyKind::FirstOrder: return "first-order";
        case PolicyKind::Hybrid: return "hybrid";
        case PolicyKind::EnhancedHybrid: return "enhanced-hybrid";
    }
    return "?";
}

struct PolicyConfig {
    PolicyKind kind = PolicyKind::Hybrid;
    std::int64_t f = 1;                 // re-solving frequency; AHDL/FirstOrder ignore it
    StepSchedule step_schedule = StepSchedule::ConstantPerBatch;
    std::vector<double> custom_steps;   // per-t rates when step_schedule == Custom
    GuardMode guard = GuardMode::Hard;
    std::optional<double> delta_guard;  // theoretical latch width; absent = never trips
    double lp_tol = 1e-9;
    bool warm_start = true;             // reuse the LP basis across re-solves

    PolicyConfig() = default;
    explicit PolicyConfig(PolicyKind k, std::int64_t freq = 1) : kind(k), f(freq) {
        step_schedule = (k == PolicyKind::Hybrid || k == PolicyKind::EnhancedHybrid)
                            ? StepSchedule::ConstantPerBatch
                            : StepSchedule::Harmonic;
    }
};

struct Trajectory {
    std::int64_t horizon = 0;
    std::int64_t resource_count = 0;
    std::vector<std::uint8_t> decisions;  // x_t, 1-based via index t-1
    std::vector<double> prices_seen;      // T x m, row t-1 = price used at decision t
    std::vector<double> consumption;      // A x
    double revenue = 0.0;
    std::int64_t lp_solve_count = 0;
    std::optional<std::int64_t> guard_trip_time;

    std::span<const double> price_at(std::int64_t t) const {
        return {prices_seen.data() + (t - 1) * resource_count,
                static_cast<std::size_t>(resource_count)};
    }
};

// Mutable per-run record; guard_check consults and updates it.
struct PolicyState {
    std::int64_t t = 0;                 // orders processed so far
    std::int64_t horizon = 0;
    std::vector<double> remaining;      // b_t
    std::vector<double> avg_remaining;  // d_t, frozen after t = T-1
    std::vector<double> initial_avg;    // d
    DualPrice prices;
    bool reject_all = false;
    GuardMode guard = GuardMode::Hard;
    std::optional<double> delta_guard;
};

// LP failure surfaced by run_policy with the offending timestep attached.
struct PolicyError : std::runtime_error {
    PolicyError(std::int64_t timestep, SolveStatus st)
        : std::runtime_error("LP solve failed at t=" + std::to_string(timestep)),
          t(timestep),
          status(st) {}
    std::int64_t t;
    SolveStatus status;
};

/// Envelope that online dual prices stay inside while the running average
/// capacity remains within delta of its initial value: the larger of the
/// re-solving bound r_max/(d_lo - delta) and the subgradient-path bound
/// (2 r_max + m (a_max + d_hi)^2) / d_lo + m (a_max + d_hi). Monitored by
/// tests, never enforced.
inline double price_bound(double r_max, double a_max, double d_lo, double d_hi,
                          std::int64_t m, double delta) {
    if (!(delta >= 0.0 && delta < d_lo))
        throw std::invalid_argument("price_bound: need 0 <= delta < d_lo");
    const double md = static_cast<double>(m);
    const double lp_side = r_max / (d_lo - delta);
    const double fo_side =
        (2.0 * r_max + md * (a_max + d_hi) * (a_max + d_hi)) / d_lo + md * (a_max + d_hi);
    return std::max(lp_side, fo_side);
}

/// Complementary-slackness decision rule: accept iff the bid beats the
/// priced resource cost; exact ties reject.
inline int decide(const Order& order, const DualPrice& prices) {
    double cost = 0.0;
    for (std::size_t i = 0; i < prices.size(); ++i) cost += order.demand[i] * prices[i];
    return order.reward > cost ? 1 : 0;
}

/// Projected subgradient step p <- (p - alpha (d - a x))^+.
inline DualPrice step_first_order(const DualPrice& prices, const Order& order, int x,
                                  const std::vector<double>& d, double alpha) {
    DualPrice next(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) {
        const double g = d[i] - order.demand[i] * static_cast<double>(x);
        next[i] = std::max(prices[i] - alpha * g, 0.0);
    }
    return next;
}

/// Re-solve times { t : t mod f = 0 and t <= kf } with k = floor(T/f).
inline std::vector<std::int64_t> resolve_schedule(std::int64_t T, std::int64_t f) {
    if (f < 1 || f > T) throw std::invalid_argument("resolve_schedule: need 1 <= f <= T");
    const std::int64_t k = T / f;
    std::vector<std::int64_t> times;
    times.reserve(k);
    for (std::int64_t j = 1; j <= k; ++j) times.push_back(j * f);
    return times;
}

/// Returns true when the pending order must be force-rejected. Hard mode
/// protects the current order only; theoretical mode latches reject_all once
/// d_t leaves [d - delta, d + delta] (and never trips without a delta).
inline bool guard_check(PolicyState& st, const Order& order) {
    if (st.guard == GuardMode::Hard) {
        for (std::size_t i = 0; i < st.remaining.size(); ++i)
            if (st.remaining[i] - order.demand[i] < 0.0) return true;
        return false;
    }
    if (st.reject_all) return true;
    if (!st.delta_guard) return false;
    for (std::size_t i = 0; i < st.avg_remaining.size(); ++i) {
        if (std::abs(st.avg_remaining[i] - st.initial_avg[i]) > *st.delta_guard) {
            st.reject_all = true;
            return true;
        }
    }
    return false;
}

namespace detail {

inline double step_size(const PolicyConfig& cfg, std::int64_t t, std::int64_t T) {
    switch (cfg.step_schedule) {
        case StepSchedule::Harmonic:
            return 1.0 / static_cast<double>(t + 1);
        case StepSchedule::ConstantPerBatch:
            // batch length is f for the hybrid schedules and the whole
            // horizon for the pure first-order method
            return (cfg.kind == PolicyKind::FirstOrder)
                       ? 1.0 / std::sqrt(static_cast<double>(T))
                       : 1.0 / std::sqrt(static_cast<double>(cfg.f));
        case StepSchedule::Custom:
            return cfg.custom_steps[t - 1];
    }
    return 0.0;
}

inline void validate_config(const Instance& inst, const PolicyConfig& cfg) {
    const bool uses_f =
        cfg.kind == PolicyKind::Hybrid || cfg.kind == PolicyKind::EnhancedHybrid;
    if (uses_f && (cfg.f < 1 || cfg.f > inst.horizon))
        throw std::invalid_argument("run_policy: need 1 <= f <= T");
    if (cfg.step_schedule == StepSchedule::Custom &&
        static_cast<std::int64_t>(cfg.custom_steps.size()) < inst.horizon)
        throw std::invalid_argument("run_policy: custom step schedule shorter than horizon");
    if (cfg.delta_guard && !(*cfg.delta_guard > 0.0))
        throw std::invalid_argument("run_policy: delta_guard must be positive");
    if (!(cfg.lp_tol > 0.0)) throw std::invalid_argument("run_policy: lp_tol must be positive");
}

}  // namespace detail

/// Runs one policy over one instance, step for step: decide with the current
/// prices, update resources, then update prices along the algorithm's branch
/// (first-order step, LP re-solve on (d_t, history), or carry-forward).
///
/// Price-update branches per timestep t:
///   AHDL            LP re-solve at every t < T               (T-1 solves)
///   FirstOrder      subgradient step with the static d       (0 solves)
///   Hybrid          LP at t mod f = 0, t <= kf; first-order inside the
///                   initial batch (t < f) and final batch (t > kf),
///                   restarting from the latest LP prices; carry-forward
///                   elsewhere                                 (k solves)
///   EnhancedHybrid  LP at t mod f = 0, first-order at every other step,
///                   restarting from each LP solution           (k solves)
///
/// In Theoretical guard mode d_t may drift negative; re-solves clamp the
/// capacity at zero, which prices the exhausted resource prohibitively.
inline Trajectory run_policy(const Instance& inst, const PolicyConfig& cfg) {
    detail::validate_config(inst, cfg);
    const std::int64_t T = inst.horizon;
    const std::int64_t m = inst.resource_count;
    const std::int64_t f = cfg.f;
    const std::int64_t k = (cfg.kind == PolicyKind::Hybrid ||
                            cfg.kind == PolicyKind::EnhancedHybrid)
                               ? T / f
                               : 0;

    PolicyState st;
    st.horizon = T;
    st.remaining = inst.capacity;
    st.avg_remaining = inst.avg_capacity;
    st.initial_avg = inst.avg_capacity;
    st.prices.assign(m, 0.0);
    st.guard = cfg.guard;
    st.delta_guard = cfg.delta_guard;

    const bool uses_lp = cfg.kind != PolicyKind::FirstOrder;
    ResolvingDualSolver session(m, cfg.lp_tol, cfg.warm_start);

    Trajectory traj;
    traj.horizon = T;
    traj.resource_count = m;
    traj.decisions.assign(T, 0);
    traj.prices_seen.assign(T * m, 0.0);
    traj.consumption.assign(m, 0.0);

    std::vector<double> clamped(m);
    auto lp_resolve = [&](std::int64_t t) {
        for (std::int64_t i = 0; i < m; ++i) clamped[i] = std::max(st.avg_remaining[i], 0.0);
        LpSolution sol = session.resolve(clamped);
        if (sol.status != SolveStatus::Optimal) throw PolicyError(t, sol.status);
        ++traj.lp_solve_count;
        return std::move(sol.prices);
    };

    for (std::int64_t t = 1; t <= T; ++t) {
        const Order& order = inst.orders[t - 1];

        const bool latched_before = st.reject_all;
        const bool forced = guard_check(st, order);
        if (!latched_before && st.reject_all && !traj.guard_trip_time)
            traj.guard_trip_time = t;
        const int x = forced ? 0 : decide(order, st.prices);

        std::copy(st.prices.begin(), st.prices.end(), traj.prices_seen.begin() + (t - 1) * m);
        traj.decisions[t - 1] = static_cast<std::uint8_t>(x);
        if (x == 1) {
            traj.revenue += order.reward;
            for (std::int64_t i = 0; i < m; ++i) {
                traj.consumption[i] += order.demand[i];
                st.remaining[i] -= order.demand[i];
            }
        }
        st.t = t;
        if (t < T)  // d_t frozen at its t = T-1 value afterwards
            for (std::int64_t i = 0; i < m; ++i)
                st.avg_remaining[i] = st.remaining[i] / static_cast<double>(T - t);

        if (uses_lp) session.observe(order);

        switch (cfg.kind) {
            case PolicyKind::AHDL:
                if (t < T) st.prices = lp_resolve(t);
                break;
            case PolicyKind::FirstOrder:
                st.prices = step_first_order(st.prices, order, x, inst.avg_capacity,
                                             detail::step_size(cfg, t, T));
                break;
            case PolicyKind::Hybrid:
                if (t % f == 0 && t <= k * f)
                    st.prices = lp_resolve(t);
                else if (t < f || t > k * f)
                    st.prices = step_first_order(st.prices, order, x, inst.avg_capacity,
                                                 detail::step_size(cfg, t, T));
                // otherwise carry the latest LP prices forward
                break;
            case PolicyKind::EnhancedHybrid:
                if (t % f == 0)
                    st.prices = lp_resolve(t);
                else
                    st.prices = step_first_order(st.prices, order, x, inst.avg_capacity,
                                                 detail::step_size(cfg, t, T));
                break;
        }
    }
    return traj;
}

/// Columnar replay/plot format: t, x_t, r_t, revenue-to-date, remaining.
inline void save_trajectory(const Trajectory& traj, const Instance& inst, std::ostream& out) {
    out << "t x reward revenue";
    for (std::int64_t i = 0; i < inst.resource_count; ++i) out << " remaining" << i;
    out << '\n';
    std::vector<double> remaining = inst.capacity;
    double revenue = 0.0;
    for (std::int64_t t = 1; t <= traj.horizon; ++t) {
        const Order& o = inst.orders[t - 1];
        const int x = traj.decisions[t - 1];
        if (x) {
            revenue += o.reward;
            for (std::int64_t i = 0; i < inst.resource_count; ++i) remaining[i] -= o.demand[i];
        }
        out << t << ' ' << x << ' ' << detail::format_double(o.reward) << ' '
            << detail::format_double(revenue);
        for (std::int64_t i = 0; i < inst.resource_count; ++i)
            out << ' ' << detail::format_double(remaining[i]);
        out << '\n';
    }
}

}  // namespace olp
