#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace olp {

// Abstract compute-cost model: one LP re-solve on t samples costs m^2(m+t),
// a first-order batch of length f costs 2mf.
struct BudgetModel {
    std::int64_t horizon = 1;        // T
    std::int64_t resource_count = 1; // m
    double budget = std::numeric_limits<double>::infinity();  // R

    double lp_cost(std::int64_t t) const {
        const double m = static_cast<double>(resource_count);
        return m * m * (m + static_cast<double>(t));
    }
    double fo_cost(std::int64_t f) const {
        return 2.0 * static_cast<double>(resource_count) * static_cast<double>(f);
    }

    // Total spend of the batched schedule at frequency f: one re-solve per
    // batch boundary plus the first-order work, sum_{b=1..k} m^2(m+bf) + 2mf.
    double schedule_cost(std::int64_t f) const {
        const double m = static_cast<double>(resource_count);
        const double k = static_cast<double>(horizon / f);
        const double fd = static_cast<double>(f);
        return m * m * (m * k + fd * k * (k + 1.0) / 2.0) + 2.0 * m * fd;
    }
};

struct FrequencyPlan {
    std::int64_t f = 1;
    double bound_value = 0.0;  // log(T/f) + sqrt(f) at the chosen f
    bool feasible = false;     // false: no f fits the budget; f is then the
                               // unconstrained minimizer
};

/// Exhaustive scan of f in [1, T] for the minimizer of log(T/f) + sqrt(f)
/// subject to the schedule cost fitting the budget. Ties go to the smaller f.
inline FrequencyPlan optimal_frequency(const BudgetModel& model) {
    if (model.horizon < 1) throw std::invalid_argument("optimal_frequency: T must be >= 1");
    if (model.resource_count < 1)
        throw std::invalid_argument("optimal_frequency: m must be >= 1");
    if (!(model.budget > 0.0)) throw std::invalid_argument("optimal_frequency: R must be > 0");

    const double T = static_cast<double>(model.horizon);
    auto objective = [T](std::int64_t f) {
        return std::log(T / static_cast<double>(f)) + std::sqrt(static_cast<double>(f));
    };

    FrequencyPlan best;
    FrequencyPlan unconstrained;
    bool any_feasible = false, any = false;
    for (std::int64_t f = 1; f <= model.horizon; ++f) {
        const double value = objective(f);
        if (!any || value < unconstrained.bound_value) {
            unconstrained = {f, value, false};
            any = true;
        }
        if (model.schedule_cost(f) <= model.budget &&
            (!any_feasible || value < best.bound_value)) {
            best = {f, value, true};
            any_feasible = true;
        }
    }
    return any_feasible ? best : unconstrained;
}

}  // namespace olp
