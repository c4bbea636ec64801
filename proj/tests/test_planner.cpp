#include "doctest.h"

#include <cmath>
#include <limits>

#include "olp/planner.hpp"
#include "olp/rng.hpp"

using namespace olp;

namespace {

// Literal restatement of the schedule cost as the per-batch sum.
double cost_by_loop(std::int64_t T, std::int64_t m, std::int64_t f) {
    const std::int64_t k = T / f;
    double total = 0.0;
    for (std::int64_t b = 1; b <= k; ++b)
        total += static_cast<double>(m) * m * (m + static_cast<double>(b * f));
    return total + 2.0 * static_cast<double>(m) * static_cast<double>(f);
}

FrequencyPlan brute_force(std::int64_t T, std::int64_t m, double R) {
    FrequencyPlan best, fallback;
    bool any_feasible = false, any = false;
    for (std::int64_t f = 1; f <= T; ++f) {
        const double value =
            std::log(static_cast<double>(T) / static_cast<double>(f)) +
            std::sqrt(static_cast<double>(f));
        if (!any || value < fallback.bound_value) {
            fallback = {f, value, false};
            any = true;
        }
        if (cost_by_loop(T, m, f) <= R && (!any_feasible || value < best.bound_value)) {
            best = {f, value, true};
            any_feasible = true;
        }
    }
    return any_feasible ? best : fallback;
}

}  // namespace

TEST_CASE("unconstrained horizon of 1000 picks f = 4") {
    BudgetModel model{1000, 1, std::numeric_limits<double>::infinity()};
    auto plan = optimal_frequency(model);
    CHECK(plan.feasible);
    CHECK(plan.f == 4);
    CHECK(plan.bound_value == doctest::Approx(std::log(250.0) + 2.0));
}

TEST_CASE("horizon of 1 has only one candidate") {
    BudgetModel model{1, 1, 100.0};
    auto plan = optimal_frequency(model);
    CHECK(plan.feasible);
    CHECK(plan.f == 1);
}

TEST_CASE("budget below every schedule reports infeasible") {
    BudgetModel model{1000, 3, 1.0};
    auto plan = optimal_frequency(model);
    CHECK(!plan.feasible);
    CHECK(plan.f == 4);  // unconstrained minimizer still reported
}

TEST_CASE("agrees with a brute-force scan on random budgets") {
    RngStream rng(310);
    for (int k = 0; k < 50; ++k) {
        const auto T = static_cast<std::int64_t>(1 + rng.next_u64() % 10000);
        const auto m = static_cast<std::int64_t>(1 + rng.next_u64() % 10);
        double R;
        switch (rng.next_u64() % 4) {
            case 0: R = 0.5;                              break;  // infeasible
            case 1: R = rng.uniform(1e2, 1e6);            break;
            case 2: R = rng.uniform(1e6, 1e12);           break;
            default: R = std::numeric_limits<double>::infinity();
        }
        BudgetModel model{T, m, R};
        auto plan = optimal_frequency(model);
        auto ref = brute_force(T, m, R);
        CHECK(plan.f == ref.f);
        CHECK(plan.feasible == ref.feasible);
        CHECK(plan.bound_value == doctest::Approx(ref.bound_value).epsilon(1e-12));
        if (plan.feasible) CHECK(cost_by_loop(T, m, plan.f) <= R);
    }
}

TEST_CASE("closed-form schedule cost equals the per-batch sum") {
    RngStream rng(88);
    for (int k = 0; k < 200; ++k) {
        const auto T = static_cast<std::int64_t>(1 + rng.next_u64() % 5000);
        const auto m = static_cast<std::int64_t>(1 + rng.next_u64() % 10);
        const auto f = static_cast<std::int64_t>(1 + rng.next_u64() % T);
        BudgetModel model{T, m, 1.0};
        CHECK(model.schedule_cost(f) ==
              doctest::Approx(cost_by_loop(T, m, f)).epsilon(1e-12));
    }
}

TEST_CASE("more budget never worsens the bound") {
    double prev = std::numeric_limits<double>::infinity();
    for (double R : {1e3, 1e4, 1e5, 1e6, 1e8, 1e12}) {
        BudgetModel model{2000, 2, R};
        auto plan = optimal_frequency(model);
        if (plan.feasible) {
            CHECK(plan.bound_value <= prev + 1e-12);
            prev = plan.bound_value;
        }
    }
}

TEST_CASE("unconstrained minimizer satisfies the discrete stationarity test") {
    for (std::int64_t T : {10, 100, 1000, 10000}) {
        BudgetModel model{T, 1, std::numeric_limits<double>::infinity()};
        auto plan = optimal_frequency(model);
        auto obj = [T](std::int64_t f) {
            return std::log(static_cast<double>(T) / f) + std::sqrt(static_cast<double>(f));
        };
        if (plan.f > 1) CHECK(obj(plan.f) <= obj(plan.f - 1) + 1e-12);
        if (plan.f < T) CHECK(obj(plan.f) <= obj(plan.f + 1) + 1e-12);
    }
}

TEST_CASE("invalid models are rejected") {
    CHECK_THROWS_AS(optimal_frequency(BudgetModel{0, 1, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(optimal_frequency(BudgetModel{10, 0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(optimal_frequency(BudgetModel{10, 1, 0.0}), std::invalid_argument);
}
