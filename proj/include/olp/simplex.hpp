#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "olp/instance.hpp"

namespace olp {

enum class SolveStatus { Optimal, Unbounded, MaxIterations, InternalError };

struct SolveInfo {
    SolveStatus status = SolveStatus::InternalError;
    std::int64_t iterations = 0;
};

// Cumulative work counters, mostly for benchmarks and tuning.
struct SolverStats {
    std::int64_t price_passes = 0;
    std::int64_t dual_rounds = 0;
    std::int64_t flips = 0;
    std::int64_t pivots = 0;
    std::int64_t degen_pivots = 0;
    std::int64_t bland_passes = 0;
    std::int64_t repairs = 0;
};

// Bounded-variable revised simplex for the packing LP
//
//     maximize   r'z   subject to   A z <= cap,  0 <= z <= 1,
//
// with columns a_j arriving as Order demands. The basis has only m rows
// (m = resource count, small), so the inverse is kept dense and refactored
// from scratch on every basis change. Columns may be appended and the
// capacity replaced between optimize() calls; the previous basis and bound
// statuses are then reused as a warm start. The optimal row multipliers are
// the dual prices of the sampled dual problem.
//
// Pivoting is deterministic: Dantzig pricing with index tie-breaks, falling
// back to Bland's rule after a run of degenerate pivots.
class PackingLpSolver {
public:
    explicit PackingLpSolver(std::int64_t m) : m_(m) {
        if (m < 1) throw std::invalid_argument("PackingLpSolver: m must be >= 1");
        cap_.assign(m_, 0.0);
        slack_status_.assign(m_, Status::Basic);
        basis_.resize(m_);
        for (std::int64_t i = 0; i < m_; ++i) basis_[i] = slack_id(i);
        binv_.assign(m_ * m_, 0.0);
        consumed_.assign(m_, 0.0);
        xb_.assign(m_, 0.0);
        pi_.assign(m_, 0.0);
    }

    std::int64_t rows() const { return m_; }
    std::int64_t columns() const { return ncols_; }
    const SolverStats& stats() const { return stats_; }

    void reserve(std::int64_t cols) {
        cols_.reserve(cols * m_);
        rewards_.reserve(cols);
        col_status_.reserve(cols);
    }

    void add_order(const Order& o) {
        if (static_cast<std::int64_t>(o.demand.size()) != m_)
            throw std::invalid_argument("PackingLpSolver: demand size mismatch");
        cols_.insert(cols_.end(), o.demand.begin(), o.demand.end());
        rewards_.push_back(o.reward);
        col_status_.push_back(Status::Lower);
        ++ncols_;
    }

    void set_capacity(const std::vector<double>& cap) {
        if (static_cast<std::int64_t>(cap.size()) != m_)
            throw std::invalid_argument("PackingLpSolver: capacity size mismatch");
        for (double c : cap)
            if (!(c >= 0.0)) throw std::invalid_argument("PackingLpSolver: capacity must be >= 0");
        cap_ = cap;
    }

    // Discard basis state; the next optimize() starts cold.
    void reset_state() { has_state_ = false; }

    // Dual-price estimate consumed by the next cold start: statuses are
    // preset by reduced cost under the hint, which lands the start near the
    // optimum when the hint is near the optimal prices.
    void set_price_hint(std::vector<double> hint) {
        if (static_cast<std::int64_t>(hint.size()) != m_)
            throw std::invalid_argument("PackingLpSolver: hint size mismatch");
        price_hint_ = std::move(hint);
        has_hint_ = true;
    }

    SolveInfo optimize(double tol = 1e-9, std::int64_t max_iters = -1) {
        const std::int64_t moves0 = stats_.pivots + stats_.flips;
        const SolveInfo info = optimize_inner(tol, max_iters);
        const std::int64_t moves = stats_.pivots + stats_.flips - moves0;
        if (moves > 24)
            margin_scale_ = std::min(0.25, margin_scale_ * 2.0);
        else if (moves < 8)
            margin_scale_ = std::max(1e-3, margin_scale_ * 0.5);
        return info;
    }

  private:
    SolveInfo optimize_inner(double tol, std::int64_t max_iters) {
        if (ncols_ == 0) throw std::invalid_argument("PackingLpSolver: no columns");
        if (!(tol > 0.0)) throw std::invalid_argument("PackingLpSolver: tol must be > 0");
        if (max_iters < 0) max_iters = 50 * (m_ + ncols_);

        if (!has_state_)
            cold_start();
        else
            warm_start();
        has_state_ = true;

        if (!refactor()) return {SolveStatus::InternalError, 0};
        recompute_xb();
        if (basic_infeasible(kFeasTol) && !dual_repair()) {
            // dual pivoting could not restore feasibility; rebuild from bounds
            ++stats_.repairs;
            repair_feasibility();
            if (!refactor()) return {SolveStatus::InternalError, 0};
            recompute_xb();
        }

        std::int64_t iters = 0;
        std::int64_t degen_streak = 0;
        bool bland = false;
        std::vector<Cand> cands;

        while (true) {
            compute_pi();
            ++stats_.price_passes;
            if (bland) ++stats_.bland_passes;
            // The working set holds near-threshold columns from both sides:
            // entries just below the violation boundary typically start to
            // violate after a few pivots shift the multipliers, so keeping
            // them lets many pivots ride one full pricing pass.
            const double margin = bland ? 0.0 : working_set_margin();
            price(cands, tol, margin, bland);
            if (cands.empty()) return {SolveStatus::Optimal, iters};

            bool made_progress = false;
            bool acted = true;
            while (acted && !bland) {
                acted = false;
                for (const Cand& c : cands) {
                    if (get_status(c.var) == Status::Basic) continue;
                    const double rc = reduced_cost(c.var);
                    const double viol = is_upper(c.var) ? -rc : rc;
                    if (viol <= tol) continue;
                    if (++iters > max_iters) return {SolveStatus::MaxIterations, iters};
                    const StepOutcome out = improving_step(c.var, degen_streak, bland);
                    if (out == StepOutcome::Unbounded) return {SolveStatus::Unbounded, iters};
                    if (out == StepOutcome::RefactorFailed)
                        return {SolveStatus::InternalError, iters};
                    acted = true;
                    made_progress = true;
                    if (bland) break;
                }
            }
            if (bland && !cands.empty()) {
                // Bland mode: one strictly violating entry per full pass
                const Cand& c = cands.front();
                if (get_status(c.var) != Status::Basic &&
                    (is_upper(c.var) ? -reduced_cost(c.var) : reduced_cost(c.var)) > tol) {
                    if (++iters > max_iters) return {SolveStatus::MaxIterations, iters};
                    const StepOutcome out = improving_step(c.var, degen_streak, bland);
                    if (out == StepOutcome::Unbounded) return {SolveStatus::Unbounded, iters};
                    if (out == StepOutcome::RefactorFailed)
                        return {SolveStatus::InternalError, iters};
                    made_progress = true;
                }
            }
            // A complete working set with no strict violation anywhere means
            // the dropped tail cannot violate either (it was dominated), so
            // the point is optimal.
            if (!made_progress && !bland) return {SolveStatus::Optimal, iters};
        }
    }

  public:
    // Row multipliers of the last optimize(); optimal duals when Optimal.
    const std::vector<double>& duals() const { return pi_; }

    // Structural solution with basic values clamped to [0,1].
    std::vector<double> primal() const {
        std::vector<double> z(ncols_, 0.0);
        for (std::int64_t j = 0; j < ncols_; ++j)
            if (col_status_[j] == Status::Upper) z[j] = 1.0;
        for (std::int64_t p = 0; p < m_; ++p)
            if (basis_[p] >= 0) z[basis_[p]] = std::clamp(xb_[p], 0.0, 1.0);
        return z;
    }

    double primal_objective() const {
        double obj = 0.0;
        for (std::int64_t j = 0; j < ncols_; ++j)
            if (col_status_[j] == Status::Upper) obj += rewards_[j];
        for (std::int64_t p = 0; p < m_; ++p)
            if (basis_[p] >= 0) obj += rewards_[basis_[p]] * std::clamp(xb_[p], 0.0, 1.0);
        return obj;
    }

private:
    enum class Status : std::uint8_t { Lower, Upper, Basic };

    struct Cand {
        double viol;
        std::int32_t var;
    };

    static constexpr double kInf = std::numeric_limits<double>::infinity();
    static constexpr double kPivotEps = 1e-10;
    static constexpr double kRatioTie = 1e-10;
    static constexpr double kDegenEps = 1e-11;
    static constexpr double kFeasTol = 1e-7;
    static constexpr std::size_t kCandCap = 2048;
    static constexpr std::int64_t kSubsolveCols = 2048;

    // Variable ids: structural j >= 0, slack i encoded as -1-i.
    static std::int32_t slack_id(std::int64_t i) { return static_cast<std::int32_t>(-1 - i); }
    std::int64_t var_rank(std::int32_t v) const { return v >= 0 ? v : ncols_ + (-1 - v); }
    double var_upper(std::int32_t v) const { return v >= 0 ? 1.0 : kInf; }
    double bound_span(std::int32_t v) const { return v >= 0 ? 1.0 : kInf; }

    Status get_status(std::int32_t v) const {
        return v >= 0 ? col_status_[v] : slack_status_[-1 - v];
    }
    void set_status(std::int32_t v, Status s) {
        if (v >= 0)
            col_status_[v] = s;
        else
            slack_status_[-1 - v] = s;
    }
    bool is_upper(std::int32_t v) const { return get_status(v) == Status::Upper; }

    const double* column(std::int64_t j) const { return cols_.data() + j * m_; }

    double reduced_cost(std::int32_t v) const {
        if (v < 0) return -pi_[-1 - v];
        const double* a = column(v);
        double rc = rewards_[v];
        for (std::int64_t i = 0; i < m_; ++i) rc -= pi_[i] * a[i];
        return rc;
    }

    // Margin of the working set, scaled to the drift this session actually
    // sees: single-step resolves settle on a narrow band, batched resolves
    // keep a wide one.
    double working_set_margin() const {
        double top = 0.0;
        for (std::int64_t i = 0; i < m_; ++i) top = std::max(top, std::abs(pi_[i]));
        return margin_scale_ * (1.0 + top);
    }

    enum class StepOutcome { Flip, Pivot, Unbounded, RefactorFailed };

    // One improving move for `var`: ratio test, then a bound flip or a pivot.
    StepOutcome improving_step(std::int32_t var, std::int64_t& degen_streak, bool& bland) {
        const int dir = is_upper(var) ? -1 : +1;
        compute_direction(var);
        double theta = bound_span(var);
        std::int64_t leave = -1;
        double leave_delta = 0.0;
        for (std::int64_t p = 0; p < m_; ++p) {
            const double delta = -dir * w_[p];
            if (std::abs(delta) <= kPivotEps) continue;
            double cand_theta;
            if (delta < 0.0) {
                cand_theta = xb_[p] / (-delta);  // falls toward its lower bound 0
            } else {
                const double hi = var_upper(basis_[p]);
                if (hi == kInf) continue;
                cand_theta = (hi - xb_[p]) / delta;
            }
            if (cand_theta < 0.0) cand_theta = 0.0;
            if (cand_theta < theta - kRatioTie ||
                (cand_theta < theta + kRatioTie &&
                 (leave < 0 || var_rank(basis_[p]) < var_rank(basis_[leave])))) {
                theta = cand_theta;
                leave = p;
                leave_delta = delta;
            }
        }
        if (theta >= kInf) return StepOutcome::Unbounded;

        if (leave < 0) {
            ++stats_.flips;
            flip_bound(var);
            recompute_xb();
            degen_streak = 0;
            return StepOutcome::Flip;
        }
        const std::int32_t leaving = basis_[leave];
        set_status(leaving, leave_delta < 0.0 ? Status::Lower : Status::Upper);
        if (leave_delta >= 0.0 && leaving >= 0) add_consumed(leaving, +1.0);
        if (is_upper(var)) add_consumed(var, -1.0);
        set_status(var, Status::Basic);
        basis_[leave] = var;
        if (!refactor()) return StepOutcome::RefactorFailed;
        recompute_xb();
        compute_pi();
        ++stats_.pivots;
        if (theta <= kDegenEps) {
            ++stats_.degen_pivots;
            if (++degen_streak > 40) bland = true;
        } else {
            degen_streak = 0;
            bland = false;
        }
        return StepOutcome::Pivot;
    }

    void add_consumed(std::int32_t v, double sign) {
        const double* a = column(v);
        for (std::int64_t i = 0; i < m_; ++i) consumed_[i] += sign * a[i];
    }

    void flip_bound(std::int32_t v) {
        if (get_status(v) == Status::Lower) {
            set_status(v, Status::Upper);
            add_consumed(v, +1.0);
        } else {
            set_status(v, Status::Lower);
            add_consumed(v, -1.0);
        }
    }

    void recompute_consumed() {
        std::fill(consumed_.begin(), consumed_.end(), 0.0);
        for (std::int64_t j = 0; j < ncols_; ++j)
            if (col_status_[j] == Status::Upper) add_consumed(static_cast<std::int32_t>(j), +1.0);
    }

    void recompute_xb() {
        for (std::int64_t p = 0; p < m_; ++p) {
            double v = 0.0;
            for (std::int64_t i = 0; i < m_; ++i) v += binv_[p * m_ + i] * (cap_[i] - consumed_[i]);
            xb_[p] = v;
        }
    }

    bool basic_infeasible(double ftol) const {
        for (std::int64_t p = 0; p < m_; ++p)
            if (xb_[p] < -ftol || xb_[p] > var_upper(basis_[p]) + ftol) return true;
        return false;
    }

    void compute_pi() {
        for (std::int64_t i = 0; i < m_; ++i) {
            double v = 0.0;
            for (std::int64_t p = 0; p < m_; ++p)
                if (basis_[p] >= 0) v += rewards_[basis_[p]] * binv_[p * m_ + i];
            pi_[i] = v;
        }
    }

    // w = Binv * column(entering)
    void compute_direction(std::int32_t v) {
        w_.assign(m_, 0.0);
        if (v >= 0) {
            const double* a = column(v);
            for (std::int64_t p = 0; p < m_; ++p) {
                double s = 0.0;
                for (std::int64_t i = 0; i < m_; ++i) s += binv_[p * m_ + i] * a[i];
                w_[p] = s;
            }
        } else {
            const std::int64_t i = -1 - v;
            for (std::int64_t p = 0; p < m_; ++p) w_[p] = binv_[p * m_ + i];
        }
    }

    void price(std::vector<Cand>& cands, double tol, double margin, bool bland) const {
        const double floor = tol - margin;
        cands.clear();
        for (std::int64_t j = 0; j < ncols_; ++j) {
            const Status s = col_status_[j];
            if (s == Status::Basic) continue;
            const double* a = column(j);
            double rc = rewards_[j];
            for (std::int64_t i = 0; i < m_; ++i) rc -= pi_[i] * a[i];
            const double viol = (s == Status::Lower) ? rc : -rc;
            if (viol > floor) {
                cands.push_back({viol, static_cast<std::int32_t>(j)});
                if (bland) return;  // Bland: first violating index wins
            }
        }
        for (std::int64_t i = 0; i < m_; ++i) {
            if (slack_status_[i] != Status::Lower) continue;
            const double viol = -pi_[i];
            if (viol > floor) {
                cands.push_back({viol, slack_id(i)});
                if (bland) return;
            }
        }
        auto ahead = [this](const Cand& x, const Cand& y) {
            if (x.viol != y.viol) return x.viol > y.viol;
            return var_rank(x.var) < var_rank(y.var);
        };
        // Keep only the strongest entries; dropped ones reappear in the next
        // full pass if they still violate. The comparator is a strict total
        // order, so the kept set is deterministic.
        if (cands.size() > kCandCap) {
            std::nth_element(cands.begin(), cands.begin() + (kCandCap - 1), cands.end(), ahead);
            cands.resize(kCandCap);
        }
        if (cands.size() > 1) std::stable_sort(cands.begin(), cands.end(), ahead);
    }

    void cold_start() {
        std::fill(col_status_.begin(), col_status_.end(), Status::Lower);
        std::fill(slack_status_.begin(), slack_status_.end(), Status::Basic);
        for (std::int64_t i = 0; i < m_; ++i) basis_[i] = slack_id(i);
        // One resource: the value-density order is exactly the optimal
        // acceptance order, nothing beats it. Several resources: the right
        // weighting is the dual prices, so preset by reduced cost under a
        // supplied hint, deriving one from a stride subsample if needed.
        if (m_ == 1) {
            greedy_preset();
        } else {
            if (!has_hint_ && ncols_ >= kSubsolveCols * 2) subsample_hint();
            if (has_hint_)
                hint_preset();
            else
                greedy_preset();
        }
        has_hint_ = false;
        recompute_consumed();
    }

    void subsample_hint() {
        const std::int64_t stride = (ncols_ + kSubsolveCols - 1) / kSubsolveCols;
        PackingLpSolver sub(m_);
        Order tmp;
        tmp.demand.resize(m_);
        std::int64_t taken = 0;
        for (std::int64_t j = 0; j < ncols_; j += stride) {
            const double* a = column(j);
            tmp.reward = rewards_[j];
            tmp.demand.assign(a, a + m_);
            sub.add_order(tmp);
            ++taken;
        }
        std::vector<double> cap(m_);
        const double scale = static_cast<double>(taken) / static_cast<double>(ncols_);
        for (std::int64_t i = 0; i < m_; ++i) cap[i] = cap_[i] * scale;
        sub.set_capacity(cap);
        if (sub.optimize(1e-7).status != SolveStatus::Optimal) return;
        price_hint_ = sub.duals();
        for (double& p : price_hint_) p = std::max(p, 0.0);
        has_hint_ = true;
    }

    // Crash start: flip columns profitable under the hint prices while
    // capacity allows, most profitable first.
    void hint_preset() {
        std::vector<std::pair<double, std::int32_t>> cands;
        for (std::int64_t j = 0; j < ncols_; ++j) {
            if (col_status_[j] == Status::Basic) continue;
            const double* a = column(j);
            double rc = rewards_[j];
            for (std::int64_t i = 0; i < m_; ++i) rc -= price_hint_[i] * a[i];
            if (rc > 0.0) cands.emplace_back(rc, static_cast<std::int32_t>(j));
        }
        std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first > y.first;
            return x.second < y.second;
        });
        std::vector<double> used(m_, 0.0);
        for (const auto& [rc, j] : cands) {
            const double* a = column(j);
            bool fits = true;
            for (std::int64_t i = 0; i < m_; ++i)
                if (used[i] + a[i] > cap_[i]) {
                    fits = false;
                    break;
                }
            if (!fits) continue;
            for (std::int64_t i = 0; i < m_; ++i) used[i] += a[i];
            col_status_[j] = Status::Upper;
        }
    }

    // Columns ordered by value density, maintained incrementally: appended
    // tails are sorted and merged so repeated cold starts never re-sort the
    // whole history.
    void ensure_ratio_order() {
        if (sorted_upto_ == ncols_) return;
        const std::int64_t old_count = sorted_upto_;
        scores_.resize(ncols_);
        for (std::int64_t j = old_count; j < ncols_; ++j) {
            const double* a = column(j);
            double denom = 1e-12;
            for (std::int64_t i = 0; i < m_; ++i) denom += std::max(a[i], 0.0);
            scores_[j] = rewards_[j] > 0.0 ? rewards_[j] / denom : 0.0;
            ratio_order_.push_back(static_cast<std::int32_t>(j));
        }
        auto better = [this](std::int32_t x, std::int32_t y) {
            if (scores_[x] != scores_[y]) return scores_[x] > scores_[y];
            return x < y;
        };
        std::stable_sort(ratio_order_.begin() + old_count, ratio_order_.end(), better);
        std::inplace_merge(ratio_order_.begin(), ratio_order_.begin() + old_count,
                           ratio_order_.end(), better);
        sorted_upto_ = ncols_;
    }

    // Flip high-value columns to their upper bound while capacity allows;
    // just a starting point, the simplex loop certifies optimality.
    void greedy_preset() {
        ensure_ratio_order();
        std::vector<double> used(m_, 0.0);
        for (std::int32_t j : ratio_order_) {
            if (rewards_[j] <= 0.0) continue;
            const double* a = column(j);
            bool fits = true;
            for (std::int64_t i = 0; i < m_; ++i)
                if (used[i] + a[i] > cap_[i]) {
                    fits = false;
                    break;
                }
            if (!fits) continue;
            for (std::int64_t i = 0; i < m_; ++i) used[i] += a[i];
            col_status_[j] = Status::Upper;
        }
    }

    void warm_start() {
        // Appended columns are already nonbasic at their lower bound and
        // consumed_ is maintained incrementally across solves, so the
        // previous state carries over as-is.
    }

    // Dual simplex repair for a warm start whose basics drifted out of their
    // bounds after a capacity change. Uses the bound-flipping ratio test:
    // eligible nonbasic variables are flipped through in |ratio| order until
    // the remaining violation fits inside one entering variable, which then
    // pivots in. Reduced costs stay sign-feasible throughout, so the primal
    // loop afterwards has little left to do. Returns false when a violation
    // cannot be pivoted away.
    bool dual_repair() {
        struct DualCand {
            double mag;     // |rc / alpha|, the dual step this variable allows
            double absorb;  // |alpha| * span, primal violation it can soak up
            std::int32_t var;
        };
        auto later = [](const DualCand& x, const DualCand& y) { return x.mag > y.mag; };
        std::vector<DualCand> heap;

        for (std::int64_t round = 0; round <= m_ + ncols_; ++round) {
            std::int64_t p_star = -1;
            double worst = kFeasTol;
            int sigma = 0;  // +1: basic below lower bound, -1: above upper
            for (std::int64_t p = 0; p < m_; ++p) {
                const double below = -xb_[p];
                const double above = xb_[p] - var_upper(basis_[p]);
                if (below > worst) {
                    worst = below;
                    p_star = p;
                    sigma = +1;
                }
                if (above > worst) {
                    worst = above;
                    p_star = p;
                    sigma = -1;
                }
            }
            if (p_star < 0) return true;
            ++stats_.dual_rounds;

            compute_pi();
            const double* rho = binv_.data() + p_star * m_;
            // Entries beyond the ratio cap can neither flip nor enter unless
            // the near ones cannot absorb the violation, so scan small first
            // and fall back to the unrestricted scan only if they fall short.
            double ratio_cap = working_set_margin();
            for (int attempt = 0; attempt < 2; ++attempt) {
                heap.clear();
                double absorbable = 0.0;
                auto consider = [&](std::int32_t v, double rc, double alpha) {
                    const bool at_lower = get_status(v) == Status::Lower;
                    if (at_lower ? !(sigma * alpha < -kPivotEps) : !(sigma * alpha > kPivotEps))
                        return;
                    const double mag = std::abs(rc) < 1e-15 ? 0.0 : std::abs(rc / alpha);
                    if (mag > ratio_cap) return;
                    const double span_absorb = std::abs(alpha) * bound_span(v);
                    absorbable += span_absorb;
                    heap.push_back({mag, span_absorb, v});
                };
                for (std::int64_t j = 0; j < ncols_; ++j) {
                    if (col_status_[j] == Status::Basic) continue;
                    const double* a = column(j);
                    double rc = rewards_[j];
                    double alpha = 0.0;
                    for (std::int64_t i = 0; i < m_; ++i) {
                        rc -= pi_[i] * a[i];
                        alpha += rho[i] * a[i];
                    }
                    consider(static_cast<std::int32_t>(j), rc, alpha);
                }
                for (std::int64_t i = 0; i < m_; ++i)
                    if (slack_status_[i] == Status::Lower)
                        consider(slack_id(i), -pi_[i], rho[i]);
                if (absorbable >= worst || attempt == 1) break;
                ratio_cap = kInf;
            }
            if (heap.empty()) return false;
            std::make_heap(heap.begin(), heap.end(), later);

            double violation = worst;
            std::int32_t enter = -1;
            while (!heap.empty()) {
                std::pop_heap(heap.begin(), heap.end(), later);
                const DualCand c = heap.back();
                heap.pop_back();
                if (c.absorb >= violation - kDegenEps) {
                    enter = c.var;
                    break;
                }
                flip_bound(c.var);
                violation -= c.absorb;
                ++stats_.flips;
            }
            if (enter == -1) return false;

            const std::int32_t leaving = basis_[p_star];
            set_status(leaving, sigma > 0 ? Status::Lower : Status::Upper);
            if (sigma < 0 && leaving >= 0) add_consumed(leaving, +1.0);
            if (is_upper(enter)) add_consumed(enter, -1.0);
            set_status(enter, Status::Basic);
            basis_[p_star] = enter;
            if (!refactor()) return false;
            recompute_xb();
        }
        return !basic_infeasible(kFeasTol);
    }

    // The capacity moved enough that some basic variable left its bounds.
    // Demote basics to their nearest bound, restore the slack basis, then
    // unflip cheap columns until every row fits again.
    void repair_feasibility() {
        for (std::int64_t p = 0; p < m_; ++p) {
            const std::int32_t v = basis_[p];
            if (v >= 0) col_status_[v] = (xb_[p] > 0.5) ? Status::Upper : Status::Lower;
        }
        std::fill(slack_status_.begin(), slack_status_.end(), Status::Basic);
        for (std::int64_t i = 0; i < m_; ++i) basis_[i] = slack_id(i);
        recompute_consumed();

        for (std::int64_t guard = 0; guard <= ncols_; ++guard) {
            std::int64_t worst = -1;
            double worst_excess = 1e-9;
            for (std::int64_t i = 0; i < m_; ++i) {
                const double excess = consumed_[i] - cap_[i];
                if (excess > worst_excess) {
                    worst_excess = excess;
                    worst = i;
                }
            }
            if (worst < 0) break;
            std::int64_t pick = -1;
            for (std::int64_t j = 0; j < ncols_; ++j) {
                if (col_status_[j] != Status::Upper || column(j)[worst] <= 0.0) continue;
                if (pick < 0 || rewards_[j] < rewards_[pick]) pick = j;
            }
            if (pick < 0) break;  // violation not caused by upper-bounded columns
            col_status_[pick] = Status::Lower;
            add_consumed(static_cast<std::int32_t>(pick), -1.0);
        }
    }

    // Dense inverse of the basis matrix by Gauss-Jordan with partial pivoting.
    bool refactor() {
        std::vector<double>& a = scratch_;
        a.assign(m_ * 2 * m_, 0.0);
        const std::int64_t w = 2 * m_;
        for (std::int64_t p = 0; p < m_; ++p) {
            const std::int32_t v = basis_[p];
            if (v >= 0) {
                const double* col = column(v);
                for (std::int64_t i = 0; i < m_; ++i) a[i * w + p] = col[i];
            } else {
                a[(-1 - v) * w + p] = 1.0;
            }
        }
        for (std::int64_t i = 0; i < m_; ++i) a[i * w + m_ + i] = 1.0;

        for (std::int64_t c = 0; c < m_; ++c) {
            std::int64_t piv = c;
            for (std::int64_t r = c + 1; r < m_; ++r)
                if (std::abs(a[r * w + c]) > std::abs(a[piv * w + c])) piv = r;
            if (std::abs(a[piv * w + c]) < 1e-12) return false;
            if (piv != c)
                for (std::int64_t k = 0; k < w; ++k) std::swap(a[c * w + k], a[piv * w + k]);
            const double inv = 1.0 / a[c * w + c];
            for (std::int64_t k = 0; k < w; ++k) a[c * w + k] *= inv;
            for (std::int64_t r = 0; r < m_; ++r) {
                if (r == c) continue;
                const double factor = a[r * w + c];
                if (factor == 0.0) continue;
                for (std::int64_t k = 0; k < w; ++k) a[r * w + k] -= factor * a[c * w + k];
            }
        }
        for (std::int64_t r = 0; r < m_; ++r)
            for (std::int64_t c = 0; c < m_; ++c) binv_[r * m_ + c] = a[r * w + m_ + c];
        return true;
    }

    std::int64_t m_;
    std::int64_t ncols_ = 0;
    std::vector<double> cols_;  // column-major, m_ per column
    std::vector<double> rewards_;
    std::vector<double> cap_;
    std::vector<Status> col_status_;
    std::vector<Status> slack_status_;
    std::vector<std::int32_t> basis_;
    std::vector<double> binv_;
    std::vector<double> consumed_;
    std::vector<double> xb_;
    std::vector<double> pi_;
    std::vector<double> w_;
    std::vector<double> scratch_;
    std::vector<std::int32_t> ratio_order_;
    std::vector<double> scores_;
    std::vector<double> price_hint_;
    std::int64_t sorted_upto_ = 0;
    double margin_scale_ = 0.25;
    bool has_hint_ = false;
    SolverStats stats_;
    bool has_state_ = false;
};

}  // namespace olp
