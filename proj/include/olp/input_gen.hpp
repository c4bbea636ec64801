#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "olp/instance.hpp"
#include "olp/rng.hpp"

namespace olp {

enum class InputModel { InputI, InputII };

/// Input I: demands i.i.d. Uniform[0,2], reward independent Uniform[0,10].
template <class Rng>
Order sample_input_I(std::int64_t m, Rng& rng) {
    Order o;
    o.reward = rng.uniform(0.0, 10.0);
    o.demand.resize(m);
    for (double& a : o.demand) a = rng.uniform(0.0, 2.0);
    return o;
}

/// Input II: demands i.i.d. Normal(0.5, 1), reward is the demand sum.
/// `clip` optionally truncates each demand to [-clip, clip] before summing;
/// the untruncated form is the literal model and the default.
template <class Rng>
Order sample_input_II(std::int64_t m, Rng& rng, std::optional<double> clip = std::nullopt) {
    Order o;
    o.demand.resize(m);
    o.reward = 0.0;
    for (double& a : o.demand) {
        a = rng.normal(0.5, 1.0);
        if (clip) a = std::clamp(a, -*clip, *clip);
        o.reward += a;
    }
    return o;
}

/// Average capacities d_i i.i.d. Uniform[d_lo, d_hi].
template <class Rng>
std::vector<double> sample_capacity(std::int64_t m, double d_lo, double d_hi, Rng& rng) {
    if (!(d_lo > 0.0) || d_lo > d_hi)
        throw std::invalid_argument("sample_capacity: need 0 < d_lo <= d_hi");
    std::vector<double> d(m);
    for (double& di : d) di = rng.uniform(d_lo, d_hi);
    return d;
}

struct GenConfig {
    double d_lo = 1.0 / 3.0;
    double d_hi = 2.0 / 3.0;
    std::optional<double> clip = std::nullopt;  // Input II truncation, off by default
};

namespace detail {
// Stream tags: capacity and orders use independent streams so that
// changing T never perturbs the capacity draw.
inline constexpr std::uint64_t kCapacityStream = 0x11;
inline constexpr std::uint64_t kOrderStream = 0x22;
}  // namespace detail

/// Builds an instance from a user-supplied order sampler. Deterministic in
/// (T, m, seed, cfg, sampler): d is drawn first, then b = T * d exactly,
/// then the T orders from an independent stream.
template <class OrderSampler>
Instance generate_instance_with(std::int64_t T, std::int64_t m, OrderSampler&& sampler,
                                std::uint64_t seed, const GenConfig& cfg = {}) {
    if (T < 1) throw std::invalid_argument("generate_instance: T must be >= 1");
    if (m < 1) throw std::invalid_argument("generate_instance: m must be >= 1");
    Instance inst;
    inst.horizon = T;
    inst.resource_count = m;
    inst.seed = seed;

    RngStream cap_rng(derive_seed(seed, {detail::kCapacityStream}));
    inst.avg_capacity = sample_capacity(m, cfg.d_lo, cfg.d_hi, cap_rng);
    inst.capacity.resize(m);
    for (std::int64_t i = 0; i < m; ++i)
        inst.capacity[i] = static_cast<double>(T) * inst.avg_capacity[i];

    RngStream order_rng(derive_seed(seed, {detail::kOrderStream}));
    inst.orders.reserve(T);
    for (std::int64_t t = 0; t < T; ++t) inst.orders.push_back(sampler(m, order_rng));
    return inst;
}

inline Instance generate_instance(std::int64_t T, std::int64_t m, InputModel model,
                                  std::uint64_t seed, const GenConfig& cfg = {}) {
    if (model == InputModel::InputI)
        return generate_instance_with(
            T, m, [](std::int64_t mm, RngStream& rng) { return sample_input_I(mm, rng); }, seed,
            cfg);
    return generate_instance_with(
        T, m,
        [&cfg](std::int64_t mm, RngStream& rng) { return sample_input_II(mm, rng, cfg.clip); },
        seed, cfg);
}

}  // namespace olp
