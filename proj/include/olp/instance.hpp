#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace olp {

// One arriving request: a bid and the per-resource consumption it asks for.
struct Order {
    double reward = 0.0;
    std::vector<double> demand;
};

// A full problem: horizon, capacities and the ordered request sequence.
// Invariant: capacity == horizon * avg_capacity componentwise, and every
// order's demand has resource_count entries.
struct Instance {
    std::int64_t horizon = 0;
    std::int64_t resource_count = 0;
    std::vector<double> capacity;      // b
    std::vector<double> avg_capacity;  // d = b / T, generated first
    std::vector<Order> orders;
    std::uint64_t seed = 0;
};

namespace detail {

// Shortest round-trippable decimal form.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace detail

// Flat columnar text format for replay and cross-implementation diffing.
// Line 1: "T m", line 2: capacity, then one row per order: reward then demands.
inline void save_instance(const Instance& inst, std::ostream& out) {
    out << inst.horizon << ' ' << inst.resource_count << '\n';
    for (std::int64_t i = 0; i < inst.resource_count; ++i) {
        if (i) out << ' ';
        out << detail::format_double(inst.capacity[i]);
    }
    out << '\n';
    for (const Order& o : inst.orders) {
        out << detail::format_double(o.reward);
        for (double a : o.demand) out << ' ' << detail::format_double(a);
        out << '\n';
    }
}

inline Instance load_instance(std::istream& in) {
    Instance inst;
    if (!(in >> inst.horizon >> inst.resource_count))
        throw std::runtime_error("instance header: expected 'T m'");
    if (inst.horizon < 1 || inst.resource_count < 1)
        throw std::runtime_error("instance header: T and m must be positive");
    inst.capacity.resize(inst.resource_count);
    for (double& b : inst.capacity)
        if (!(in >> b)) throw std::runtime_error("instance: truncated capacity row");
    inst.avg_capacity.resize(inst.resource_count);
    for (std::int64_t i = 0; i < inst.resource_count; ++i)
        inst.avg_capacity[i] = inst.capacity[i] / static_cast<double>(inst.horizon);
    inst.orders.resize(inst.horizon);
    for (Order& o : inst.orders) {
        if (!(in >> o.reward)) throw std::runtime_error("instance: truncated order rows");
        o.demand.resize(inst.resource_count);
        for (double& a : o.demand)
            if (!(in >> a)) throw std::runtime_error("instance: truncated order row");
    }
    return inst;
}

inline std::string instance_to_string(const Instance& inst) {
    std::ostringstream ss;
    save_instance(inst, ss);
    return ss.str();
}

// FNV-1a over the instance payload; keys the offline-oracle cache.
inline std::uint64_t instance_hash(const Instance& inst) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffULL;
            h *= 0x100000001b3ULL;
        }
    };
    feed(static_cast<std::uint64_t>(inst.horizon));
    feed(static_cast<std::uint64_t>(inst.resource_count));
    for (double b : inst.capacity) feed(std::bit_cast<std::uint64_t>(b));
    for (const Order& o : inst.orders) {
        feed(std::bit_cast<std::uint64_t>(o.reward));
        for (double a : o.demand) feed(std::bit_cast<std::uint64_t>(a));
    }
    return h;
}

}  // namespace olp
