#pragma once
/// @file trace.hpp
/// @brief Position records exchanged between the engine and the metrics.

#include "momo/group_models.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

namespace momo {

struct TraceRecord {
    double t{0.0};
    NodeId node_id{0};
    double x{0.0};
    double y{0.0};
    std::optional<double> v;      ///< absent for nodes without a speed vector
    std::optional<double> theta;
    NodeMode mode;

    [[nodiscard]] Position position() const noexcept { return {x, y}; }
};

/// Records sorted by (t, node_id).
struct Trace {
    std::vector<TraceRecord> records;

    [[nodiscard]] bool empty() const noexcept { return records.empty(); }

    /// Per-node record sequences, each in time order.
    [[nodiscard]] std::map<NodeId, std::vector<const TraceRecord*>> by_node() const
    {
        std::map<NodeId, std::vector<const TraceRecord*>> out;
        for (const auto& r : records)
            out[r.node_id].push_back(&r);
        return out;
    }

    /// Distinct sample times in increasing order.
    [[nodiscard]] std::vector<double> times() const
    {
        std::vector<double> ts;
        for (const auto& r : records)
            if (ts.empty() || ts.back() != r.t)
                ts.push_back(r.t);
        return ts;
    }

    /// All records stamped exactly `t`.
    [[nodiscard]] std::vector<const TraceRecord*> at(double t) const
    {
        auto lo = std::lower_bound(records.begin(), records.end(), t,
                                   [](const TraceRecord& r, double v) { return r.t < v; });
        std::vector<const TraceRecord*> out;
        for (; lo != records.end() && lo->t == t; ++lo)
            out.push_back(&*lo);
        return out;
    }
};

}  // namespace momo
