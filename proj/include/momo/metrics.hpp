#pragma once
/**
 * @file metrics.hpp
 * @brief Trace measurements: bound-violation rates, average speed, group
 *        distances and spatial occupancy histograms.
 *
 * Linear speed and heading between consecutive records of a node are derived
 * from the displacement vector (minimum image on a torus), never from stored
 * speed vectors, so nodes that carry no vector are measured the same way as
 * the others.
 *
 * A violation is counted only if it holds for every position consistent with
 * the precision of the stored coordinates: double rounding always, and the
 * text rounding when MetricOptions::significant_digits is set (traces read
 * back from files). Headings of very short moves are otherwise dominated by
 * representation error.
 */

#include "momo/kinematics.hpp"
#include "momo/trace.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace momo {

struct MetricOptions {
    double relative_tolerance{1e-9};
    double min_displacement_m{1e-6};   ///< shorter moves inherit the previous heading
    std::optional<int> significant_digits;
};

struct ViolationReport {
    double speed_violation_pct{0.0};
    double rotation_violation_pct{0.0};
    std::size_t updates_counted{0};
    std::size_t rotation_updates_counted{0};
    std::size_t speed_violations{0};
    std::size_t rotation_violations{0};
};

namespace detail {
/// Half a unit in the last kept digit of `v` printed with `digits` significant digits.
inline double rounding_bound(double v, int digits)
{
    if (v == 0.0)
        return 0.0;
    double e = std::floor(std::log10(std::fabs(v)));
    return 0.5 * std::pow(10.0, e - digits + 1) * (1.0 + 1e-6);
}
}  // namespace detail

/// Streaming measurement over records arriving in time order per node.
class MetricsAccumulator {
public:
    MetricsAccumulator(KinematicLimits limits, Playground geometry, MetricOptions options = {})
        : limits_(limits), geometry_(geometry), options_(options)
    {
    }

    void add(const TraceRecord& r)
    {
        if (r.node_id >= tracks_.size())
            tracks_.resize(r.node_id + 1);
        Track& tr = tracks_[r.node_id];
        if (!tr.has_last) {
            tr.has_last = true;
            tr.last = r;
            return;
        }
        const TraceRecord& a = tr.last;
        double dt = r.t - a.t;
        if (!(dt > 0.0))
            throw PreconditionError("metrics: records of node " + std::to_string(r.node_id) +
                                    " are not strictly increasing in time");
        Displacement d = geometry_.displacement(a.position(), r.position());
        double len = d.norm();
        double slack = position_error(a) + position_error(r);
        double speed = len / dt;

        ++pairs_;
        speed_sum_ += speed;
        auto& bucket = samples_[r.t];
        bucket.first += speed;
        bucket.second += 1;
        if ((len - slack) / dt > bound(limits_.v_max))
            ++speed_violations_;

        if (len > options_.min_displacement_m && len > slack) {
            double heading = d.heading();
            double unc = slack > 0.0 ? std::asin(slack / len) : 0.0;
            if (tr.has_heading) {
                ++rotation_pairs_;
                double turn = std::fabs(angular_difference(tr.heading, heading)) - unc - tr.heading_uncertainty;
                if (turn / dt > bound(limits_.gamma_max))
                    ++rotation_violations_;
            }
            tr.has_heading = true;
            tr.heading = heading;
            tr.heading_uncertainty = unc;
        } else if (tr.has_heading) {
            // Too short to define a direction: the previous heading carries over.
            ++rotation_pairs_;
        }
        tr.last = r;
    }

    [[nodiscard]] ViolationReport report() const
    {
        ViolationReport rep;
        rep.updates_counted = pairs_;
        rep.rotation_updates_counted = rotation_pairs_;
        rep.speed_violations = speed_violations_;
        rep.rotation_violations = rotation_violations_;
        rep.speed_violation_pct = pairs_ ? 100.0 * static_cast<double>(speed_violations_) / static_cast<double>(pairs_) : 0.0;
        rep.rotation_violation_pct =
            rotation_pairs_ ? 100.0 * static_cast<double>(rotation_violations_) / static_cast<double>(rotation_pairs_) : 0.0;
        return rep;
    }

    [[nodiscard]] double average_speed() const
    {
        return pairs_ ? speed_sum_ / static_cast<double>(pairs_) : 0.0;
    }

    /// Network-wide mean measured speed per sample time (time of the later record of each pair).
    [[nodiscard]] std::vector<std::pair<double, double>> speed_series() const
    {
        std::vector<std::pair<double, double>> out;
        out.reserve(samples_.size());
        for (const auto& [t, b] : samples_)
            out.emplace_back(t, b.first / static_cast<double>(b.second));
        return out;
    }

private:
    struct Track {
        bool has_last{false};
        TraceRecord last;
        bool has_heading{false};
        double heading{0.0};
        double heading_uncertainty{0.0};
    };

    [[nodiscard]] double bound(double b) const noexcept { return b * (1.0 + options_.relative_tolerance) + kBoundTolerance; }

    /// Bound on how far the stored position may sit from the true one: a few
    /// ulps of double precision, plus the text rounding when configured.
    [[nodiscard]] double position_error(const TraceRecord& r) const
    {
        double err = 8.0 * std::numeric_limits<double>::epsilon() * (std::fabs(r.x) + std::fabs(r.y));
        if (options_.significant_digits)
            err += std::hypot(detail::rounding_bound(r.x, *options_.significant_digits),
                              detail::rounding_bound(r.y, *options_.significant_digits));
        return err;
    }

    KinematicLimits limits_;
    Playground geometry_;
    MetricOptions options_;
    std::vector<Track> tracks_;
    std::size_t pairs_{0};
    std::size_t rotation_pairs_{0};
    std::size_t speed_violations_{0};
    std::size_t rotation_violations_{0};
    double speed_sum_{0.0};
    std::map<double, std::pair<double, std::size_t>> samples_;
};

[[nodiscard]] inline ViolationReport violation_report(const Trace& trace, const KinematicLimits& limits,
                                                      const Playground& geometry, const MetricOptions& options = {})
{
    MetricsAccumulator acc(limits, geometry, options);
    for (const auto& r : trace.records)
        acc.add(r);
    return acc.report();
}

[[nodiscard]] inline double speed_violation_rate(const Trace& trace, const KinematicLimits& limits,
                                                 const Playground& geometry, const MetricOptions& options = {})
{
    return violation_report(trace, limits, geometry, options).speed_violation_pct;
}

[[nodiscard]] inline double rotation_violation_rate(const Trace& trace, const KinematicLimits& limits,
                                                    const Playground& geometry, const MetricOptions& options = {})
{
    return violation_report(trace, limits, geometry, options).rotation_violation_pct;
}

[[nodiscard]] inline double average_speed(const Trace& trace, const Playground& geometry)
{
    MetricsAccumulator acc(KinematicLimits{}, geometry);
    for (const auto& r : trace.records)
        acc.add(r);
    return acc.average_speed();
}

struct GroupDistances {
    double intra{0.0};    ///< mean pairwise distance between members of the same group
    double overall{0.0};  ///< mean pairwise distance over all node pairs
};

/// Distances over one time slice of records.
[[nodiscard]] inline GroupDistances group_distances(std::span<const TraceRecord* const> slice,
                                                    std::span<const GroupSpec> groups, const Playground& geometry)
{
    std::map<NodeId, std::uint32_t> group_of;
    for (const auto& g : groups)
        for (NodeId id : g.member_ids)
            group_of[id] = g.group_id;

    double intra_sum = 0.0, all_sum = 0.0;
    std::size_t intra_n = 0, all_n = 0;
    for (std::size_t i = 0; i < slice.size(); ++i) {
        for (std::size_t j = i + 1; j < slice.size(); ++j) {
            double d = geometry.distance(slice[i]->position(), slice[j]->position());
            all_sum += d;
            ++all_n;
            auto gi = group_of.find(slice[i]->node_id);
            auto gj = group_of.find(slice[j]->node_id);
            if (gi != group_of.end() && gj != group_of.end() && gi->second == gj->second) {
                intra_sum += d;
                ++intra_n;
            }
        }
    }
    return {intra_n ? intra_sum / static_cast<double>(intra_n) : 0.0,
            all_n ? all_sum / static_cast<double>(all_n) : 0.0};
}

[[nodiscard]] inline GroupDistances group_distances(const Trace& trace, std::span<const GroupSpec> groups, double t,
                                                    const Playground& geometry)
{
    auto slice = trace.at(t);
    return group_distances(std::span<const TraceRecord* const>(slice), groups, geometry);
}

struct Window {
    double x0{0.0};
    double y0{0.0};
    double x1{1.0};
    double y1{1.0};
};

/// Occupancy frequencies over a regular grid; cells indexed row-major with
/// rows along y.
struct DensityGrid {
    Window window;
    double resolution{1.0};
    std::size_t nx{0};
    std::size_t ny{0};
    std::vector<double> mass;
    std::size_t samples{0};

    [[nodiscard]] double at(std::size_t ix, std::size_t iy) const { return mass[iy * nx + ix]; }
};

class HistogramAccumulator {
public:
    HistogramAccumulator(Window window, double resolution)
    {
        if (!(resolution > 0.0))
            throw PreconditionError("spatial_histogram: resolution must be positive");
        if (!(window.x1 > window.x0 && window.y1 > window.y0))
            throw PreconditionError("spatial_histogram: degenerate window");
        grid_.window = window;
        grid_.resolution = resolution;
        grid_.nx = static_cast<std::size_t>(std::llround((window.x1 - window.x0) / resolution));
        grid_.ny = static_cast<std::size_t>(std::llround((window.y1 - window.y0) / resolution));
        grid_.nx = std::max<std::size_t>(grid_.nx, 1);
        grid_.ny = std::max<std::size_t>(grid_.ny, 1);
        counts_.assign(grid_.nx * grid_.ny, 0);
    }

    void add(const Position& p)
    {
        const Window& w = grid_.window;
        if (p.x < w.x0 || p.x >= w.x1 || p.y < w.y0 || p.y >= w.y1)
            return;
        auto ix = std::min(grid_.nx - 1, static_cast<std::size_t>((p.x - w.x0) / grid_.resolution));
        auto iy = std::min(grid_.ny - 1, static_cast<std::size_t>((p.y - w.y0) / grid_.resolution));
        ++counts_[iy * grid_.nx + ix];
        ++grid_.samples;
    }

    [[nodiscard]] DensityGrid result() const
    {
        DensityGrid g = grid_;
        g.mass.assign(counts_.size(), 0.0);
        if (g.samples > 0)
            for (std::size_t i = 0; i < counts_.size(); ++i)
                g.mass[i] = static_cast<double>(counts_[i]) / static_cast<double>(g.samples);
        return g;
    }

private:
    DensityGrid grid_;
    std::vector<std::size_t> counts_;
};

[[nodiscard]] inline DensityGrid spatial_histogram(const Trace& trace, const Window& window, double resolution)
{
    HistogramAccumulator acc(window, resolution);
    for (const auto& r : trace.records)
        acc.add(r.position());
    return acc.result();
}

}  // namespace momo
