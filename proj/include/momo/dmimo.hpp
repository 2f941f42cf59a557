#pragma once
/**
 * @file dmimo.hpp
 * @brief Relay selection for a distributed MIMO link under candidate mobility.
 *
 * A transmitter TX picks L relays out of K mobile candidates scattered around
 * it; the relays form a virtual array toward N receive nodes clustered around
 * RX, d metres away. The experiment measures how fast a selection goes stale:
 * how many of the selected relays are still among the best L after T_el
 * seconds, and the rate the stale selection achieves.
 *
 * Coordinates reported to callers are relative to TX, with RX on the +x axis.
 */

#include "momo/engine.hpp"
#include "momo/metrics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace momo {

enum class DmimoFlavor { rw, rpgm1, rpgm2, momo };

[[nodiscard]] inline std::string to_string(DmimoFlavor f)
{
    switch (f) {
    case DmimoFlavor::rw: return "rw";
    case DmimoFlavor::rpgm1: return "rpgm1";
    case DmimoFlavor::rpgm2: return "rpgm2";
    default: return "momo";
    }
}

inline constexpr DmimoFlavor kAllFlavors[] = {DmimoFlavor::rw, DmimoFlavor::rpgm1, DmimoFlavor::rpgm2,
                                              DmimoFlavor::momo};

struct ChannelModel {
    enum class Fading { none, rayleigh };
    double pathloss_exponent{2.0};
    Fading fading{Fading::none};
    double snr_ref_db{30.0};  ///< transmit SNR referred to 1 m

    void validate() const
    {
        if (!(pathloss_exponent > 0.0))
            throw PreconditionError("channel: path-loss exponent must be positive");
    }
};

struct DmimoScenario {
    double d_txrx_m{30.0};
    std::size_t k_candidates{20};
    std::size_t n_receivers{8};
    std::size_t l_relays{12};
    double s_m{15.0};
    double delta_t_s{0.1};
    double rx_radius_m{1.0};
    DmimoFlavor flavor{DmimoFlavor::rw};
    double v_max_mps{1.0};
    double v_min_mps{0.001};
    double a_max_mps2{5.0};
    double gamma_max_radps{kPi / 2.0};
    double model_period_s{5.0};  ///< random-walk and bounded-acceleration update period
    std::size_t selections{400};
    double selection_spacing_s{10.0};
    double warmup_s{10.0};
    std::vector<double> t_el_s{0.0, 0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0};
    ChannelModel channel;
    double histogram_side_m{20.0};
    double histogram_resolution_m{0.1};
    std::uint64_t seed{1};

    void validate() const
    {
        std::vector<std::string> p;
        if (!(d_txrx_m > 0.0))
            p.emplace_back("d_txrx_m: must be positive");
        if (k_candidates == 0 || n_receivers == 0 || l_relays == 0)
            p.emplace_back("k_candidates, n_receivers, l_relays: must be positive");
        if (l_relays >= k_candidates)
            p.emplace_back("l_relays: must be smaller than k_candidates");
        if (!(s_m > 0.0))
            p.emplace_back("s_m: must be positive");
        if (!(delta_t_s > 0.0))
            p.emplace_back("delta_t_s: must be positive");
        if (!(rx_radius_m >= 0.0))
            p.emplace_back("rx_radius_m: must be non-negative");
        if (!(v_max_mps > v_min_mps && v_min_mps >= 0.0))
            p.emplace_back("v_max_mps, v_min_mps: need 0 <= v_min < v_max");
        if (!(a_max_mps2 > 0.0 && gamma_max_radps > 0.0 && model_period_s > 0.0))
            p.emplace_back("a_max_mps2, gamma_max_radps, model_period_s: must be positive");
        if (selections == 0)
            p.emplace_back("selections: must be positive");
        if (!(selection_spacing_s > 0.0) || !(warmup_s >= 0.0))
            p.emplace_back("selection_spacing_s, warmup_s: invalid");
        if (t_el_s.empty())
            p.emplace_back("t_el_s: empty grid");
        for (double t : t_el_s)
            if (!(t >= 0.0)) {
                p.emplace_back("t_el_s: values must be non-negative");
                break;
            }
        if (!(histogram_side_m > 0.0 && histogram_resolution_m > 0.0))
            p.emplace_back("histogram_side_m, histogram_resolution_m: must be positive");
        if (!(channel.pathloss_exponent > 0.0))
            p.emplace_back("pathloss_exponent: must be positive");
        if (!p.empty())
            throw ConfigError(std::move(p));
    }
};

/// Engine setup of one mobility flavor. Candidates hold ids 0..K-1.
struct FlavorSetup {
    ExperimentConfig config;
    Position tx;  ///< TX in engine coordinates
};

[[nodiscard]] inline FlavorSetup setup_flavor(const DmimoScenario& sc)
{
    sc.validate();
    const double s = sc.s_m;
    const auto K = sc.k_candidates;
    FlavorSetup out;
    ExperimentConfig& cfg = out.config;
    cfg.limits = {sc.v_max_mps, sc.v_min_mps, sc.a_max_mps2, sc.gamma_max_radps};
    cfg.delta_t_s = sc.delta_t_s;
    cfg.seed = sc.seed;
    double t_last = sc.warmup_s + static_cast<double>(sc.selections - 1) * sc.selection_spacing_s +
                    *std::max_element(sc.t_el_s.begin(), sc.t_el_s.end());
    cfg.duration_s = std::ceil(t_last / sc.delta_t_s - 1e-9) * sc.delta_t_s;

    RandomWalkParams walk;
    walk.period_s = sc.model_period_s;

    if (sc.flavor == DmimoFlavor::rw) {
        cfg.playground = {s, s, BoundaryPolicy::reflect};
        out.tx = {s / 2.0, s / 2.0};
        for (const auto& spec : uniform_groups(K, 1)) {
            GroupConfig g;
            g.spec = spec;
            g.model = IndividualModel{walk};
            cfg.groups.push_back(std::move(g));
        }
        return out;
    }

    // Room around TX so the border never interferes.
    cfg.playground = {4.0 * s, 4.0 * s, BoundaryPolicy::reflect};
    out.tx = {2.0 * s, 2.0 * s};

    if (sc.flavor == DmimoFlavor::momo) {
        for (std::size_t i = 0; i < K; ++i) {
            GroupConfig g;
            g.spec.group_id = static_cast<std::uint32_t>(i);
            g.spec.member_ids = {static_cast<NodeId>(i), static_cast<NodeId>(K + i)};
            MoMoModel m;
            m.params = {s / 2.0, 1.0, std::nullopt};
            m.boundless.period_s = sc.model_period_s;
            m.anchors = {{static_cast<NodeId>(K + i), out.tx}};
            g.model = m;
            g.initial.kind = InitialRegion::Kind::disc;
            g.initial.disc = {out.tx, s / 2.0};
            cfg.groups.push_back(std::move(g));
        }
        return out;
    }

    GroupConfig g;
    g.spec = uniform_groups(1, K).front();
    RPGMModel m;
    if (sc.flavor == DmimoFlavor::rpgm1) {
        m.params.d_max_m = s / 2.0;
        m.reference.kind = ReferenceKind::fixed;
        m.reference.position = out.tx;
    } else {
        m.params.d_max_m = s / 4.0;
        m.reference.kind = ReferenceKind::random_walk;
        m.reference.position = out.tx;
        m.reference.walk = walk;
        m.reference.walk.fence = Disc{out.tx, s / 4.0};
    }
    g.model = m;
    cfg.groups.push_back(std::move(g));
    return out;
}

/// Path-loss gain dist^-exponent, capped at the 0.1 m value; with fading it is
/// scaled by a unit-mean exponential power draw.
[[nodiscard]] inline double channel_gain(const Position& a, const Position& b, const ChannelModel& model,
                                         RngStream& rng)
{
    double d = std::max(std::hypot(a.x - b.x, a.y - b.y), 0.1);
    double g = std::pow(d, -model.pathloss_exponent);
    if (model.fading == ChannelModel::Fading::rayleigh)
        g *= rng.exponential(1.0);
    return g;
}

/// K x N gain matrix.
[[nodiscard]] inline Eigen::MatrixXd gain_matrix(std::span<const Position> candidates, std::span<const Position> rx,
                                                 const ChannelModel& model, RngStream& rng)
{
    Eigen::MatrixXd g(static_cast<Eigen::Index>(candidates.size()), static_cast<Eigen::Index>(rx.size()));
    for (std::size_t i = 0; i < candidates.size(); ++i)
        for (std::size_t j = 0; j < rx.size(); ++j)
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = channel_gain(candidates[i], rx[j], model, rng);
    return g;
}

/// Top-L candidates by summed gain toward the array (lowest id first on ties), sorted by id.
[[nodiscard]] inline std::vector<std::size_t> select_relays(const Eigen::MatrixXd& gains, std::size_t l)
{
    const auto k = static_cast<std::size_t>(gains.rows());
    if (l > k)
        throw PreconditionError("select_relays: L exceeds the number of candidates");
    Eigen::VectorXd score = gains.rowwise().sum();
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return score(static_cast<Eigen::Index>(a)) > score(static_cast<Eigen::Index>(b));
    });
    idx.resize(l);
    std::sort(idx.begin(), idx.end());
    return idx;
}

[[nodiscard]] inline std::vector<std::size_t> select_relays(std::span<const Position> candidates,
                                                            std::span<const Position> rx, std::size_t l,
                                                            const ChannelModel& model, RngStream& rng)
{
    return select_relays(gain_matrix(candidates, rx, model, rng), l);
}

/// Size of the intersection of two id sets.
[[nodiscard]] inline std::size_t surviving_relay_count(std::vector<std::size_t> a, std::vector<std::size_t> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::size_t> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return common.size();
}

/// Mean overlap of two independent uniformly drawn L-subsets of K items.
[[nodiscard]] inline double expected_random_overlap(std::size_t l, std::size_t k)
{
    if (k == 0 || l > k)
        throw PreconditionError("expected_random_overlap: need L <= K and K > 0");
    return static_cast<double>(l) * static_cast<double>(l) / static_cast<double>(k);
}

/// log2 det(I_N + snr / L * H^T H) for an L x N gain matrix (power gains).
[[nodiscard]] inline double achievable_rate(const Eigen::MatrixXd& gains, double snr_linear)
{
    if (gains.rows() == 0)
        throw PreconditionError("achievable_rate: no transmitters");
    if (snr_linear <= 0.0)
        return 0.0;
    Eigen::MatrixXd h = gains.cwiseSqrt();
    const auto n = h.cols();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + (snr_linear / static_cast<double>(h.rows())) * h.transpose() * h;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        logdet += std::log2(llt.matrixL()(i, i));
    return 2.0 * logdet;
}

[[nodiscard]] inline double snr_linear(const ChannelModel& m) { return std::pow(10.0, m.snr_ref_db / 10.0); }

/// Receive array: N points uniform over the disc of radius r around RX, TX-relative.
[[nodiscard]] inline std::vector<Position> receive_array(const DmimoScenario& sc)
{
    RngStream rng(sc.seed, stream::layout + 0xffff);
    std::vector<Position> out;
    for (std::size_t i = 0; i < sc.n_receivers; ++i)
        out.push_back(rpgm_place({sc.d_txrx_m, 0.0}, sc.rx_radius_m, rng));
    return out;
}

struct DmimoCurve {
    std::vector<double> t_el_s;
    std::vector<double> survivors_mean;
    std::vector<double> survivors_se;
    std::vector<double> rate_mean;
    std::vector<double> rate_se;
};

struct DmimoResult {
    DmimoFlavor flavor{DmimoFlavor::rw};
    double v_max_mps{0.0};
    std::size_t selections{0};
    DmimoCurve curve;
    DensityGrid histogram;
    double max_tx_distance_m{0.0};  ///< largest candidate distance from TX over the run
    double max_abs_offset_m{0.0};   ///< largest |dx| or |dy| from TX over the run
};

namespace detail {
struct MeanVar {
    double sum{0.0}, sum2{0.0};
    std::size_t n{0};
    void add(double v)
    {
        sum += v;
        sum2 += v * v;
        ++n;
    }
    [[nodiscard]] double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    [[nodiscard]] double se() const
    {
        if (n < 2)
            return 0.0;
        double m = mean();
        double var = (sum2 - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
    }
};
}  // namespace detail

[[nodiscard]] inline DmimoResult run_dmimo_experiment(const DmimoScenario& sc)
{
    FlavorSetup setup = setup_flavor(sc);
    const auto K = sc.k_candidates;
    const double half = sc.histogram_side_m / 2.0;
    HistogramAccumulator hist({-half, -half, half, half}, sc.histogram_resolution_m);

    DmimoResult res;
    res.flavor = sc.flavor;
    res.v_max_mps = sc.v_max_mps;
    res.selections = sc.selections;

    // Candidate positions per step, TX-relative.
    std::vector<std::vector<Position>> track;
    track.reserve(setup.config.step_count() + 1);
    run(setup.config, [&](const std::vector<TraceRecord>& slice) {
        std::vector<Position> row(K);
        for (const auto& r : slice) {
            if (r.node_id >= K)
                continue;
            Position p{r.x - setup.tx.x, r.y - setup.tx.y};
            row[r.node_id] = p;
            hist.add(p);
            res.max_tx_distance_m = std::max(res.max_tx_distance_m, std::hypot(p.x, p.y));
            res.max_abs_offset_m = std::max({res.max_abs_offset_m, std::fabs(p.x), std::fabs(p.y)});
        }
        track.push_back(std::move(row));
    });
    res.histogram = hist.result();

    const auto rx = receive_array(sc);
    const double snr = snr_linear(sc.channel);
    RngStream fading(sc.seed, stream::channel + static_cast<std::uint64_t>(sc.flavor));
    std::vector<detail::MeanVar> surv(sc.t_el_s.size()), rate(sc.t_el_s.size());

    for (std::size_t e = 0; e < sc.selections; ++e) {
        double t_sel = sc.warmup_s + static_cast<double>(e) * sc.selection_spacing_s;
        auto k_sel = static_cast<std::size_t>(std::llround(t_sel / sc.delta_t_s));
        auto chosen = select_relays(gain_matrix(track.at(k_sel), rx, sc.channel, fading), sc.l_relays);
        for (std::size_t j = 0; j < sc.t_el_s.size(); ++j) {
            auto k = k_sel + static_cast<std::size_t>(std::llround(sc.t_el_s[j] / sc.delta_t_s));
            Eigen::MatrixXd g = gain_matrix(track.at(k), rx, sc.channel, fading);
            surv[j].add(static_cast<double>(surviving_relay_count(chosen, select_relays(g, sc.l_relays))));
            Eigen::MatrixXd sub(static_cast<Eigen::Index>(chosen.size()), g.cols());
            for (std::size_t i = 0; i < chosen.size(); ++i)
                sub.row(static_cast<Eigen::Index>(i)) = g.row(static_cast<Eigen::Index>(chosen[i]));
            rate[j].add(achievable_rate(sub, snr));
        }
    }
    res.curve.t_el_s = sc.t_el_s;
    for (std::size_t j = 0; j < sc.t_el_s.size(); ++j) {
        res.curve.survivors_mean.push_back(surv[j].mean());
        res.curve.survivors_se.push_back(surv[j].se());
        res.curve.rate_mean.push_back(rate[j].mean());
        res.curve.rate_se.push_back(rate[j].se());
    }
    return res;
}

/// Every flavor at both speeds, in flavor-major order. All runs share the
/// scenario seed, so flavors that ignore the speed give identical results.
[[nodiscard]] inline std::vector<DmimoResult> run_dmimo_suite(const DmimoScenario& base,
                                                              std::vector<double> speeds = {1.0, 2.0})
{
    std::vector<DmimoScenario> jobs;
    for (DmimoFlavor f : kAllFlavors)
        for (double v : speeds) {
            DmimoScenario sc = base;
            sc.flavor = f;
            sc.v_max_mps = v;
            jobs.push_back(sc);
        }
    std::vector<DmimoResult> out(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) { out[i] = run_dmimo_experiment(jobs[i]); });
    return out;
}

}  // namespace momo
