#pragma once
/**
 * @file io.hpp
 * @brief Configuration documents, trace files, ns-2 movement export and
 *        metric reports.
 *
 * Configuration documents are JSON with the unit in every key name
 * (delta_t_s, v_max_mps, ...). Unknown keys are rejected and every problem
 * found is reported with its key path.
 *
 * Trace files are CSV:
 *
 *     t_s,node_id,x_m,y_m,v_mps,theta_rad,mode
 *     0,0,2511.5022,4031.8107,3.93370544,-2.10389227,free
 *
 * Floating values carry 9 significant digits; v and theta are empty for nodes
 * without a speed vector; mode is empty, "free" or "forced:<target id>".
 */

#include "momo/dmimo.hpp"
#include "momo/engine.hpp"
#include "momo/metrics.hpp"
#include "momo/trace.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <unistd.h>

namespace momo {

using Json = nlohmann::ordered_json;

/// Raised for unreadable files and malformed trace rows.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Number formatting

/// printf %.9g.
[[nodiscard]] inline std::string format_g9(double v)
{
    char buf[32];
    int n = std::snprintf(buf, sizeof buf, "%.9g", v);
    return {buf, static_cast<std::size_t>(n)};
}

/// Shortest text that parses back to exactly `v`.
[[nodiscard]] inline std::string format_exact(double v)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

// ---------------------------------------------------------------------------
// Files

/// Write through a temporary file in the same directory, then rename over
/// `path`. A failure leaves any previous file untouched.
inline void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body)
{
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw FormatError("cannot open " + tmp.string() + " for writing");
        try {
            body(out);
        } catch (...) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw;
        }
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw FormatError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw FormatError("cannot rename onto " + path.string());
    }
}

[[nodiscard]] inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Configuration documents

namespace detail {

/// Key reader that remembers which keys were consumed, so the rest can be
/// reported as unknown.
class Fields {
public:
    Fields(const Json& j, std::string path, std::vector<std::string>& problems)
        : j_(j), path_(std::move(path)), problems_(problems)
    {
        if (!j_.is_object())
            problem("", "expected an object");
    }

    Fields(const Fields&) = delete;
    Fields& operator=(const Fields&) = delete;

    ~Fields()
    {
        if (!j_.is_object())
            return;
        for (const auto& [k, v] : j_.items())
            if (!used_.count(k))
                problem(k, "unknown key");
    }

    [[nodiscard]] bool has(const std::string& key)
    {
        return j_.is_object() && j_.contains(key);
    }

    template <class T>
    [[nodiscard]] std::optional<T> optional(const std::string& key)
    {
        used_.insert(key);
        if (!has(key) || j_.at(key).is_null())
            return std::nullopt;
        try {
            return get<T>(j_.at(key));
        } catch (const std::exception&) {
            problem(key, std::string("expected ") + type_name<T>());
            return std::nullopt;
        }
    }

    template <class T>
    [[nodiscard]] T value(const std::string& key, T fallback)
    {
        return optional<T>(key).value_or(fallback);
    }

    template <class T>
    [[nodiscard]] T required(const std::string& key)
    {
        if (!has(key)) {
            used_.insert(key);
            problem(key, "missing required key");
            return T{};
        }
        return optional<T>(key).value_or(T{});
    }

    [[nodiscard]] const Json* child(const std::string& key, bool required)
    {
        used_.insert(key);
        if (!has(key)) {
            if (required)
                problem(key, "missing required key");
            return nullptr;
        }
        return &j_.at(key);
    }

    [[nodiscard]] std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void problem(const std::string& key, const std::string& what)
    {
        problems_.push_back((key.empty() ? (path_.empty() ? std::string("<root>") : path_) : path(key)) + ": " + what);
    }

private:
    template <class T>
    static T get(const Json& v)
    {
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number())
                throw std::invalid_argument("type");
            return v.get<double>();
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean())
                throw std::invalid_argument("type");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string())
                throw std::invalid_argument("type");
            return v.get<std::string>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer())
                throw std::invalid_argument("type");
            if (std::is_unsigned_v<T> && !v.is_number_unsigned() && v.get<long long>() < 0)
                throw std::invalid_argument("type");
            return v.get<T>();
        } else {
            return v.get<T>();
        }
    }

    template <class T>
    static const char* type_name()
    {
        if constexpr (std::is_same_v<T, double>)
            return "a number";
        else if constexpr (std::is_same_v<T, bool>)
            return "a boolean";
        else if constexpr (std::is_same_v<T, std::string>)
            return "a string";
        else if constexpr (std::is_integral_v<T>)
            return "a non-negative integer";
        else
            return "an array";
    }

    const Json& j_;
    std::string path_;
    std::vector<std::string>& problems_;
    std::set<std::string> used_;
};

inline std::optional<Disc> parse_fence(Fields& f)
{
    auto r = f.optional<double>("fence_radius_m");
    auto x = f.optional<double>("fence_center_x_m");
    auto y = f.optional<double>("fence_center_y_m");
    if (!r)
        return std::nullopt;
    return Disc{{x.value_or(0.0), y.value_or(0.0)}, *r};
}

inline GroupModel parse_model(const Json& j, const std::string& path, std::vector<std::string>& problems)
{
    Fields f(j, path, problems);
    std::string kind = f.required<std::string>("kind");
    if (kind == "random_walk") {
        RandomWalkParams p;
        std::string trig = f.value<std::string>("trigger", "timer");
        if (trig == "distance")
            p.trigger = WalkTrigger::distance;
        else if (trig != "timer")
            f.problem("trigger", "expected 'timer' or 'distance'");
        p.period_s = f.value("period_s", p.period_s);
        p.distance_m = f.value("distance_m", p.distance_m);
        p.fence = parse_fence(f);
        return IndividualModel{p};
    }
    if (kind == "ko_vaidya")
        return IndividualModel{KoVaidyaParams{f.value("mean_leg_m", 50.0)}};
    if (kind == "random_waypoint")
        return IndividualModel{RandomWaypointParams{f.value("pause_s", 0.0)}};
    if (kind == "random_direction")
        return IndividualModel{RandomDirectionParams{f.value("pause_s", 0.0)}};
    if (kind == "inertia")
        return IndividualModel{InertiaParams{f.value("period_s", 5.0), f.value("rho", 0.5)}};
    if (kind == "gauss_markov") {
        GaussMarkovParams p;
        p.period_s = f.value("period_s", p.period_s);
        p.beta = f.value("beta_per_s", p.beta);
        p.mu_x = f.value("mu_x_mps", p.mu_x);
        p.mu_y = f.value("mu_y_mps", p.mu_y);
        p.sigma_x = f.value("sigma_x_mps", p.sigma_x);
        p.sigma_y = f.value("sigma_y_mps", p.sigma_y);
        return IndividualModel{p};
    }
    if (kind == "boundless")
        return IndividualModel{BoundlessParams{f.value("period_s", 5.0)}};
    if (kind == "static")
        return IndividualModel{StaticParams{}};
    if (kind == "momo") {
        MoMoModel m;
        m.params.d_c_m = f.value("d_c_m", m.params.d_c_m);
        m.params.rho_min = f.value("rho_min", m.params.rho_min);
        m.params.delta_u_s = f.optional<double>("delta_u_s");
        m.boundless.period_s = f.value("period_s", m.boundless.period_s);
        if (const Json* a = f.child("anchors", false)) {
            if (!a->is_array())
                f.problem("anchors", "expected an array");
            else
                for (std::size_t i = 0; i < a->size(); ++i) {
                    Fields af((*a)[i], f.path("anchors[" + std::to_string(i) + "]"), problems);
                    auto id = af.required<NodeId>("node_id");
                    Position p{af.required<double>("x_m"), af.required<double>("y_m")};
                    m.anchors.emplace_back(id, p);
                }
        }
        return m;
    }
    if (kind == "rpgm") {
        RPGMModel m;
        m.params.d_max_m = f.value("d_max_m", m.params.d_max_m);
        m.params.leader_period_s = f.value("leader_period_s", m.params.leader_period_s);
        if (const Json* r = f.child("reference", false)) {
            Fields rf(*r, f.path("reference"), problems);
            std::string rk = rf.required<std::string>("kind");
            if (rk == "leader")
                m.reference.kind = ReferenceKind::leader;
            else if (rk == "fixed")
                m.reference.kind = ReferenceKind::fixed;
            else if (rk == "random_walk")
                m.reference.kind = ReferenceKind::random_walk;
            else
                rf.problem("kind", "expected 'leader', 'fixed' or 'random_walk'");
            m.reference.position = {rf.value("x_m", 0.0), rf.value("y_m", 0.0)};
            m.reference.walk.period_s = rf.value("period_s", m.reference.walk.period_s);
            m.reference.walk.fence = parse_fence(rf);
        }
        return m;
    }
    if (kind == "rvgm") {
        RVGMModel m;
        m.params.sigma_v = f.value("sigma_v_mps", m.params.sigma_v);
        m.params.sigma_theta = f.value("sigma_theta_rad", m.params.sigma_theta);
        m.params.period_s = f.value("period_s", m.params.period_s);
        m.params.reference_mean_v = f.optional<double>("reference_mean_v_mps");
        m.params.reference_sigma_v = f.optional<double>("reference_sigma_v_mps");
        return m;
    }
    if (!kind.empty())
        f.problem("kind", "unknown model '" + kind + "'");
    return IndividualModel{StaticParams{}};
}

inline InitialRegion parse_initial(const Json& j, const std::string& path, std::vector<std::string>& problems)
{
    Fields f(j, path, problems);
    InitialRegion r;
    std::string kind = f.value<std::string>("kind", "playground");
    if (kind == "disc")
        r.kind = InitialRegion::Kind::disc;
    else if (kind == "cluster")
        r.kind = InitialRegion::Kind::cluster;
    else if (kind != "playground")
        f.problem("kind", "expected 'playground', 'disc' or 'cluster'");
    r.disc.center = {f.value("center_x_m", 0.0), f.value("center_y_m", 0.0)};
    r.disc.radius = f.value("radius_m", 1.0);
    return r;
}

inline void put_fence(Json& j, const std::optional<Disc>& fence)
{
    if (!fence)
        return;
    j["fence_radius_m"] = fence->radius;
    j["fence_center_x_m"] = fence->center.x;
    j["fence_center_y_m"] = fence->center.y;
}

inline Json model_to_json(const GroupModel& gm)
{
    Json j;
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, IndividualModel>) {
                j["kind"] = model_name(m.params);
                std::visit(
                    [&](const auto& p) {
                        using P = std::decay_t<decltype(p)>;
                        if constexpr (std::is_same_v<P, RandomWalkParams>) {
                            j["trigger"] = p.trigger == WalkTrigger::timer ? "timer" : "distance";
                            j["period_s"] = p.period_s;
                            j["distance_m"] = p.distance_m;
                            put_fence(j, p.fence);
                        } else if constexpr (std::is_same_v<P, KoVaidyaParams>) {
                            j["mean_leg_m"] = p.mean_leg_m;
                        } else if constexpr (std::is_same_v<P, RandomWaypointParams> ||
                                             std::is_same_v<P, RandomDirectionParams>) {
                            j["pause_s"] = p.pause_s;
                        } else if constexpr (std::is_same_v<P, InertiaParams>) {
                            j["period_s"] = p.period_s;
                            j["rho"] = p.rho;
                        } else if constexpr (std::is_same_v<P, GaussMarkovParams>) {
                            j["period_s"] = p.period_s;
                            j["beta_per_s"] = p.beta;
                            j["mu_x_mps"] = p.mu_x;
                            j["mu_y_mps"] = p.mu_y;
                            j["sigma_x_mps"] = p.sigma_x;
                            j["sigma_y_mps"] = p.sigma_y;
                        } else if constexpr (std::is_same_v<P, BoundlessParams>) {
                            j["period_s"] = p.period_s;
                        }
                    },
                    m.params);
            } else if constexpr (std::is_same_v<M, MoMoModel>) {
                j["kind"] = "momo";
                j["d_c_m"] = m.params.d_c_m;
                j["rho_min"] = m.params.rho_min;
                if (m.params.delta_u_s)
                    j["delta_u_s"] = *m.params.delta_u_s;
                j["period_s"] = m.boundless.period_s;
                if (!m.anchors.empty()) {
                    Json a = Json::array();
                    for (const auto& [id, p] : m.anchors)
                        a.push_back(Json{{"node_id", id}, {"x_m", p.x}, {"y_m", p.y}});
                    j["anchors"] = a;
                }
            } else if constexpr (std::is_same_v<M, RPGMModel>) {
                j["kind"] = "rpgm";
                j["d_max_m"] = m.params.d_max_m;
                j["leader_period_s"] = m.params.leader_period_s;
                Json r;
                r["kind"] = m.reference.kind == ReferenceKind::leader  ? "leader"
                            : m.reference.kind == ReferenceKind::fixed ? "fixed"
                                                                       : "random_walk";
                r["x_m"] = m.reference.position.x;
                r["y_m"] = m.reference.position.y;
                r["period_s"] = m.reference.walk.period_s;
                put_fence(r, m.reference.walk.fence);
                j["reference"] = r;
            } else {
                j["kind"] = "rvgm";
                j["sigma_v_mps"] = m.params.sigma_v;
                j["sigma_theta_rad"] = m.params.sigma_theta;
                j["period_s"] = m.params.period_s;
                if (m.params.reference_mean_v)
                    j["reference_mean_v_mps"] = *m.params.reference_mean_v;
                if (m.params.reference_sigma_v)
                    j["reference_sigma_v_mps"] = *m.params.reference_sigma_v;
            }
        },
        gm);
    return j;
}

inline Json initial_to_json(const InitialRegion& r)
{
    Json j;
    j["kind"] = r.kind == InitialRegion::Kind::playground ? "playground"
                : r.kind == InitialRegion::Kind::disc     ? "disc"
                                                          : "cluster";
    if (r.kind != InitialRegion::Kind::playground) {
        if (r.kind == InitialRegion::Kind::disc) {
            j["center_x_m"] = r.disc.center.x;
            j["center_y_m"] = r.disc.center.y;
        }
        j["radius_m"] = r.disc.radius;
    }
    return j;
}

}  // namespace detail

/// Parse and validate an experiment document.
///
/// Groups come either as an explicit "groups" list or as a uniform layout
/// ("group_count", "group_size", "group_model", "group_initial") that numbers
/// nodes consecutively.
[[nodiscard]] inline ExperimentConfig parse_experiment_config(const Json& j)
{
    std::vector<std::string> problems;
    ExperimentConfig cfg;
    {
        detail::Fields f(j, "", problems);
        if (const Json* pg = f.child("playground", true)) {
            detail::Fields pf(*pg, "playground", problems);
            cfg.playground.width = pf.required<double>("width_m");
            cfg.playground.height = pf.required<double>("height_m");
            std::string b = pf.value<std::string>("boundary", "reflect");
            if (b == "torus")
                cfg.playground.boundary = BoundaryPolicy::torus;
            else if (b != "reflect")
                pf.problem("boundary", "expected 'reflect' or 'torus'");
        }
        cfg.duration_s = f.required<double>("duration_s");
        cfg.delta_t_s = f.required<double>("delta_t_s");
        cfg.seed = f.required<std::uint64_t>("seed");
        if (const Json* lim = f.child("limits", true)) {
            detail::Fields lf(*lim, "limits", problems);
            cfg.limits.v_max = lf.required<double>("v_max_mps");
            cfg.limits.v_min = lf.required<double>("v_min_mps");
            cfg.limits.a_max = lf.required<double>("a_max_mps2");
            cfg.limits.gamma_max = lf.required<double>("gamma_max_radps");
        }
        cfg.switch_mean_period_s = f.optional<double>("switch_mean_period_s");
        cfg.floor_speed_at_v_min = f.value("floor_speed_at_v_min", true);

        const Json* groups = f.child("groups", false);
        const bool layout = f.has("group_count") || f.has("group_size") || f.has("group_model");
        if (groups && layout) {
            f.problem("groups", "give either 'groups' or the group_count/group_size layout, not both");
        } else if (groups) {
            if (!groups->is_array()) {
                f.problem("groups", "expected an array");
            } else {
                for (std::size_t i = 0; i < groups->size(); ++i) {
                    std::string path = "groups[" + std::to_string(i) + "]";
                    detail::Fields gf((*groups)[i], path, problems);
                    GroupConfig g;
                    g.spec.group_id = gf.value<std::uint32_t>("group_id", static_cast<std::uint32_t>(i));
                    g.spec.member_ids = gf.required<std::vector<NodeId>>("member_ids");
                    g.spec.leader_id = gf.optional<NodeId>("leader_id");
                    if (const Json* m = gf.child("model", true))
                        g.model = detail::parse_model(*m, path + ".model", problems);
                    if (const Json* in = gf.child("initial", false))
                        g.initial = detail::parse_initial(*in, path + ".initial", problems);
                    cfg.groups.push_back(std::move(g));
                }
            }
        } else if (layout) {
            auto count = f.required<std::size_t>("group_count");
            auto size = f.required<std::size_t>("group_size");
            GroupModel model{IndividualModel{StaticParams{}}};
            InitialRegion initial;
            if (const Json* m = f.child("group_model", true))
                model = detail::parse_model(*m, "group_model", problems);
            if (const Json* in = f.child("group_initial", false))
                initial = detail::parse_initial(*in, "group_initial", problems);
            if (count > 100000 || size > 100000)
                f.problem("group_count", "layout too large");
            else
                for (auto& spec : uniform_groups(count, size))
                    cfg.groups.push_back({std::move(spec), model, initial});
        } else {
            f.problem("groups", "missing required key");
        }
    }
    if (!problems.empty())
        throw ConfigError(std::move(problems));
    cfg.validate();
    return cfg;
}

/// Explicit-groups document; parses back to an equal configuration.
[[nodiscard]] inline Json to_json(const ExperimentConfig& cfg)
{
    Json j;
    j["playground"] = {{"width_m", cfg.playground.width},
                       {"height_m", cfg.playground.height},
                       {"boundary", to_string(cfg.playground.boundary)}};
    j["duration_s"] = cfg.duration_s;
    j["delta_t_s"] = cfg.delta_t_s;
    j["seed"] = cfg.seed;
    j["limits"] = {{"v_max_mps", cfg.limits.v_max},
                   {"v_min_mps", cfg.limits.v_min},
                   {"a_max_mps2", cfg.limits.a_max},
                   {"gamma_max_radps", cfg.limits.gamma_max}};
    if (cfg.switch_mean_period_s)
        j["switch_mean_period_s"] = *cfg.switch_mean_period_s;
    j["floor_speed_at_v_min"] = cfg.floor_speed_at_v_min;
    Json groups = Json::array();
    for (const auto& g : cfg.groups) {
        Json gj;
        gj["group_id"] = g.spec.group_id;
        gj["member_ids"] = g.spec.member_ids;
        if (g.spec.leader_id)
            gj["leader_id"] = *g.spec.leader_id;
        gj["model"] = detail::model_to_json(g.model);
        gj["initial"] = detail::initial_to_json(g.initial);
        groups.push_back(gj);
    }
    j["groups"] = groups;
    return j;
}

[[nodiscard]] inline Json parse_json_text(const std::string& text, const std::string& origin)
{
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({origin + ": " + e.what()});
    }
}

[[nodiscard]] inline ExperimentConfig load_experiment_config(const std::filesystem::path& path)
{
    return parse_experiment_config(parse_json_text(read_file(path), path.string()));
}

/// D-MIMO scenario document: every scenario key is optional and defaults to
/// the reference setup; "v_max_mps_list" lists the candidate speeds.
struct DmimoDocument {
    DmimoScenario scenario;
    std::vector<double> speeds{1.0, 2.0};
};

[[nodiscard]] inline DmimoDocument parse_dmimo_document(const Json& j)
{
    std::vector<std::string> problems;
    DmimoDocument doc;
    DmimoScenario& s = doc.scenario;
    {
        detail::Fields f(j, "", problems);
        s.d_txrx_m = f.value("d_txrx_m", s.d_txrx_m);
        s.k_candidates = f.value("k_candidates", s.k_candidates);
        s.n_receivers = f.value("n_receivers", s.n_receivers);
        s.l_relays = f.value("l_relays", s.l_relays);
        s.s_m = f.value("s_m", s.s_m);
        s.delta_t_s = f.value("delta_t_s", s.delta_t_s);
        s.rx_radius_m = f.value("rx_radius_m", s.rx_radius_m);
        doc.speeds = f.value("v_max_mps_list", doc.speeds);
        s.v_min_mps = f.value("v_min_mps", s.v_min_mps);
        s.a_max_mps2 = f.value("a_max_mps2", s.a_max_mps2);
        s.gamma_max_radps = f.value("gamma_max_radps", s.gamma_max_radps);
        s.model_period_s = f.value("model_period_s", s.model_period_s);
        s.selections = f.value("selections", s.selections);
        s.selection_spacing_s = f.value("selection_spacing_s", s.selection_spacing_s);
        s.warmup_s = f.value("warmup_s", s.warmup_s);
        s.t_el_s = f.value("t_el_s", s.t_el_s);
        s.channel.pathloss_exponent = f.value("pathloss_exponent", s.channel.pathloss_exponent);
        std::string fading = f.value<std::string>("fading", "none");
        if (fading == "rayleigh")
            s.channel.fading = ChannelModel::Fading::rayleigh;
        else if (fading != "none")
            f.problem("fading", "expected 'none' or 'rayleigh'");
        s.channel.snr_ref_db = f.value("snr_ref_db", s.channel.snr_ref_db);
        s.histogram_side_m = f.value("histogram_side_m", s.histogram_side_m);
        s.histogram_resolution_m = f.value("histogram_resolution_m", s.histogram_resolution_m);
        s.seed = f.value("seed", s.seed);
        if (doc.speeds.empty())
            f.problem("v_max_mps_list", "empty list");
    }
    if (!problems.empty())
        throw ConfigError(std::move(problems));
    for (double v : doc.speeds) {
        DmimoScenario probe = s;
        probe.v_max_mps = v;
        probe.validate();
    }
    return doc;
}

[[nodiscard]] inline Json to_json(const DmimoDocument& doc)
{
    const DmimoScenario& s = doc.scenario;
    Json j;
    j["d_txrx_m"] = s.d_txrx_m;
    j["k_candidates"] = s.k_candidates;
    j["n_receivers"] = s.n_receivers;
    j["l_relays"] = s.l_relays;
    j["s_m"] = s.s_m;
    j["delta_t_s"] = s.delta_t_s;
    j["rx_radius_m"] = s.rx_radius_m;
    j["v_max_mps_list"] = doc.speeds;
    j["v_min_mps"] = s.v_min_mps;
    j["a_max_mps2"] = s.a_max_mps2;
    j["gamma_max_radps"] = s.gamma_max_radps;
    j["model_period_s"] = s.model_period_s;
    j["selections"] = s.selections;
    j["selection_spacing_s"] = s.selection_spacing_s;
    j["warmup_s"] = s.warmup_s;
    j["t_el_s"] = s.t_el_s;
    j["pathloss_exponent"] = s.channel.pathloss_exponent;
    j["fading"] = s.channel.fading == ChannelModel::Fading::none ? "none" : "rayleigh";
    j["snr_ref_db"] = s.channel.snr_ref_db;
    j["histogram_side_m"] = s.histogram_side_m;
    j["histogram_resolution_m"] = s.histogram_resolution_m;
    j["seed"] = s.seed;
    return j;
}

/// Grid text such as "delta_t_s=0.1,1,5;distance_m=15,30;replicas=5".
struct GridDocument {
    GridSpec grid;
    std::size_t replicas{1};
};

[[nodiscard]] inline GridDocument parse_grid(std::string_view text)
{
    GridDocument doc;
    std::vector<std::string> problems;
    auto numbers = [&](std::string_view key, std::string_view list) {
        std::vector<double> out;
        while (!list.empty()) {
            auto comma = list.find(',');
            auto item = list.substr(0, comma);
            double v = 0.0;
            auto res = std::from_chars(item.data(), item.data() + item.size(), v);
            if (res.ec != std::errc{} || res.ptr != item.data() + item.size() || !(v > 0.0))
                problems.push_back("grid." + std::string(key) + ": bad value '" + std::string(item) + "'");
            else
                out.push_back(v);
            if (comma == std::string_view::npos)
                break;
            list.remove_prefix(comma + 1);
        }
        return out;
    };
    while (!text.empty()) {
        auto semi = text.find(';');
        auto part = text.substr(0, semi);
        auto eq = part.find('=');
        if (eq == std::string_view::npos) {
            problems.push_back("grid: expected key=values in '" + std::string(part) + "'");
        } else {
            auto key = part.substr(0, eq);
            auto list = part.substr(eq + 1);
            if (key == "delta_t_s")
                doc.grid.delta_t_s = numbers(key, list);
            else if (key == "distance_m")
                doc.grid.distance_m = numbers(key, list);
            else if (key == "replicas") {
                auto v = numbers(key, list);
                if (v.size() == 1 && v[0] == std::floor(v[0]))
                    doc.replicas = static_cast<std::size_t>(v[0]);
                else
                    problems.push_back("grid.replicas: expected one positive integer");
            } else
                problems.push_back("grid." + std::string(key) + ": unknown key");
        }
        if (semi == std::string_view::npos)
            break;
        text.remove_prefix(semi + 1);
    }
    if (doc.grid.delta_t_s.empty())
        problems.emplace_back("grid.delta_t_s: empty");
    if (!problems.empty())
        throw ConfigError(std::move(problems));
    return doc;
}

// ---------------------------------------------------------------------------
// Trace files

inline constexpr std::string_view kTraceHeader = "t_s,node_id,x_m,y_m,v_mps,theta_rad,mode";

[[nodiscard]] inline std::string format_mode(const NodeMode& m)
{
    switch (m.kind) {
    case NodeMode::Kind::free: return "free";
    case NodeMode::Kind::forced: return "forced:" + std::to_string(m.target);
    default: return {};
    }
}

inline void write_trace_row(std::ostream& out, const TraceRecord& r)
{
    out << format_g9(r.t) << ',' << r.node_id << ',' << format_g9(r.x) << ',' << format_g9(r.y) << ',';
    if (r.v)
        out << format_g9(*r.v);
    out << ',';
    if (r.theta)
        out << format_g9(*r.theta);
    out << ',' << format_mode(r.mode) << '\n';
}

inline void write_trace(std::ostream& out, const Trace& trace)
{
    out << kTraceHeader << '\n';
    for (const auto& r : trace.records)
        write_trace_row(out, r);
}

inline void write_trace_file(const std::filesystem::path& path, const Trace& trace)
{
    write_atomic(path, [&](std::ostream& out) { write_trace(out, trace); });
}

namespace detail {
inline std::optional<double> parse_double(std::string_view s)
{
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

inline std::optional<std::uint32_t> parse_id(std::string_view s)
{
    std::uint32_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}
}  // namespace detail

/// Parse a trace; row numbers in errors count the header as row 1.
[[nodiscard]] inline Trace read_trace(std::istream& in)
{
    Trace trace;
    std::string line;
    std::size_t row = 0;
    auto fail = [&](const std::string& what) {
        throw FormatError("trace row " + std::to_string(row) + ": " + what);
    };
    if (!std::getline(in, line))
        throw FormatError("trace is empty");
    ++row;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != kTraceHeader)
        fail("expected header '" + std::string(kTraceHeader) + "'");
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::string_view rest(line);
        std::string_view col[7];
        std::size_t n = 0;
        for (;;) {
            auto comma = rest.find(',');
            if (n == 7)
                fail("too many columns");
            col[n++] = rest.substr(0, comma);
            if (comma == std::string_view::npos)
                break;
            rest.remove_prefix(comma + 1);
        }
        if (n != 7)
            fail("expected 7 columns, found " + std::to_string(n));
        TraceRecord r;
        auto t = detail::parse_double(col[0]);
        auto id = detail::parse_id(col[1]);
        auto x = detail::parse_double(col[2]);
        auto y = detail::parse_double(col[3]);
        if (!t)
            fail("bad t_s '" + std::string(col[0]) + "'");
        if (!id)
            fail("bad node_id '" + std::string(col[1]) + "'");
        if (!x || !y)
            fail("bad position");
        r.t = *t;
        r.node_id = *id;
        r.x = *x;
        r.y = *y;
        if (!col[4].empty()) {
            r.v = detail::parse_double(col[4]);
            if (!r.v)
                fail("bad v_mps '" + std::string(col[4]) + "'");
        }
        if (!col[5].empty()) {
            r.theta = detail::parse_double(col[5]);
            if (!r.theta)
                fail("bad theta_rad '" + std::string(col[5]) + "'");
        }
        if (col[6] == "free")
            r.mode = NodeMode::free();
        else if (col[6].substr(0, 7) == "forced:") {
            auto target = detail::parse_id(col[6].substr(7));
            if (!target)
                fail("bad mode '" + std::string(col[6]) + "'");
            r.mode = NodeMode::forced(*target);
        } else if (!col[6].empty())
            fail("bad mode '" + std::string(col[6]) + "'");
        if (!trace.records.empty()) {
            const auto& prev = trace.records.back();
            if (r.t < prev.t || (r.t == prev.t && r.node_id <= prev.node_id))
                fail("rows not sorted by (t_s, node_id)");
        }
        trace.records.push_back(r);
    }
    if (trace.records.empty())
        throw FormatError("trace has no records");
    return trace;
}

[[nodiscard]] inline Trace read_trace_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open " + path.string());
    return read_trace(in);
}

// ---------------------------------------------------------------------------
// ns-2 movement files

/// Largest deviation allowed when merging straight constant-speed runs.
inline constexpr double kNs2MergeTolerance = 1e-7;

/// Initial `set X_/Y_/Z_` lines per node, then one `setdest` per maximal
/// straight constant-speed run. Pauses need no command: a node stops on
/// reaching its destination.
inline void export_ns2(std::ostream& out, const Trace& trace)
{
    auto nodes = trace.by_node();
    if (nodes.empty())
        throw FormatError("trace has no positions");
    for (const auto& [id, recs] : nodes) {
        const auto& p0 = *recs.front();
        out << "$node_(" << id << ") set X_ " << format_exact(p0.x) << '\n';
        out << "$node_(" << id << ") set Y_ " << format_exact(p0.y) << '\n';
        out << "$node_(" << id << ") set Z_ 0\n";
    }
    for (const auto& [id, recs] : nodes) {
        std::size_t a = 0;
        while (a + 1 < recs.size()) {
            const auto& ra = *recs[a];
            const auto& rn = *recs[a + 1];
            double dt = rn.t - ra.t;
            double vx = (rn.x - ra.x) / dt;
            double vy = (rn.y - ra.y) / dt;
            std::size_t b = a + 1;
            while (b + 1 < recs.size()) {
                const auto& rc = *recs[b + 1];
                double tau = rc.t - ra.t;
                if (std::hypot(ra.x + vx * tau - rc.x, ra.y + vy * tau - rc.y) > kNs2MergeTolerance)
                    break;
                ++b;
            }
            const auto& rb = *recs[b];
            double dist = std::hypot(rb.x - ra.x, rb.y - ra.y);
            if (dist > 0.0) {
                out << "$ns_ at " << format_exact(ra.t) << " \"$node_(" << id << ") setdest " << format_exact(rb.x)
                    << ' ' << format_exact(rb.y) << ' ' << format_exact(dist / (rb.t - ra.t)) << "\"\n";
            }
            a = b;
        }
    }
}

// ---------------------------------------------------------------------------
// Reports

struct TraceReport {
    std::size_t nodes{0};
    std::size_t records{0};
    double duration_s{0.0};
    ViolationReport violations;
    double avg_speed_mps{0.0};
    std::optional<GroupDistances> distances;  ///< time-averaged, when groups are known
    std::vector<std::pair<double, double>> speed_series;
    std::vector<std::pair<double, double>> intra_series;
    std::vector<std::pair<double, double>> overall_series;
};

[[nodiscard]] inline TraceReport analyze_trace(const Trace& trace, const KinematicLimits& limits,
                                               const Playground& geometry, std::span<const GroupSpec> groups,
                                               const MetricOptions& options = {})
{
    if (trace.empty())
        throw FormatError("trace has no records");
    TraceReport rep;
    MetricsAccumulator acc(limits, geometry, options);
    std::set<NodeId> ids;
    for (const auto& r : trace.records) {
        acc.add(r);
        ids.insert(r.node_id);
    }
    rep.nodes = ids.size();
    rep.records = trace.records.size();
    rep.duration_s = trace.records.back().t - trace.records.front().t;
    rep.violations = acc.report();
    rep.avg_speed_mps = acc.average_speed();
    rep.speed_series = acc.speed_series();
    if (!groups.empty()) {
        GroupDistances sum;
        std::size_t n = 0;
        std::size_t i = 0;
        std::vector<const TraceRecord*> slice;
        while (i < trace.records.size()) {
            double t = trace.records[i].t;
            slice.clear();
            for (; i < trace.records.size() && trace.records[i].t == t; ++i)
                slice.push_back(&trace.records[i]);
            auto d = group_distances(std::span<const TraceRecord* const>(slice), groups, geometry);
            rep.intra_series.emplace_back(t, d.intra);
            rep.overall_series.emplace_back(t, d.overall);
            sum.intra += d.intra;
            sum.overall += d.overall;
            ++n;
        }
        rep.distances = GroupDistances{sum.intra / static_cast<double>(n), sum.overall / static_cast<double>(n)};
    }
    return rep;
}

inline void write_report(std::ostream& out, const TraceReport& rep)
{
    out << "nodes=" << rep.nodes << '\n';
    out << "records=" << rep.records << '\n';
    out << "duration_s=" << format_g9(rep.duration_s) << '\n';
    out << "updates_counted=" << rep.violations.updates_counted << '\n';
    out << "speed_violation_pct=" << format_g9(rep.violations.speed_violation_pct) << '\n';
    out << "rotation_violation_pct=" << format_g9(rep.violations.rotation_violation_pct) << '\n';
    out << "avg_speed_mps=" << format_g9(rep.avg_speed_mps) << '\n';
    if (rep.distances) {
        out << "intra_group_distance_m=" << format_g9(rep.distances->intra) << '\n';
        out << "overall_distance_m=" << format_g9(rep.distances->overall) << '\n';
    }
}

inline void write_columns(std::ostream& out, const std::vector<std::pair<double, double>>& rows)
{
    for (const auto& [a, b] : rows)
        out << format_g9(a) << ' ' << format_g9(b) << '\n';
}

inline void write_sweep_table(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "model,delta_t_s,distance_m,speed_violation_pct,rotation_violation_pct,avg_speed_mps\n";
    for (const auto& r : rows)
        out << r.model << ',' << format_g9(r.delta_t_s) << ',' << (r.distance_m ? format_g9(*r.distance_m) : "")
            << ',' << format_g9(r.violations.speed_violation_pct) << ','
            << format_g9(r.violations.rotation_violation_pct) << ',' << format_g9(r.avg_speed_mps) << '\n';
}

/// Dense grid: one header line, then ny rows of nx masses, lowest y first.
inline void write_density_grid(std::ostream& out, const DensityGrid& g)
{
    out << "# window_m " << format_g9(g.window.x0) << ' ' << format_g9(g.window.y0) << ' ' << format_g9(g.window.x1)
        << ' ' << format_g9(g.window.y1) << " resolution_m " << format_g9(g.resolution) << " nx " << g.nx << " ny "
        << g.ny << " samples " << g.samples << '\n';
    for (std::size_t iy = 0; iy < g.ny; ++iy) {
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            if (ix)
                out << ' ';
            out << format_g9(g.at(ix, iy));
        }
        out << '\n';
    }
}

}  // namespace momo
