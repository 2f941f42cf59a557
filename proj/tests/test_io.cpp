#include "momo/io.hpp"
#include "momo/scenarios.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>

using namespace momo;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(MOMO_SOURCE_DIR) / "configs";

Json minimal_doc()
{
    return Json::parse(R"({
      "playground": {"width_m": 100, "height_m": 80},
      "duration_s": 20, "delta_t_s": 0.5, "seed": 9,
      "limits": {"v_max_mps": 5, "v_min_mps": 0.001, "a_max_mps2": 5, "gamma_max_radps": 1.5},
      "group_count": 2, "group_size": 3,
      "group_model": {"kind": "rvgm"}
    })");
}

std::string problems_of(const Json& j)
{
    try {
        (void)parse_experiment_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

// Replays an ns-2 movement script: a node heads for its destination at the
// given speed and stops there.
class Ns2Replay {
public:
    explicit Ns2Replay(std::istream& in)
    {
        std::string line;
        while (std::getline(in, line)) {
            unsigned id = 0;
            char axis = 0;
            double v = 0, x = 0, y = 0, t = 0;
            if (std::sscanf(line.c_str(), "$node_(%u) set %c_ %lf", &id, &axis, &v) == 3) {
                auto& n = nodes_[id];
                if (axis == 'X')
                    n.from.x = n.to.x = v;
                else if (axis == 'Y')
                    n.from.y = n.to.y = v;
            } else if (std::sscanf(line.c_str(), "$ns_ at %lf \"$node_(%u) setdest %lf %lf %lf\"", &t, &id, &x, &y,
                                   &v) == 5) {
                commands_[id].push_back({t, {x, y}, v});
            } else {
                ADD_FAILURE() << "unrecognised line: " << line;
            }
        }
    }

    Position at(NodeId id, double t) const
    {
        Node n = nodes_.at(id);
        auto it = commands_.find(id);
        if (it == commands_.end())
            return n.from;
        for (const auto& c : it->second) {
            if (c.t > t)
                break;
            n.from = where(n, c.t);
            n.start = c.t;
            n.to = c.dest;
            n.speed = c.speed;
        }
        return where(n, t);
    }

    [[nodiscard]] std::size_t setdest_count(NodeId id) const
    {
        auto it = commands_.find(id);
        return it == commands_.end() ? 0 : it->second.size();
    }

private:
    struct Node {
        Position from, to;
        double start{0}, speed{0};
    };
    struct Command {
        double t;
        Position dest;
        double speed;
    };
    static Position where(const Node& n, double t)
    {
        double dx = n.to.x - n.from.x, dy = n.to.y - n.from.y;
        double dist = std::hypot(dx, dy);
        if (dist == 0 || n.speed == 0)
            return n.from;
        double f = std::min(1.0, n.speed * (t - n.start) / dist);
        return {n.from.x + f * dx, n.from.y + f * dy};
    }
    std::map<NodeId, Node> nodes_;
    std::map<NodeId, std::vector<Command>> commands_;
};

}  // namespace

TEST(Config, ShippedFilesLoad)
{
    for (const char* name : {"momo_table1.json", "rpgm_table1.json", "rvgm_table1.json", "momo_switching.json",
                             "rpgm_switching.json", "rvgm_switching.json"}) {
        ExperimentConfig cfg;
        ASSERT_NO_THROW(cfg = load_experiment_config(kConfigs / name)) << name;
        EXPECT_EQ(cfg.node_count(), 16u);
        EXPECT_EQ(cfg.step_count(), 10000u);
    }
    auto doc = parse_dmimo_document(parse_json_text(read_file(kConfigs / "dmimo.json"), "dmimo.json"));
    EXPECT_EQ(doc.speeds, (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(doc.scenario.selections, 400u);
}

TEST(Config, ShippedTableFilesMatchPresets)
{
    const std::pair<const char*, ScenarioModel> cases[] = {{"momo_table1.json", ScenarioModel::momo},
                                                           {"rpgm_table1.json", ScenarioModel::rpgm},
                                                           {"rvgm_table1.json", ScenarioModel::rvgm}};
    for (const auto& [name, model] : cases)
        EXPECT_EQ(to_json(load_experiment_config(kConfigs / name)), to_json(comparison_config(model))) << name;
}

TEST(Config, RoundTripThroughJson)
{
    for (auto m : {ScenarioModel::momo, ScenarioModel::rpgm, ScenarioModel::rvgm}) {
        auto cfg = comparison_config(m, 77);
        cfg.switch_mean_period_s = 123.5;
        cfg.groups[2].initial.kind = InitialRegion::Kind::cluster;
        cfg.groups[2].initial.disc.radius = 40;
        Json first = to_json(cfg);
        auto back = parse_experiment_config(Json::parse(first.dump()));
        EXPECT_EQ(to_json(back), first);
    }
}

TEST(Config, RoundTripIndividualModels)
{
    auto j = minimal_doc();
    for (const char* model :
         {R"({"kind":"random_walk","trigger":"distance","distance_m":12,"fence_radius_m":5,"fence_center_x_m":50,"fence_center_y_m":40})",
          R"({"kind":"ko_vaidya","mean_leg_m":20})", R"({"kind":"random_waypoint","pause_s":3})",
          R"({"kind":"random_direction","pause_s":1})", R"({"kind":"inertia","period_s":2,"rho":0.25})",
          R"({"kind":"gauss_markov","beta_per_s":0.3,"mu_x_mps":1,"sigma_y_mps":2})",
          R"({"kind":"boundless","period_s":4})", R"({"kind":"static"})",
          R"({"kind":"rpgm","d_max_m":10,"reference":{"kind":"random_walk","x_m":50,"y_m":40,"fence_radius_m":8}})",
          R"({"kind":"momo","d_c_m":12,"rho_min":1,"delta_u_s":2})"}) {
        j["group_model"] = Json::parse(model);
        auto cfg = parse_experiment_config(j);
        EXPECT_EQ(to_json(parse_experiment_config(to_json(cfg))), to_json(cfg)) << model;
        EXPECT_NO_THROW((void)run(cfg)) << model;
    }
}

TEST(Config, ExplicitGroupsWithAnchor)
{
    auto j = minimal_doc();
    j.erase("group_count");
    j.erase("group_size");
    j.erase("group_model");
    j["groups"] = Json::parse(R"([
      {"member_ids": [0, 1], "model": {"kind": "momo", "d_c_m": 12, "anchors": [{"node_id": 1, "x_m": 3, "y_m": 4}]},
       "initial": {"kind": "disc", "center_x_m": 3, "center_y_m": 4, "radius_m": 6}},
      {"member_ids": [2, 3, 4], "leader_id": 4, "model": {"kind": "rpgm"}}
    ])");
    auto cfg = parse_experiment_config(j);
    EXPECT_EQ(to_json(parse_experiment_config(to_json(cfg))), to_json(cfg));
    auto tr = run(cfg);
    for (const auto& r : tr.records) {
        if (r.node_id == 1) {
            ASSERT_EQ(r.position(), (Position{3, 4}));
        }
    }
    j["groups"][0]["model"]["anchors"][0]["node_id"] = 3;
    EXPECT_NE(problems_of(j).find("anchor 3 is not a member"), std::string::npos);
}

TEST(Config, UnknownKeysReported)
{
    auto j = minimal_doc();
    j["durration_s"] = 5;
    j["group_model"]["sigma"] = 1;
    auto msg = problems_of(j);
    EXPECT_NE(msg.find("durration_s: unknown key"), std::string::npos) << msg;
    EXPECT_NE(msg.find("group_model.sigma: unknown key"), std::string::npos) << msg;
}

TEST(Config, MissingKeysReported)
{
    auto j = minimal_doc();
    j.erase("seed");
    j["limits"].erase("a_max_mps2");
    auto msg = problems_of(j);
    EXPECT_NE(msg.find("seed: missing required key"), std::string::npos) << msg;
    EXPECT_NE(msg.find("limits.a_max_mps2: missing required key"), std::string::npos) << msg;
}

TEST(Config, WrongTypesAndValuesReported)
{
    auto j = minimal_doc();
    j["delta_t_s"] = "fast";
    j["group_model"]["kind"] = "teleport";
    auto msg = problems_of(j);
    EXPECT_NE(msg.find("delta_t_s"), std::string::npos) << msg;
    EXPECT_NE(msg.find("teleport"), std::string::npos) << msg;
    j = minimal_doc();
    j["limits"]["v_min_mps"] = 10;
    EXPECT_FALSE(problems_of(j).empty());
}

TEST(Config, MalformedJsonIsAConfigError)
{
    EXPECT_THROW((void)parse_json_text("{ \"a\": ", "inline"), ConfigError);
}

TEST(Config, DmimoDocumentRoundTrip)
{
    DmimoDocument doc;
    doc.speeds = {0.5, 3.0};
    doc.scenario.channel.fading = ChannelModel::Fading::rayleigh;
    doc.scenario.selections = 17;
    auto back = parse_dmimo_document(Json::parse(to_json(doc).dump()));
    EXPECT_EQ(to_json(back), to_json(doc));
    Json bad = to_json(doc);
    bad["l_relays"] = 40;
    EXPECT_THROW((void)parse_dmimo_document(bad), ConfigError);
}

TEST(Grid, Parses)
{
    auto g = parse_grid("delta_t_s=0.1,1,5;distance_m=15,30;replicas=5");
    EXPECT_EQ(g.grid.delta_t_s, (std::vector<double>{0.1, 1.0, 5.0}));
    EXPECT_EQ(g.grid.distance_m, (std::vector<double>{15.0, 30.0}));
    EXPECT_EQ(g.replicas, 5u);
    EXPECT_THROW((void)parse_grid("delta_t_s=0.1,x"), ConfigError);
    EXPECT_THROW((void)parse_grid("speed=1"), ConfigError);
    EXPECT_THROW((void)parse_grid("delta_t_s=1;replicas=2.5"), ConfigError);
}

TEST(Trace, RoundTripWithinPrintPrecision)
{
    auto cfg = comparison_config(ScenarioModel::momo);
    cfg.playground = {900, 900, BoundaryPolicy::torus};
    cfg.duration_s = 300;
    auto tr = run(cfg);
    std::stringstream ss;
    write_trace(ss, tr);
    auto back = read_trace(ss);
    ASSERT_EQ(back.records.size(), tr.records.size());
    for (std::size_t i = 0; i < tr.records.size(); ++i) {
        const auto& a = tr.records[i];
        const auto& b = back.records[i];
        ASSERT_EQ(a.t, b.t);
        ASSERT_EQ(a.node_id, b.node_id);
        ASSERT_NEAR(a.x, b.x, 1e-6);
        ASSERT_NEAR(a.y, b.y, 1e-6);
        ASSERT_TRUE(a.mode == b.mode);
        ASSERT_EQ(a.v.has_value(), b.v.has_value());
    }
}

TEST(Trace, VectorlessColumnsStayEmpty)
{
    auto cfg = comparison_config(ScenarioModel::rpgm);
    cfg.duration_s = 2;
    std::stringstream ss;
    write_trace(ss, run(cfg));
    std::string header, first, second;
    std::getline(ss, header);
    std::getline(ss, first);
    std::getline(ss, second);
    EXPECT_EQ(header, kTraceHeader);
    EXPECT_EQ(std::count(second.begin(), second.end(), ','), 6);
    EXPECT_NE(second.find(",,,"), std::string::npos) << second;
    ss.clear();
    ss.seekg(0);
    auto back = read_trace(ss);
    EXPECT_FALSE(back.records[1].v);
}

TEST(Trace, MalformedRowsNamed)
{
    auto parse = [](const std::string& text) -> std::string {
        std::istringstream in(text);
        try {
            (void)read_trace(in);
        } catch (const FormatError& e) {
            return e.what();
        }
        return {};
    };
    std::string h = std::string(kTraceHeader) + "\n";
    EXPECT_NE(parse(h + "0,0,1,2,,,free\n0,1,abc,2,,,\n").find("trace row 3"), std::string::npos);
    EXPECT_NE(parse(h + "0,0,1,2,,\n").find("expected 7 columns"), std::string::npos);
    EXPECT_NE(parse(h + "1,0,1,2,,,\n0,0,1,2,,,\n").find("not sorted"), std::string::npos);
    EXPECT_NE(parse(h + "0,0,1,2,,,forced:x\n").find("bad mode"), std::string::npos);
    EXPECT_NE(parse("t,id\n").find("trace row 1"), std::string::npos);
    EXPECT_NE(parse(h).find("no records"), std::string::npos);
}

TEST(Trace, AcceptsCrLf)
{
    std::istringstream in(std::string(kTraceHeader) + "\r\n0,0,1,2,3,0.5,free\r\n");
    auto tr = read_trace(in);
    ASSERT_EQ(tr.records.size(), 1u);
    EXPECT_EQ(*tr.records[0].theta, 0.5);
}

TEST(Ns2, ReplayReproducesTrace)
{
    for (auto m : {ScenarioModel::momo, ScenarioModel::rvgm, ScenarioModel::rpgm}) {
        auto cfg = comparison_config(m);
        cfg.playground = {5000, 5000, BoundaryPolicy::reflect};
        cfg.duration_s = 200;
        cfg.delta_t_s = 0.5;
        auto tr = run(cfg);
        std::stringstream ss;
        export_ns2(ss, tr);
        Ns2Replay replay(ss);
        for (const auto& r : tr.records) {
            auto p = replay.at(r.node_id, r.t);
            ASSERT_NEAR(p.x, r.x, 1e-6) << model_label(cfg.groups[0].model) << " t=" << r.t;
            ASSERT_NEAR(p.y, r.y, 1e-6);
        }
    }
}

TEST(Ns2, StaticNodeHasNoSetdest)
{
    Trace tr;
    for (int k = 0; k < 10; ++k) {
        TraceRecord r;
        r.t = k;
        r.x = 12.5;
        r.y = 7.25;
        tr.records.push_back(r);
    }
    std::stringstream ss;
    export_ns2(ss, tr);
    EXPECT_EQ(ss.str(), "$node_(0) set X_ 12.5\n$node_(0) set Y_ 7.25\n$node_(0) set Z_ 0\n");
}

TEST(Ns2, StraightRunIsOneCommand)
{
    Trace tr;
    for (int k = 0; k <= 10; ++k) {
        TraceRecord r;
        r.t = k * 0.5;
        r.x = 1.0 + 0.3 * 3 * k * 0.5;
        r.y = 2.0 + 0.4 * 3 * k * 0.5;
        tr.records.push_back(r);
    }
    std::stringstream ss;
    export_ns2(ss, tr);
    Ns2Replay replay(ss);
    EXPECT_EQ(replay.setdest_count(0), 1u);
    EXPECT_NE(ss.str().find("setdest 5.5 8 1.5\""), std::string::npos) << ss.str();
}

TEST(Format, ExactRoundTrip)
{
    for (double v : {0.1, 1.0 / 3.0, 4999.999999999, -2.5e-7, 12.0}) {
        auto s = format_exact(v);
        EXPECT_EQ(std::stod(s), v) << s;
    }
    EXPECT_EQ(format_g9(1.0 / 3.0), "0.333333333");
}

TEST(Files, AtomicWriteReplacesOrLeavesIntact)
{
    auto dir = std::filesystem::temp_directory_path() / ("momo_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto file = dir / "out.txt";
    write_atomic(file, [](std::ostream& o) { o << "first"; });
    EXPECT_EQ(read_file(file), "first");
    EXPECT_THROW(write_atomic(file,
                              [](std::ostream& o) {
                                  o << "partial";
                                  throw std::runtime_error("stop");
                              }),
                 std::runtime_error);
    EXPECT_EQ(read_file(file), "first");
    EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}), 1);
    std::filesystem::remove_all(dir);
}
