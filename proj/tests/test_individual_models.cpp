#include "momo/individual_models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

using namespace momo;

namespace {

const KinematicLimits kLimits{5.0, 0.001, 5.0, kPi / 2.0};

// Start a mover at t = 0 and record the state at every grid point after the
// plan call, the vector that then applies over the next interval.
std::vector<NodeKinematicState> drive(const ModelParams& params, const Playground& pg, const KinematicLimits& limits,
                                      std::uint64_t seed, double dt, int steps, Position start = {50, 50},
                                      double floor = 0.0)
{
    RngStream rng(seed, 0);
    MotionContext ctx{pg, limits, rng, floor};
    Mover m = make_mover(params);
    NodeKinematicState s{start, {}, 0.0};
    mover_start(m, s, 0.0, ctx);
    std::vector<NodeKinematicState> out;
    for (int k = 0; k <= steps; ++k) {
        double t = k * dt;
        mover_plan(m, s, t, ctx);
        out.push_back(s);
        if (k < steps)
            mover_advance(m, s, t, (k + 1) * dt, ctx);
    }
    return out;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b)
{
    const double n = static_cast<double>(a.size());
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(RandomWalk, DegenerateSpeedInterval)
{
    KinematicLimits lim{5.0, 5.0, 5.0, 1.0};
    RngStream rng(1, 0);
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(random_walk_update(lim, rng).v, 5.0);
}

TEST(RandomWalk, MeanSpeedAndRange)
{
    RngStream rng(2, 0);
    const int n = 100000;
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        auto s = random_walk_update(kLimits, rng);
        ASSERT_GE(s.v, kLimits.v_min);
        ASSERT_LT(s.v, kLimits.v_max);
        ASSERT_GE(s.theta, -kPi);
        ASSERT_LT(s.theta, kPi);
        sum += s.v;
    }
    double expected = (kLimits.v_min + kLimits.v_max) / 2.0;
    EXPECT_NEAR(sum / n, expected, 0.01 * expected);
}

TEST(RandomWalk, SuccessiveDrawsUncorrelated)
{
    RngStream rng(3, 0);
    std::vector<double> v, th;
    for (int i = 0; i < 20001; ++i) {
        auto s = random_walk_update(kLimits, rng);
        v.push_back(s.v);
        th.push_back(s.theta);
    }
    std::vector<double> v0(v.begin(), v.end() - 1), v1(v.begin() + 1, v.end());
    std::vector<double> t0(th.begin(), th.end() - 1), t1(th.begin() + 1, th.end());
    EXPECT_LT(std::abs(correlation(v0, v1)), 0.02);
    EXPECT_LT(std::abs(correlation(t0, t1)), 0.02);
    EXPECT_LT(std::abs(correlation(v, th)), 0.02);
}

TEST(RandomWalk, TimerMoverChangesOnlyAtPeriod)
{
    Playground pg{1000, 1000, BoundaryPolicy::torus};
    auto tr = drive(RandomWalkParams{}, pg, kLimits, 4, 1.0, 50);
    for (std::size_t k = 1; k < tr.size(); ++k) {
        if (k % 5 != 0) {
            EXPECT_EQ(tr[k].speed, tr[k - 1].speed) << "k=" << k;
        }
    }
    EXPECT_NE(tr[5].speed, tr[4].speed);
}

TEST(RandomWalk, DistanceMoverTravelsFixedLegs)
{
    Playground pg{10000, 10000, BoundaryPolicy::torus};
    RandomWalkParams p;
    p.trigger = WalkTrigger::distance;
    p.distance_m = 20.0;
    RngStream rng(5, 0);
    MotionContext ctx{pg, kLimits, rng};
    RandomWalkMover m(p);
    NodeKinematicState s{{5000, 5000}, {}, 0.0};
    m.start(s, 0.0, ctx);
    // Advance exactly one leg in many small pieces: the vector changes once, at its end.
    double leg_time = p.distance_m / s.speed.v;
    auto first = s.speed;
    m.advance(s, 0.0, leg_time * 0.5, ctx);
    EXPECT_EQ(s.speed, first);
    m.advance(s, leg_time * 0.5, leg_time * 1.001, ctx);
    EXPECT_NE(s.speed, first);
    EXPECT_NEAR(s.t_lu, leg_time, 1e-9);
}

TEST(RandomWalk, FenceKeepsWalkerInDisc)
{
    Playground pg{1000, 1000, BoundaryPolicy::reflect};
    RandomWalkParams p;
    p.fence = Disc{{500, 500}, 10.0};
    auto tr = drive(p, pg, kLimits, 6, 0.5, 2000, {500, 500});
    for (const auto& s : tr)
        EXPECT_LE(std::hypot(s.position.x - 500, s.position.y - 500), 10.0 + 1e-9);
}

TEST(KoVaidya, DirectionFixedSpeedRedrawn)
{
    NodeKinematicState s{{0, 0}, {2.0, 1.1}, 0.0};
    RngStream rng(7, 0);
    KoVaidyaParams p;
    double legs = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        auto leg = ko_vaidya_update(s, kLimits, p, rng);
        ASSERT_EQ(leg.speed.theta, s.speed.theta);
        ASSERT_GE(leg.speed.v, kLimits.v_min);
        ASSERT_LT(leg.speed.v, kLimits.v_max);
        ASSERT_GT(leg.next_leg_m, 0.0);
        legs += leg.next_leg_m;
    }
    EXPECT_NEAR(legs / n, p.mean_leg_m, 0.02 * p.mean_leg_m);
}

TEST(KoVaidya, MoverKeepsHeadingAwayFromWalls)
{
    Playground pg{1e6, 1e6, BoundaryPolicy::reflect};
    auto tr = drive(KoVaidyaParams{}, pg, kLimits, 8, 1.0, 1000, {5e5, 5e5});
    for (const auto& s : tr)
        EXPECT_EQ(s.speed.theta, tr.front().speed.theta);
    bool speed_changed = false;
    for (const auto& s : tr)
        speed_changed |= s.speed.v != tr.front().speed.v;
    EXPECT_TRUE(speed_changed);
}

TEST(KoVaidya, ReflectionMirrorsHeadingAndKeepsSpeed)
{
    Playground pg{100, 100, BoundaryPolicy::reflect};
    RngStream rng(9, 0);
    MotionContext ctx{pg, kLimits, rng};
    KoVaidyaParams p;
    p.mean_leg_m = 1e9;  // no speed redraw during the test
    KoVaidyaMover m(p);
    NodeKinematicState s{{95, 50}, {}, 0.0};
    m.start(s, 0.0, ctx);
    s.speed = {4.0, 0.0};
    m.advance(s, 0.0, 2.0, ctx);
    EXPECT_NEAR(s.position.x, 97.0, 1e-9);
    EXPECT_NEAR(std::abs(s.speed.theta), kPi, 1e-12);
    EXPECT_EQ(s.speed.v, 4.0);
}

TEST(RandomWaypoint, DestinationInsidePlayground)
{
    Playground pg{300, 200, BoundaryPolicy::reflect};
    RngStream rng(10, 0);
    for (int i = 0; i < 10000; ++i) {
        auto wp = random_waypoint_update(pg, kLimits, RandomWaypointParams{2.0}, rng);
        ASSERT_TRUE(pg.contains(wp.destination));
        ASSERT_EQ(wp.pause_s, 2.0);
    }
}

TEST(RandomWaypoint, ZeroPauseDepartsImmediately)
{
    Playground pg{100, 100, BoundaryPolicy::reflect};
    RngStream rng(11, 0);
    MotionContext ctx{pg, kLimits, rng};
    RandomWaypointMover m(RandomWaypointParams{0.0});
    NodeKinematicState s{{50, 50}, {}, 0.0};
    m.start(s, 0.0, ctx);
    Position first = m.destination();
    double arrive = std::hypot(first.x - 50, first.y - 50) / s.speed.v;
    m.advance(s, 0.0, arrive + 1e-3, ctx);
    EXPECT_NE(m.destination(), first);
    EXPECT_GT(s.speed.v, 0.0);
    EXPECT_NEAR(s.t_lu, arrive, 1e-9);
}

TEST(RandomWaypoint, PauseHoldsPosition)
{
    Playground pg{100, 100, BoundaryPolicy::reflect};
    RngStream rng(12, 0);
    MotionContext ctx{pg, kLimits, rng};
    RandomWaypointMover m(RandomWaypointParams{10.0});
    NodeKinematicState s{{50, 50}, {}, 0.0};
    m.start(s, 0.0, ctx);
    Position dest = m.destination();
    double arrive = std::hypot(dest.x - 50, dest.y - 50) / s.speed.v;
    m.advance(s, 0.0, arrive + 1.0, ctx);
    EXPECT_EQ(s.position, dest);
    EXPECT_EQ(s.speed.v, 0.0);
    m.advance(s, arrive + 1.0, arrive + 9.0, ctx);
    EXPECT_EQ(s.position, dest);
    m.advance(s, arrive + 9.0, arrive + 11.0, ctx);
    EXPECT_GT(s.speed.v, 0.0);
}

TEST(RandomWaypoint, PathStaysOnSegments)
{
    Playground pg{100, 100, BoundaryPolicy::reflect};
    auto tr = drive(RandomWaypointParams{}, pg, kLimits, 13, 0.5, 5000);
    for (const auto& s : tr)
        EXPECT_TRUE(pg.contains(s.position));
}

TEST(RandomDirection, NoUpdateAwayFromEdges)
{
    Playground pg{100, 100, BoundaryPolicy::reflect};
    RngStream rng(14, 0);
    NodeKinematicState s{{50, 50}, {3.0, 0.4}, 0.0};
    EXPECT_EQ(random_direction_update(s, pg, rng), s.speed);
}

TEST(RandomDirection, NewDirectionPointsInward)
{
    Playground pg{100, 100, BoundaryPolicy::reflect};
    RngStream rng(15, 0);
    struct Case {
        Position p;
        double nx, ny;
    };
    for (Case c : {Case{{0, 50}, 1, 0}, Case{{100, 50}, -1, 0}, Case{{50, 0}, 0, 1}, Case{{50, 100}, 0, -1}}) {
        for (int i = 0; i < 1000; ++i) {
            NodeKinematicState s{c.p, {3.0, 0.0}, 0.0};
            auto out = random_direction_update(s, pg, rng);
            EXPECT_GT(out.vx() * c.nx + out.vy() * c.ny, 0.0);
            EXPECT_EQ(out.v, 3.0);
        }
    }
}

TEST(RandomDirection, CornerPointsIntoQuadrant)
{
    Playground pg{100, 100, BoundaryPolicy::reflect};
    RngStream rng(16, 0);
    for (int i = 0; i < 1000; ++i) {
        NodeKinematicState s{{100, 0}, {3.0, 0.0}, 0.0};
        auto out = random_direction_update(s, pg, rng);
        EXPECT_LT(out.vx(), 0.0);
        EXPECT_GT(out.vy(), 0.0);
    }
}

TEST(RandomDirection, MoverKeepsCruiseSpeed)
{
    Playground pg{100, 100, BoundaryPolicy::reflect};
    auto tr = drive(RandomDirectionParams{}, pg, kLimits, 17, 1.0, 2000);
    for (const auto& s : tr) {
        EXPECT_EQ(s.speed.v, tr.front().speed.v);
        EXPECT_TRUE(pg.contains(s.position));
    }
}

TEST(Inertia, ZeroRhoNeverChanges)
{
    RngStream rng(18, 0);
    NodeKinematicState s{{0, 0}, {2.0, 0.3}, 0.0};
    InertiaParams p;
    p.rho = 0.0;
    for (int i = 0; i < 10000; ++i)
        ASSERT_EQ(inertia_update(s, kLimits, p, rng), s.speed);
}

TEST(Inertia, UnitRhoAlwaysRedraws)
{
    RngStream rng(19, 0);
    NodeKinematicState s{{0, 0}, {2.0, 0.3}, 0.0};
    InertiaParams p;
    p.rho = 1.0;
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        auto out = inertia_update(s, kLimits, p, rng);
        ASSERT_NE(out, s.speed);
        sum += out.v;
    }
    EXPECT_NEAR(sum / n, 2.5005, 0.01 * 2.5005);
}

TEST(Inertia, ChangeFractionMatchesRho)
{
    RngStream rng(20, 0);
    NodeKinematicState s{{0, 0}, {2.0, 0.3}, 0.0};
    InertiaParams p;
    p.rho = 0.3;
    const int n = 200000;
    int changed = 0;
    for (int i = 0; i < n; ++i)
        changed += inertia_update(s, kLimits, p, rng) != s.speed;
    EXPECT_NEAR(static_cast<double>(changed) / n, 0.3, 0.01 * 0.3);
}

TEST(GaussMarkov, LagOneAutocorrelation)
{
    GaussMarkovParams p;
    p.beta = 0.1;
    p.period_s = 5.0;
    RngStream rng(21, 0);
    auto s = gauss_markov_initial(p, rng);
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) {
        s = gauss_markov_step(s, p, rng);
        xs.push_back(s.vx);
    }
    std::vector<double> a(xs.begin(), xs.end() - 1), b(xs.begin() + 1, xs.end());
    double expected = std::exp(-p.beta * p.period_s);
    EXPECT_NEAR(correlation(a, b), expected, 0.05 * expected);
}

TEST(GaussMarkov, ZeroBetaFreezesComponents)
{
    GaussMarkovParams p;
    p.beta = 0.0;
    RngStream rng(22, 0);
    GaussMarkovState s{1.5, -0.5};
    for (int i = 0; i < 100; ++i)
        s = gauss_markov_step(s, p, rng);
    EXPECT_EQ(s.vx, 1.5);
    EXPECT_EQ(s.vy, -0.5);
}

TEST(GaussMarkov, LargeBetaForgets)
{
    GaussMarkovParams p;
    p.beta = 100.0;
    p.mu_x = 2.0;
    RngStream rng(23, 0);
    GaussMarkovState s{};
    std::vector<double> xs;
    for (int i = 0; i < 20000; ++i) {
        s = gauss_markov_step(s, p, rng);
        xs.push_back(s.vx);
    }
    std::vector<double> a(xs.begin(), xs.end() - 1), b(xs.begin() + 1, xs.end());
    EXPECT_LT(std::abs(correlation(a, b)), 0.03);
    EXPECT_NEAR(std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size(), 2.0, 0.03);
}

TEST(GaussMarkov, EmittedSpeedClamped)
{
    GaussMarkovParams p;
    p.sigma_x = p.sigma_y = 10.0;
    RngStream rng(24, 0);
    auto comps = gauss_markov_initial(p, rng);
    for (int i = 0; i < 10000; ++i) {
        auto v = gauss_markov_update(comps, kLimits, p, rng);
        ASSERT_GE(v.v, kLimits.v_min);
        ASSERT_LE(v.v, kLimits.v_max);
        ASSERT_NEAR(v.theta, normalize_angle(std::atan2(comps.vy, comps.vx)), 1e-12);
    }
}

TEST(Boundless, ClampsAtTopSpeed)
{
    SpeedVector s{5.0, 0.0};
    EXPECT_EQ(boundless_apply(s, {1.0, 0.0}, kLimits).v, 5.0);
    EXPECT_EQ(boundless_apply({0.5, 0.0}, {-1.0, 0.0}, kLimits).v, 0.0);
    EXPECT_EQ(boundless_apply({0.5, 0.0}, {-1.0, 0.0}, kLimits, kLimits.v_min).v, kLimits.v_min);
}

TEST(Boundless, UpdateStaysWithinBounds)
{
    BoundlessParams p;
    p.period_s = 1.0;
    RngStream rng(25, 0);
    SpeedVector s{2.5, 0.0};
    for (int i = 0; i < 10000; ++i) {
        auto next = boundless_update(s, kLimits, p, rng);
        ASSERT_LE(std::abs(angular_difference(s.theta, next.theta)) / p.period_s, kLimits.gamma_max + 1e-12);
        ASSERT_LE(std::abs(next.v - s.v) / p.period_s, kLimits.a_max + 1e-12);
        ASSERT_GE(next.v, 0.0);
        ASSERT_LE(next.v, kLimits.v_max);
        s = next;
    }
}

TEST(Boundless, MoverStepChangesBounded)
{
    Playground pg{1e6, 1e6, BoundaryPolicy::torus};
    for (double dt : {0.1, 1.0, 2.5}) {
        auto tr = drive(BoundlessParams{}, pg, kLimits, 26, dt, 4000, {5e5, 5e5}, kLimits.v_min);
        for (std::size_t k = 1; k < tr.size(); ++k) {
            ASSERT_LE(std::abs(tr[k].speed.v - tr[k - 1].speed.v), kLimits.a_max * dt * (1 + 1e-9));
            ASSERT_LE(std::abs(angular_difference(tr[k - 1].speed.theta, tr[k].speed.theta)),
                      kLimits.gamma_max * dt * (1 + 1e-9));
            ASSERT_GE(tr[k].speed.v, kLimits.v_min);
        }
    }
}

TEST(Boundless, MoverHitsLiteralUpdateAtPeriodBoundaries)
{
    Playground pg{1e6, 1e6, BoundaryPolicy::torus};
    BoundlessParams p;
    auto tr = drive(p, pg, kLimits, 27, 1.0, 1000, {5e5, 5e5});
    for (std::size_t k = 5; k < tr.size(); k += 5) {
        const auto& a = tr[k - 5].speed;
        const auto& b = tr[k].speed;
        ASSERT_LE(std::abs(b.v - a.v), kLimits.a_max * p.period_s + 1e-9);
        ASSERT_LE(std::abs(angular_difference(a.theta, b.theta)), kLimits.gamma_max * p.period_s + 1e-9);
    }
}

TEST(Movers, DeterministicForSeed)
{
    Playground pg{200, 200, BoundaryPolicy::reflect};
    std::vector<ModelParams> models{RandomWalkParams{}, KoVaidyaParams{},  RandomWaypointParams{},
                                    RandomDirectionParams{}, InertiaParams{}, GaussMarkovParams{},
                                    BoundlessParams{}};
    for (const auto& m : models) {
        auto a = drive(m, pg, kLimits, 28, 0.7, 500);
        auto b = drive(m, pg, kLimits, 28, 0.7, 500);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            ASSERT_EQ(a[i].position, b[i].position) << model_name(m);
            ASSERT_EQ(a[i].speed, b[i].speed) << model_name(m);
        }
    }
}

TEST(Movers, StaticNeverMoves)
{
    Playground pg{200, 200, BoundaryPolicy::reflect};
    auto tr = drive(StaticParams{}, pg, kLimits, 29, 1.0, 100, {10, 20});
    for (const auto& s : tr) {
        EXPECT_EQ(s.position, (Position{10, 20}));
        EXPECT_EQ(s.speed.v, 0.0);
    }
}

TEST(Validate, RejectsBadParameters)
{
    EXPECT_NO_THROW(validate(ModelParams{RandomWalkParams{}}));
    RandomWalkParams rw;
    rw.period_s = 0;
    EXPECT_THROW(validate(ModelParams{rw}), PreconditionError);
    InertiaParams in;
    in.rho = 1.5;
    EXPECT_THROW(validate(ModelParams{in}), PreconditionError);
    GaussMarkovParams gm;
    gm.beta = -1;
    EXPECT_THROW(validate(ModelParams{gm}), PreconditionError);
    EXPECT_THROW(validate(ModelParams{KoVaidyaParams{0.0}}), PreconditionError);
    EXPECT_THROW(validate(ModelParams{RandomWaypointParams{-1.0}}), PreconditionError);
}
