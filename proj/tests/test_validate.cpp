#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cob/abstraction.hpp"
#include "cob/closure.hpp"
#include "cob/invariants.hpp"
#include "cob/parse.hpp"
#include "cob/validate.hpp"

using namespace cob::validate;
using cob::abstraction::build;
using cob::closure::ClosureConfig;
using cob::closure::greatest_closed_collection;
using cob::exactalg::rat;
using cob::model::parse_system;

namespace {

const char* kDemoSrc = R"(
continuous demo {
  vars: x, y;
  field {
    x' = x*y + 2*x;
    y' = -1/2*y^2 + 7*y + 1;
  }
  init { x in [0, 1]; y in [0, 1]; }
}
)";

const char* kGeoSrc = R"(
discrete geo {
  vars: s, p, k;
  params: a, r, n;
  locations: head exit;
  initloc: head;
  transition body {
    from head; to head;
    guard: k < n;
    update { s' = s + p; p' = p*r; k' = k + 1; }
  }
  transition done {
    from head; to exit;
    guard: k >= n;
    update { }
  }
  init { s = 0; p - a = 0; k = 0; }
}
)";

const char* kFermatSrc = R"(
discrete fermat {
  vars: r, u, v;
  params: N, R;
  locations: outer pos neg;
  initloc: outer;
  transition enter {
    from outer; to pos;
    update { }
  }
  transition shrink {
    from pos; to pos;
    guard: r > 0;
    update { r' = r - v; v' = v + 2; }
  }
  transition flip {
    from pos; to neg;
    guard: r <= 0;
    update { }
  }
  transition grow {
    from neg; to neg;
    guard: r < 0;
    update { r' = r + u; u' = u + 2; }
  }
  transition back {
    from neg; to outer;
    guard: r >= 0;
    update { }
  }
  init {
    v = 1;
    u - 2*R - 1 = 0;
    r - R*R + N = 0;
    N >= 0; R >= 0;
  }
}
)";

Polynomial pv(std::size_t n, std::size_t i) {
    return Polynomial::variable(n, i);
}

}  // namespace

TEST(Validate, IntegrateExponentialMatchesClosedForm) {
    const std::vector<Polynomial> field{pv(1, 0)};  // x' = x
    const auto tr = integrate(field, {1.0}, 1e-3, 1.0);
    ASSERT_EQ(tr.states.size(), 1001u);
    EXPECT_FALSE(tr.blew_up);
    EXPECT_NEAR(tr.states.back()[0], std::exp(1.0), 1e-10);
    EXPECT_DOUBLE_EQ(tr.grid.back(), 1.0);
}

TEST(Validate, IntegrateStopsAtBlowup) {
    const std::vector<Polynomial> field{pv(1, 0) * pv(1, 0)};  // x' = x^2
    const auto tr = integrate(field, {17.0}, 1e-3, 1.0);
    EXPECT_TRUE(tr.blew_up);
    EXPECT_LT(tr.states.size(), 1001u);
    for (const auto& x : tr.states) {
        ASSERT_TRUE(std::isfinite(x[0]));
        ASSERT_LE(std::abs(x[0]), 1e8);
    }
}

TEST(Validate, Rk4OrderFactorInWindow) {
    auto m = parse_system(kDemoSrc);
    const auto field = m.full_field(m.locations[0]);
    const double f = order_factor(field, {0.5, 0.5}, 0.02, 1.0);
    EXPECT_GE(f, 8.0);
    EXPECT_LE(f, 32.0);
}

TEST(Validate, SampleBoxRespectsWindows) {
    cob::model::Box box(4);
    box.iv[0] = {rat(2), rat(3)};
    box.iv[1] = {rat(5), std::nullopt};
    box.iv[2] = {std::nullopt, rat(0)};
    std::mt19937_64 rng(0xC0B);
    for (int i = 0; i < 200; ++i) {
        const auto x = sample_box(box, rng);
        EXPECT_GE(x[0], 2.0);
        EXPECT_LE(x[0], 3.0);
        EXPECT_GE(x[1], 5.0);
        EXPECT_LE(x[1], 6.0);
        EXPECT_GE(x[2], -1.0);
        EXPECT_LE(x[2], 0.0);
        EXPECT_GE(x[3], -1.0);
        EXPECT_LE(x[3], 1.0);
    }
    // same seed, same draw
    std::mt19937_64 r1(7), r2(7);
    EXPECT_EQ(sample_box(box, r1), sample_box(box, r2));
}

TEST(Validate, FlowCommutationMotivating) {
    auto m = parse_system(kDemoSrc);
    ClosureConfig cfg;
    cfg.degree_out = 1;
    cfg.degree_init = 3;
    auto res = greatest_closed_collection(m, cfg);
    auto [alpha, abs] = build(m, res.spaces, 1);
    SimConfig sim;
    const auto fc = check_flow_commutation(m.full_field(m.locations[0]),
                                           alpha.at(0),
                                           abs.locations[0].dynamics,
                                           {0.7, 0.3}, sim);
    EXPECT_TRUE(fc.pass);
    EXPECT_GT(fc.compared, 0u);
    EXPECT_LE(fc.residual, sim.tol * fc.scale);
}

TEST(Validate, FlowCommutationDetectsWrongDynamics) {
    auto m = parse_system(kDemoSrc);
    ClosureConfig cfg;
    cfg.degree_out = 1;
    cfg.degree_init = 3;
    auto res = greatest_closed_collection(m, cfg);
    auto [alpha, abs] = build(m, res.spaces, 1);
    auto dyn = abs.locations[0].dynamics;
    dyn[0] = dyn[0] + pv(dyn.size(), 0);  // perturb one abstract derivative
    SimConfig sim;
    const auto fc = check_flow_commutation(m.full_field(m.locations[0]),
                                           alpha.at(0), dyn, {0.7, 0.3}, sim);
    EXPECT_FALSE(fc.pass);
    EXPECT_GT(fc.residual, 1e-2);
}

TEST(Validate, FlowCommutationEquilibriumExactlyZero) {
    // x' = x^2 - x is frozen at x = 1; the probe must read exactly zero.
    const std::size_t n = 1;
    const auto X = pv(n, 0);
    const std::vector<Polynomial> field{X * X - X};
    const std::vector<Polynomial> alpha{X, X * X, X * X * X};
    const auto W1 = pv(3, 0), W2 = pv(3, 1), W3 = pv(3, 2);
    const std::vector<Polynomial> dyn{W2 - W1, rat(2) * W3 - rat(2) * W2,
                                      rat(3) * W3 * W1 - rat(3) * W3};
    SimConfig sim;
    const auto fc = check_flow_commutation(field, alpha, dyn, {1.0}, sim);
    EXPECT_TRUE(fc.pass);
    EXPECT_EQ(fc.residual, 0.0);
    EXPECT_EQ(fc.compared, 1001u);
}

TEST(Validate, FlowSuiteMotivating) {
    auto m = parse_system(kDemoSrc);
    ClosureConfig cfg;
    cfg.degree_out = 1;
    cfg.degree_init = 3;
    auto res = greatest_closed_collection(m, cfg);
    auto [alpha, abs] = build(m, res.spaces, 1);
    SimConfig sim;
    sim.samples = 5;
    const auto out = flow_commutation_suite(m, alpha, abs, sim);
    EXPECT_TRUE(out.pass);
    EXPECT_GT(out.compared, 0u);
}

TEST(Validate, ExpmKnownValues) {
    // nilpotent shift
    const auto n1 = expm({{0, 1}, {0, 0}});
    EXPECT_NEAR(n1[0][0], 1.0, 1e-14);
    EXPECT_NEAR(n1[0][1], 1.0, 1e-14);
    EXPECT_NEAR(n1[1][0], 0.0, 1e-14);
    EXPECT_NEAR(n1[1][1], 1.0, 1e-14);
    // diagonal
    const auto d = expm({{1, 0}, {0, 2}});
    EXPECT_NEAR(d[0][0], std::exp(1.0), 1e-12);
    EXPECT_NEAR(d[1][1], std::exp(2.0), 1e-12);
    EXPECT_NEAR(d[0][1], 0.0, 1e-12);
    // rotation by pi/3
    const double th = std::acos(-1.0) / 3;
    const auto r = expm({{0, -th}, {th, 0}});
    EXPECT_NEAR(r[0][0], 0.5, 1e-12);
    EXPECT_NEAR(r[1][0], std::sqrt(3.0) / 2, 1e-12);
}

TEST(Validate, ExpConservationMotivating) {
    auto m = parse_system(kDemoSrc);
    ClosureConfig cfg;
    cfg.degree_out = 1;
    cfg.degree_init = 3;
    auto res = greatest_closed_collection(m, cfg);
    auto [alpha, abs] = build(m, res.spaces, 1);
    SimConfig sim;
    const auto ec = check_exp_conservation(m.full_field(m.locations[0]),
                                           alpha.at(0), abs.locations[0].a,
                                           abs.locations[0].b, {0.7, 0.3}, sim);
    EXPECT_TRUE(ec.pass);
    EXPECT_GT(ec.segments, 0u);
}

TEST(Validate, ExpConservationDetectsWrongMatrix) {
    auto m = parse_system(kDemoSrc);
    ClosureConfig cfg;
    cfg.degree_out = 1;
    cfg.degree_init = 3;
    auto res = greatest_closed_collection(m, cfg);
    auto [alpha, abs] = build(m, res.spaces, 1);
    auto a = abs.locations[0].a;
    a.at(0, 0) += rat(1);
    SimConfig sim;
    const auto ec = check_exp_conservation(m.full_field(m.locations[0]),
                                           alpha.at(0), a,
                                           abs.locations[0].b, {0.7, 0.3}, sim);
    EXPECT_FALSE(ec.pass);
}

TEST(Validate, DiscreteRunGeoTrace) {
    auto m = parse_system(kGeoSrc);
    // (s, p, k, a, r, n) with a = 3, r = 2, n = 4
    const auto tr =
        run_discrete(m, {rat(0), rat(3), rat(0), rat(3), rat(2), rat(4)}, 50);
    ASSERT_EQ(tr.states.size(), 6u);  // init + 4 body + done
    EXPECT_FALSE(tr.exhausted);
    EXPECT_EQ(tr.locations.back(), 1u);
    EXPECT_EQ(tr.states.back()[0], rat(45));  // 3 + 6 + 12 + 24
    EXPECT_EQ(tr.states.back()[1], rat(48));  // 3 * 2^4
    EXPECT_EQ(tr.states.back()[2], rat(4));
}

TEST(Validate, DiscreteOracleGeoInvariants) {
    auto m = parse_system(kGeoSrc);
    ClosureConfig cfg;
    cfg.degree_out = 1;
    cfg.degree_init = 2;
    auto res = greatest_closed_collection(m, cfg);
    auto [alpha, abs] = build(m, res.spaces, 1);
    const auto hulls = cob::invariants::karr(abs, alpha);
    const auto invs = cob::invariants::equality_invariants(alpha, hulls);
    ASSERT_FALSE(invs.empty());
    for (int a = 0; a <= 5; ++a)
        for (int r = 0; r <= 5; ++r)
            for (int n = 0; n <= 4; ++n) {
                const auto tr = run_discrete(
                    m, {rat(0), rat(a), rat(0), rat(a), rat(r), rat(n)}, 25);
                EXPECT_EQ(max_violation(tr, invs), rat(0))
                    << "a=" << a << " r=" << r << " n=" << n;
            }
}

TEST(Validate, DiscreteOracleFermatInvariants) {
    auto m = parse_system(kFermatSrc);
    ClosureConfig cfg;
    cfg.degree_out = 1;
    cfg.degree_init = 2;
    auto res = greatest_closed_collection(m, cfg);
    auto [alpha, abs] = build(m, res.spaces, 1);
    const auto hulls = cob::invariants::karr(abs, alpha);
    const auto invs = cob::invariants::equality_invariants(alpha, hulls);
    ASSERT_FALSE(invs.empty());
    for (int N = 0; N <= 6; ++N)
        for (int R = 0; R <= 6; ++R) {
            // (r, u, v, N, R) from the solved initial conditions
            const auto tr = run_discrete(
                m,
                {rat(R * R - N), rat(2 * R + 1), rat(1), rat(N), rat(R)}, 200);
            EXPECT_EQ(max_violation(tr, invs), rat(0)) << "N=" << N
                                                       << " R=" << R;
        }
}

TEST(Validate, MaxViolationDetectsWrongInvariant) {
    auto m = parse_system(kGeoSrc);
    const auto tr =
        run_discrete(m, {rat(0), rat(3), rat(0), rat(3), rat(2), rat(2)}, 50);
    cob::invariants::EqualityInvariant wrong;
    wrong.location = 0;
    wrong.e = rat(0);
    wrong.concrete = pv(6, 0) - pv(6, 1);  // s = p does not hold
    EXPECT_GT(max_violation(tr, {wrong}), rat(0));
}
