#include "cmrf/basis/quadrature.hpp"
#include "cmrf/core/errors.hpp"
#include "cmrf/learn/learned_model.hpp"
#include "cmrf/learn/moments.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cmrf;

namespace {

const Interval unit{ 0.0, 1.0 };

double
max_abs_phi(const BasisSystem& b, int s)
{
  double m = 0.0;
  for (int k = 0; k <= 2000; ++k)
    m = std::max(m, std::abs(b.phi(s, b.interval().lower + b.chi() * k / 2000.0 * (k < 2000))));
  return std::max(m, std::abs(b.phi(s, b.interval().upper)));
}

} // namespace

TEST_CASE("moments of identical points")
{
  auto g = build_chain(3);
  BasisSystem b(BasisKind::cosine, unit);
  std::vector<double> point{ 0.2, 0.7, 0.45 };
  std::vector<double> v;
  for (int k = 0; k < 17; ++k)
    v.insert(v.end(), point.begin(), point.end());
  auto m = compute_moments(Dataset(3, v, unit), g, b, 4);
  for (std::size_t i = 0; i < 3; ++i)
    for (int s = 1; s <= 4; ++s)
      CHECK(m.node(i)[s - 1] == doctest::Approx(b.phi(s, point[i])).epsilon(1e-13));
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    for (int s = 1; s <= 4; ++s)
      for (int t = 1; t <= 4; ++t)
        CHECK(m.edge(e)(s - 1, t - 1) ==
              doctest::Approx(b.phi(s, point[g.edge(e).u]) * b.phi(t, point[g.edge(e).v])).epsilon(1e-13));
}

TEST_CASE("moments of two points are midpoints")
{
  auto g = build_chain(2);
  BasisSystem b(BasisKind::legendre, { -1.0, 2.0 });
  Dataset d(2, { -0.5, 1.0, 1.5, 0.25 }, { -1.0, 2.0 });
  auto m = compute_moments(d, g, b, 3);
  for (int s = 1; s <= 3; ++s) {
    CHECK(m.node(0)[s - 1] == doctest::Approx(0.5 * (b.phi(s, -0.5) + b.phi(s, 1.5))));
    CHECK(m.node(1)[s - 1] == doctest::Approx(0.5 * (b.phi(s, 1.0) + b.phi(s, 0.25))));
    for (int t = 1; t <= 3; ++t)
      CHECK(m.edge(0)(s - 1, t - 1) ==
            doctest::Approx(0.5 * (b.phi(s, -0.5) * b.phi(t, 1.0) + b.phi(s, 1.5) * b.phi(t, 0.25))));
  }
}

TEST_CASE("moments of uniform samples are small")
{
  auto g = build_chain(4);
  BasisSystem b(BasisKind::cosine, unit);
  auto m = compute_moments(testing::uniform_dataset(4, 100000, unit, 5), g, b, 6);
  for (std::size_t i = 0; i < 4; ++i)
    for (int s = 0; s < 6; ++s)
      CHECK(std::abs(m.node(i)[s]) <= 0.02);
}

TEST_CASE("moments are bounded by the basis functions")
{
  auto g = build_grid(2, 3);
  for (auto kind : { BasisKind::cosine, BasisKind::legendre }) {
    BasisSystem b(kind, unit);
    auto m = compute_moments(testing::uniform_dataset(6, 50, unit, 9), g, b, 5);
    for (std::size_t i = 0; i < 6; ++i)
      for (int s = 1; s <= 5; ++s)
        CHECK(std::abs(m.node(i)[s - 1]) <= max_abs_phi(b, s) + 1e-12);
  }
}

TEST_CASE("moment preconditions")
{
  BasisSystem b(BasisKind::cosine, unit, 6);
  auto d = testing::uniform_dataset(3, 10, unit, 1);
  CHECK_THROWS_AS(compute_moments(d, build_chain(4), b, 2), std::invalid_argument);
  CHECK_THROWS_AS(compute_moments(d, build_chain(3), b, 7), std::invalid_argument);
  CHECK_THROWS_AS(compute_moments(d, build_chain(3), BasisSystem(BasisKind::cosine, { 0.0, 2.0 }), 2),
                  std::invalid_argument);
}

TEST_CASE("node belief")
{
  BasisSystem native(BasisKind::cosine);
  MomentSet m(build_chain(2), native, 1);
  m.node(0)[0] = 0.1;
  for (double x : { 0.0, 1.0, 2.5 })
    CHECK(belief_node(m, 0, x) ==
          doctest::Approx(1.0 / std::numbers::pi + 0.1 * std::sqrt(2.0 / std::numbers::pi) * std::cos(x)));
  CHECK_THROWS_AS(belief_node(m, 0, 3.5), std::domain_error);

  MomentSet zero(build_chain(2), BasisSystem(BasisKind::legendre, { 0.0, 4.0 }), 0);
  CHECK(belief_node(zero, 1, 3.0) == 0.25);
}

TEST_CASE("edge belief of zero moments is uniform")
{
  MomentSet m(build_chain(3), BasisSystem(BasisKind::cosine, { 0.0, 2.0 }), 3);
  CHECK(belief_edge(m, 0, 1, 0.3, 1.9) == doctest::Approx(0.25));
  CHECK(belief_edge(m, 2, 1, 0.3, 1.9) == doctest::Approx(0.25));
  CHECK_THROWS_AS(belief_edge(m, 0, 2, 0.3, 0.4), std::invalid_argument);
  CHECK_THROWS_AS(belief_edge(m, 0, 1, 0.3, 2.4), std::domain_error);
}

TEST_CASE("edge belief argument order follows node labels")
{
  BasisSystem b(BasisKind::cosine, unit);
  auto m = testing::random_moments(build_chain(2), b, 3, 4);
  CHECK(belief_edge(m, 0, 1, 0.2, 0.9) == doctest::Approx(belief_edge(m, 1, 0, 0.9, 0.2)).epsilon(1e-14));
}

TEST_CASE("normalization and marginalization hold for arbitrary moments")
{
  for (auto kind : { BasisKind::cosine, BasisKind::legendre }) {
    BasisSystem b(kind, { -0.5, 1.5 });
    auto g = build_grid(2, 2);
    auto rule = make_quadrature(b.interval(), 64);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto m = testing::random_moments(g, b, 6, seed);
      for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(rule.integrate([&](double x) { return belief_node(m, i, x); }) - 1.0) <= 1e-8);
      for (const auto& e : g.edges()) {
        double total = rule.integrate(
          [&](double xu) { return rule.integrate([&](double xv) { return belief_edge(m, e.u, e.v, xu, xv); }); });
        CHECK(std::abs(total - 1.0) <= 1e-8);
        for (int k = 0; k < 64; ++k) {
          const double x = -0.5 + 2.0 * (k + 0.5) / 64.0;
          double mu = rule.integrate([&](double xv) { return belief_edge(m, e.u, e.v, x, xv); });
          double mv = rule.integrate([&](double xu) { return belief_edge(m, e.u, e.v, xu, x); });
          CHECK(std::abs(mu - belief_node(m, e.u, x)) <= 1e-8);
          CHECK(std::abs(mv - belief_node(m, e.v, x)) <= 1e-8);
        }
      }
    }
  }
}

TEST_CASE("fit on uniform data leaves the cutoff inactive")
{
  auto g = build_chain(5);
  BasisSystem b(BasisKind::cosine, unit);
  auto model = fit(testing::uniform_dataset(5, 10000, unit, 21), g, b, 1, 1e-4);
  CHECK_FALSE(model.cutoff_active());
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(std::abs(model.node_normalizer(i) - 1.0) <= 1e-6);
  for (std::size_t e = 0; e < 4; ++e)
    CHECK(std::abs(model.edge_normalizer(e) - 1.0) <= 1e-6);
}

TEST_CASE("saturated cutoff gives the uniform density")
{
  auto g = build_chain(3);
  BasisSystem b(BasisKind::cosine, { 0.0, 2.0 });
  auto model = fit(testing::uniform_dataset(3, 100, b.interval(), 2), g, b, 3, 10.0);
  CHECK(model.cutoff_active());
  for (double x : { 0.0, 0.3, 1.1, 2.0})
    CHECK(model.cutoff_node_belief(1, x) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(model.cutoff_edge_belief(0, 0.4, 1.7) == doctest::Approx(0.25).epsilon(1e-12));
  std::vector<double> p{ 0.1, 1.0, 1.9 }, q{ 2.0, 0.0, 0.5 };
  CHECK(model.unnorm_density(p) == doctest::Approx(model.unnorm_density(q)).epsilon(1e-14));
}

TEST_CASE("normalizers respect their lower bounds")
{
  auto g = build_chain(4);
  BasisSystem b(BasisKind::legendre, { 0.0, 2.0 });
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    LearnedModel model(testing::random_moments(g, b, 4, seed), 1e-3);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(model.node_normalizer(i) >= 1e-3 * 2.0);
    for (std::size_t e = 0; e < 3; ++e)
      CHECK(model.edge_normalizer(e) >= 1e-3 * 4.0);
  }
  CHECK_THROWS_AS(LearnedModel(MomentSet(g, b, 1), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(LearnedModel(MomentSet(g, b, 1), -1.0), std::invalid_argument);
}

TEST_CASE("cutoff normalizers match an independent fine quadrature")
{
  auto g = build_chain(2);
  BasisSystem b(BasisKind::cosine, unit);
  auto m = testing::random_moments(g, b, 3, 17);
  LearnedModel model(m, 1e-2);
  REQUIRE(model.cutoff_active());
  // composite midpoint on a fine grid, which tolerates the kinks
  const int G = 4000;
  double z0 = 0.0;
  for (int k = 0; k < G; ++k)
    z0 += std::max(1e-2, belief_node(m, 0, (k + 0.5) / G)) / G;
  CHECK(model.node_normalizer(0) == doctest::Approx(z0).epsilon(1e-6));
  const int G2 = 800;
  double z = 0.0;
  for (int a = 0; a < G2; ++a)
    for (int c = 0; c < G2; ++c)
      z += std::max(1e-2, belief_edge(m, 0, 1, (a + 0.5) / G2, (c + 0.5) / G2)) / (double(G2) * G2);
  CHECK(model.edge_normalizer(0) == doctest::Approx(z).epsilon(1e-5));
}

TEST_CASE("energy of learned models")
{
  BasisSystem b(BasisKind::cosine, unit);
  {
    auto g = build_chain(2);
    LearnedModel model(testing::random_moments(g, b, 3, 8), 1e-4);
    for (auto [x0, x1] : { std::pair{ 0.1, 0.8 }, std::pair{ 0.5, 0.5 }, std::pair{ 1.0, 0.0 } }) {
      std::vector<double> x{ x0, x1 };
      CHECK(model.energy(x) == doctest::Approx(-std::log(std::max(1e-4, belief_edge(model.moments(), 0, 1, x0, x1)))));
    }
  }
  {
    auto g = build_chain(4);
    const double chi = 2.0;
    LearnedModel model(MomentSet(g, BasisSystem(BasisKind::cosine, { 0.0, chi }), 3), 1e-4);
    double expected = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      expected -= (1.0 - g.degree(i)) * std::log(1.0 / chi);
    expected -= 3.0 * std::log(1.0 / (chi * chi));
    for (auto x : { std::vector<double>{ 0.0, 0.5, 1.5, 2.0 }, std::vector<double>{ 1.0, 1.0, 0.2, 0.3 } })
      CHECK(model.energy(x) == doctest::Approx(expected).epsilon(1e-13));
  }
  {
    auto g = build_chain(3);
    LearnedModel model(testing::random_moments(g, b, 5, 3), 1e-4);
    REQUIRE(model.cutoff_active());
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bool hit = false;
    for (int k = 0; k < 2000; ++k) {
      std::vector<double> x{ u(rng), u(rng), u(rng) };
      const auto& m = model.moments();
      bool below = belief_node(m, 1, x[1]) < 1e-4 || belief_edge(m, 0, 1, x[0], x[1]) < 1e-4 ||
                   belief_edge(m, 1, 2, x[1], x[2]) < 1e-4;
      hit |= below;
      CHECK(std::isfinite(model.energy(x)));
    }
    CHECK(hit);
    std::vector<double> out{ 0.1, 1.2, 0.3 };
    CHECK_THROWS_AS(model.energy(out), std::domain_error);
    std::vector<double> short_point{ 0.1, 0.2 };
    CHECK_THROWS_AS(model.energy(short_point), std::invalid_argument);
  }
}

TEST_CASE("energy agrees with its local terms and deltas")
{
  auto g = build_grid(2, 3);
  BasisSystem b(BasisKind::legendre, unit);
  LearnedModel model(testing::random_moments(g, b, 3, 31), 1e-3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> x(6);
    for (auto& v : x)
      v = u(rng);
    double psi = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
      psi -= model.node_term(i, x[i]);
    for (std::size_t e = 0; e < g.edge_count(); ++e)
      psi -= model.edge_term(e, x[g.edge(e).u], x[g.edge(e).v]);
    CHECK(model.energy(x) == doctest::Approx(psi).epsilon(1e-12));

    const std::size_t i = k % 6;
    const double value = u(rng);
    auto y = x;
    y[i] = value;
    CHECK(std::abs(model.delta_energy(x, i, value) - (model.energy(y) - model.energy(x))) <= 1e-10);
    CHECK(model.unnorm_density(x) / model.unnorm_density(y) ==
          doctest::Approx(std::exp(model.energy(y) - model.energy(x))).epsilon(1e-12));
  }
}

TEST_CASE("moment matching with an inactive cutoff")
{
  auto g = build_chain(4);
  for (auto kind : { BasisKind::cosine, BasisKind::legendre }) {
    BasisSystem b(kind, unit);
    auto model = fit(testing::uniform_dataset(4, 2000, unit, 12), g, b, 3, 1e-4);
    REQUIRE_FALSE(model.cutoff_active());
    const auto& m = model.moments();
    auto rule = make_quadrature(unit, 64);
    for (std::size_t i = 0; i < 4; ++i)
      for (int s = 1; s <= 3; ++s) {
        double c = rule.integrate([&](double x) { return b.phi(s, x) * model.cutoff_node_belief(i, x); });
        CHECK(std::abs(c - m.node(i)[s - 1]) <= 1e-8);
      }
    for (std::size_t e = 0; e < 3; ++e)
      for (int s = 1; s <= 3; ++s)
        for (int t = 1; t <= 3; ++t) {
          double d = rule.integrate([&](double xu) {
            return rule.integrate(
              [&](double xv) { return b.phi(s, xu) * b.phi(t, xv) * model.cutoff_edge_belief(e, xu, xv); });
          });
          CHECK(std::abs(d - m.edge(e)(s - 1, t - 1)) <= 1e-8);
        }
  }
}

TEST_CASE("small cutoffs converge to the truncated beliefs")
{
  auto g = build_chain(3);
  BasisSystem b(BasisKind::cosine, unit);
  auto m = testing::smooth_moments(g, b, 4, 0.3, 6);
  LearnedModel coarse(m, 1e-4), fine(m, 1e-8);
  REQUIRE_FALSE(coarse.cutoff_active());
  double worst = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double x = k / 200.0;
    for (std::size_t i = 0; i < 3; ++i)
      worst = std::max(worst, std::abs(coarse.cutoff_node_belief(i, x) - fine.cutoff_node_belief(i, x)));
    for (std::size_t e = 0; e < 2; ++e)
      worst = std::max(worst, std::abs(coarse.cutoff_edge_belief(e, x, 1.0 - x) - fine.cutoff_edge_belief(e, x, 1.0 - x)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("order zero models are uniform")
{
  auto g = build_chain(9);
  BasisSystem b(BasisKind::cosine, unit);
  auto model = fit(testing::uniform_dataset(9, 50, unit, 3), g, b, 0, 1e-4);
  CHECK(model.order() == 0);
  std::vector<double> x(9, 0.3), y(9, 0.9);
  CHECK(model.energy(x) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(model.energy(y) == model.energy(x));
}

TEST_CASE("model text round trip")
{
  auto g = build_grid(2, 3);
  for (auto kind : { BasisKind::cosine, BasisKind::legendre }) {
    BasisSystem b(kind, { -1.0, 0.5 }, 10);
    LearnedModel model(testing::random_moments(g, b, 4, 7), 3e-3);
    auto back = model_from_text(to_text(model));
    CHECK(back.order() == 4);
    CHECK(back.epsilon() == model.epsilon());
    CHECK(back.basis() == model.basis());
    CHECK(back.graph() == model.graph());
    for (std::size_t i = 0; i < 6; ++i)
      CHECK(back.moments().node(i) == model.moments().node(i));
    for (std::size_t e = 0; e < g.edge_count(); ++e)
      CHECK(back.moments().edge(e) == model.moments().edge(e));
    std::vector<double> x{ -0.9, 0.1, 0.4, -0.2, 0.0, 0.5 };
    CHECK(back.energy(x) == model.energy(x));
    CHECK(to_text(back) == to_text(model));
  }

  auto dir = testing::scratch_dir("model");
  BasisSystem b(BasisKind::cosine, unit);
  LearnedModel model(testing::random_moments(build_chain(3), b, 2, 1), 1e-4);
  save_model(model, dir / "m.txt");
  CHECK(to_text(load_model(dir / "m.txt")) == to_text(model));
  CHECK_THROWS_AS(load_model(dir / "nope.txt"), IoError);
  CHECK_THROWS_AS(model_from_text("basis cosine\nbogus 3\n"), ParseError);
  std::filesystem::remove_all(dir);
}
