#include "cmrf/learn/learned_model.hpp"
#include "cmrf/sample/energy.hpp"
#include "cmrf/sample/sampler.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cmrf;

namespace {

const Interval unit{ 0.0, 1.0 };

double
column_mean(const Dataset& d, std::size_t i)
{
  double s = 0.0;
  for (std::size_t mu = 0; mu < d.size(); ++mu)
    s += d(mu, i);
  return s / static_cast<double>(d.size());
}

double
column_sd(const Dataset& d, std::size_t i)
{
  const double m = column_mean(d, i);
  double s = 0.0;
  for (std::size_t mu = 0; mu < d.size(); ++mu)
    s += (d(mu, i) - m) * (d(mu, i) - m);
  return std::sqrt(s / static_cast<double>(d.size() - 1));
}

} // namespace

TEST_CASE("generative energy values")
{
  auto gen = generative_energy(build_chain(9), unit);
  CHECK(gen.center() == 0.5);
  std::vector<double> centre(9, 0.5);
  CHECK(gen.energy(centre) == 0.0);

  auto pair = generative_energy(build_chain(2), unit);
  std::vector<double> x{ 0.0, 1.0 };
  CHECK(pair.energy(x) == doctest::Approx(-1.5).epsilon(1e-15));

  std::vector<double> corner(9, 0.0);
  CHECK(gen.energy(corner) < gen.energy(centre));

  auto flipped = generative_energy(build_chain(2), unit, true);
  CHECK(flipped.energy(x) == doctest::Approx(1.5).epsilon(1e-15));

  // the centre is (beta - alpha) / 2 as printed, not the midpoint
  auto shifted = generative_energy(build_chain(2), { 1.0, 3.0 });
  CHECK(shifted.center() == 1.0);
  std::vector<double> y{ 2.0, 3.0 };
  CHECK(shifted.energy(y) == doctest::Approx(-(1.0 + 4.0) - 1.0));
}

TEST_CASE("delta energies match two full evaluations")
{
  auto g = build_grid(3, 3);
  auto gen = generative_energy(g, unit);
  LearnedModel learned(testing::smooth_moments(g, BasisSystem(BasisKind::cosine, unit), 3, 0.2, 3), 1e-4);
  FunctionEnergy fn(9, unit, [](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      s += std::sin(3.0 * x[i] * (i + 1.0));
    return s;
  });
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const EnergyModel* model : std::initializer_list<const EnergyModel*>{ &gen, &learned, &fn })
    for (int k = 0; k < 200; ++k) {
      std::vector<double> x(9);
      for (auto& v : x)
        v = u(rng);
      const std::size_t i = k % 9;
      auto y = x;
      y[i] = u(rng);
      CHECK(std::abs(model->delta_energy(x, i, y[i]) - (model->energy(y) - model->energy(x))) <= 1e-10);
    }
}

TEST_CASE("acceptance satisfies detailed balance")
{
  auto gen = generative_energy(build_chain(5), unit);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> a(5);
    for (auto& v : a)
      v = u(rng);
    const std::size_t i = k % 5;
    auto b = a;
    b[i] = u(rng);
    const double forward = mh_acceptance(gen, a, i, b[i]);
    const double backward = mh_acceptance(gen, b, i, a[i]);
    // P(a) acc(a->b) = P(b) acc(b->a)
    CHECK(forward / backward == doctest::Approx(std::exp(gen.energy(a) - gen.energy(b))).epsilon(1e-12));
  }

  FunctionEnergy flat(3, unit, [](std::span<const double>) { return 0.0; });
  std::vector<double> x{ 0.1, 0.2, 0.3 };
  for (double v : { 0.0, 0.5, 1.0 })
    CHECK(mh_acceptance(flat, x, 1, v) == 1.0);
}

TEST_CASE("flat energy gives uniform samples")
{
  FunctionEnergy flat(3, { -1.0, 3.0 }, [](std::span<const double>) { return 0.0; });
  auto d = mh_sample(flat, 10000, { 100, 10, 12 });
  CHECK(d.size() == 10000);
  const double sigma = 4.0 / std::sqrt(12.0) / std::sqrt(10000.0);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(column_mean(d, i) - 1.0) <= 3.0 * sigma);
}

TEST_CASE("generative samples are symmetric about the centre")
{
  auto gen = generative_energy(build_chain(9), unit);
  auto d = mh_sample(gen, 10000, { 10000, 10, 5 });
  for (std::size_t i = 0; i < 9; ++i)
    CHECK(std::abs(column_mean(d, i) - 0.5) <= 3.0 * column_sd(d, i) / std::sqrt(10000.0));
}

TEST_CASE("sampling is reproducible")
{
  auto gen = generative_energy(build_chain(4), unit);
  SamplerConfig cfg{ 50, 3, 99 };
  auto a = mh_sample(gen, 300, cfg);
  auto b = mh_sample(gen, 300, cfg);
  CHECK(a.values() == b.values());
  cfg.seed = 100;
  CHECK(mh_sample(gen, 300, cfg).values() != a.values());
  CHECK_THROWS_AS(mh_sample(gen, 0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(mh_sample(gen, 10, { 10, 0, 1 }), std::invalid_argument);
}
