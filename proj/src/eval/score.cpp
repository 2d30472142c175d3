#include "cmrf/eval/score.hpp"

#include "cmrf/core/parallel.hpp"
#include "cmrf/core/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmrf {

namespace {

constexpr std::size_t mc_partitions = 16;

// Shifted power sums of v_m = -Psi(y_m): sum exp(v - shift), sum exp(2 (v - shift)).
struct LogSums
{
  double shift{ -std::numeric_limits<double>::infinity() };
  double s1{ 0.0 };
  double s2{ 0.0 };
  std::size_t count{ 0 };

  void add(double v)
  {
    ++count;
    if (v == -std::numeric_limits<double>::infinity())
      return;
    if (v > shift) {
      const double r = std::exp(shift - v);
      s1 *= r;
      s2 *= r * r;
      shift = v;
    }
    const double w = std::exp(v - shift);
    s1 += w;
    s2 += w * w;
  }

  void merge(const LogSums& o)
  {
    count += o.count;
    if (o.s1 == 0.0)
      return;
    if (o.shift > shift) {
      const double r = s1 == 0.0 ? 0.0 : std::exp(shift - o.shift);
      s1 = s1 * r + o.s1;
      s2 = s2 * r * r + o.s2;
      shift = o.shift;
    } else {
      const double r = std::exp(o.shift - shift);
      s1 += o.s1 * r;
      s2 += o.s2 * r * r;
    }
  }
};

} // namespace

Estimate
mc_log_partition(const EnergyModel& model, std::size_t M, std::uint64_t seed, unsigned threads)
{
  if (M < 100)
    throw std::invalid_argument("mc_log_partition needs M >= 100");
  const std::size_t n = model.size();
  const Interval box = model.interval();
  std::vector<LogSums> parts(mc_partitions);
  parallel_for(
    mc_partitions,
    [&](std::size_t p) {
      const std::size_t begin = M * p / mc_partitions;
      const std::size_t end = M * (p + 1) / mc_partitions;
      std::mt19937_64 rng(derive_seed(seed, p));
      std::uniform_real_distribution<double> uniform(box.lower, box.upper);
      std::vector<double> y(n);
      LogSums sums;
      for (std::size_t m = begin; m < end; ++m) {
        for (auto& yi : y)
          yi = uniform(rng);
        sums.add(-model.energy(y));
      }
      parts[p] = sums;
    },
    threads);
  LogSums total;
  for (const auto& p : parts)
    total.merge(p);
  if (total.s1 == 0.0)
    throw std::runtime_error("all Monte Carlo weights vanished");
  const double Md = static_cast<double>(M);
  const double mean = total.s1 / Md;
  const double var = std::max(0.0, (total.s2 / Md - mean * mean) * Md / (Md - 1.0));
  Estimate out;
  out.value = static_cast<double>(n) * std::log(box.width()) + total.shift + std::log(mean);
  out.std_error = std::sqrt(var / Md) / mean;
  return out;
}

double
log_likelihood(const EnergyModel& model, const Dataset& data, double log_partition)
{
  if (data.dims() != model.size())
    throw std::invalid_argument("dataset has " + std::to_string(data.dims()) + " variables, model has " +
                                std::to_string(model.size()));
  double sum = 0.0;
  for (std::size_t mu = 0; mu < data.size(); ++mu)
    sum += -model.energy(data.point(mu)) - log_partition;
  return sum / static_cast<double>(data.dims() * data.size());
}

std::size_t
parameter_count(std::size_t n, int K, std::size_t edge_count)
{
  if (K < 0)
    throw std::invalid_argument("K must be non-negative");
  const auto k = static_cast<std::size_t>(K);
  return n * k + edge_count * k * k;
}

double
aic(double loglik, std::size_t n, std::size_t N, int K, std::size_t edge_count)
{
  if (n == 0 || N == 0)
    throw std::invalid_argument("aic needs positive n and N");
  return -2.0 * loglik +
         2.0 * static_cast<double>(parameter_count(n, K, edge_count)) / static_cast<double>(n * N);
}

Estimate
kld_from_samples(const EnergyModel& gen, const EnergyModel& model, const Dataset& samples,
                 const Estimate& gen_log_partition, const Estimate& model_log_partition)
{
  if (gen.size() != model.size() || !(gen.interval() == model.interval()))
    throw std::invalid_argument("models must share n and the interval");
  if (samples.dims() != gen.size())
    throw std::invalid_argument("sample dimension does not match the models");
  const std::size_t S = samples.size();
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t k = 0; k < S; ++k) {
    const auto x = samples.point(k);
    // ln P_gen - ln P_model up to the partition functions
    const double r = model.energy(x) - gen.energy(x);
    sum += r;
    sum_sq += r * r;
  }
  const double Sd = static_cast<double>(S);
  const double mean = sum / Sd;
  const double var = S > 1 ? std::max(0.0, (sum_sq - Sd * mean * mean) / (Sd - 1.0)) : 0.0;
  const double n = static_cast<double>(gen.size());
  Estimate out;
  out.value = (mean - gen_log_partition.value + model_log_partition.value) / n;
  out.std_error = std::sqrt(var / Sd + gen_log_partition.std_error * gen_log_partition.std_error +
                            model_log_partition.std_error * model_log_partition.std_error) /
                  n;
  return out;
}

Estimate
kld_estimate(const EnergyModel& gen, const EnergyModel& model, std::size_t S, std::uint64_t seed,
             const KldOptions& options)
{
  SamplerConfig cfg = options.sampler;
  cfg.seed = derive_seed(seed, 0);
  const Dataset samples = mh_sample(gen, S, cfg);
  const Estimate z_gen = mc_log_partition(gen, options.M, derive_seed(seed, 1));
  const Estimate z_model = mc_log_partition(model, options.M, derive_seed(seed, 2));
  return kld_from_samples(gen, model, samples, z_gen, z_model);
}

Score
make_score(int K, double loglik, const Estimate& log_partition, std::size_t n, std::size_t N,
           std::size_t edge_count, std::size_t M, std::uint64_t seed)
{
  Score s;
  s.K = K;
  s.loglik = loglik;
  s.loglik_se = log_partition.std_error / static_cast<double>(n);
  s.aic = aic(loglik, n, N, K, edge_count);
  s.log_partition = log_partition;
  s.n = n;
  s.N = N;
  s.edge_count = edge_count;
  s.M = M;
  s.seed = seed;
  return s;
}

} // namespace cmrf
