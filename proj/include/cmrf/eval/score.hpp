#pragma once

#include "cmrf/core/dataset.hpp"
#include "cmrf/sample/energy.hpp"
#include "cmrf/sample/sampler.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>

namespace cmrf {

//! Estimate with its standard error.
struct Estimate
{
  double value{ 0.0 };
  double std_error{ 0.0 };
};

inline constexpr std::size_t default_mc_samples = 20000;

//! ln Z for Z = int exp(-Psi) over [alpha, beta]^n, estimated as
//! chi^n / M * sum_m exp(-Psi(y_m)) with y_m uniform on the box. The
//! standard error is the delta-method error of the logarithm. The sample
//! range is split into fixed partitions with derived seeds, so the result
//! does not depend on `threads`.
Estimate mc_log_partition(const EnergyModel& model, std::size_t M, std::uint64_t seed, unsigned threads = 1);

//! (1 / (n N)) * sum_mu [-Psi(x_mu) - lnZ]
double log_likelihood(const EnergyModel& model, const Dataset& data, double log_partition);

//! Number of controllable parameters n K + |E| K^2.
std::size_t parameter_count(std::size_t n, int K, std::size_t edge_count);

//! -2 loglik + 2 R_K / (n N)
double aic(double loglik, std::size_t n, std::size_t N, int K, std::size_t edge_count);

//! (1/n) * mean_x~gen [ln P_gen(x) - ln P_model(x)] over the given samples,
//! with both log-partitions supplied. The error combines the sample standard
//! error of the mean with both partition errors in quadrature.
Estimate kld_from_samples(const EnergyModel& gen, const EnergyModel& model, const Dataset& samples,
                          const Estimate& gen_log_partition, const Estimate& model_log_partition);

struct KldOptions
{
  std::size_t M{ default_mc_samples };
  SamplerConfig sampler{};
};

//! Draws S samples from gen by Metropolis-Hastings and estimates both
//! normalizers by Monte Carlo with independent seeds derived from `seed`.
Estimate kld_estimate(const EnergyModel& gen, const EnergyModel& model, std::size_t S, std::uint64_t seed,
                      const KldOptions& options = {});

//! One scored model.
struct Score
{
  int K{ 0 };
  double loglik{ 0.0 };
  double loglik_se{ 0.0 };
  double aic{ 0.0 };
  std::optional<Estimate> kld;
  Estimate log_partition;
  std::size_t n{ 0 };
  std::size_t N{ 0 };
  std::size_t edge_count{ 0 };
  std::size_t M{ 0 };
  std::uint64_t seed{ 0 };
};

//! Builds a Score from a log-likelihood and its partition estimate.
Score make_score(int K, double loglik, const Estimate& log_partition, std::size_t n, std::size_t N,
                 std::size_t edge_count, std::size_t M, std::uint64_t seed);

} // namespace cmrf
