#pragma once

#include "cmrf/eval/score.hpp"
#include "cmrf/experiment/config.hpp"
#include "cmrf/learn/coefficients.hpp"
#include "cmrf/learn/learned_model.hpp"

#include <optional>
#include <ostream>
#include <vector>

namespace cmrf {

struct TrialRow
{
  std::size_t trial{ 0 };
  int K{ 0 };
  double loglik{ 0.0 };
  double loglik_se{ 0.0 };
  double aic{ 0.0 };
  std::optional<Estimate> kld;
  Estimate log_partition;
  std::uint64_t seed{ 0 };
};

struct AggregateRow
{
  int K{ 0 };
  double mean_loglik{ 0.0 };
  double sd_loglik{ 0.0 };
  double mean_aic{ 0.0 };
  double sd_aic{ 0.0 };
  double mean_kld{ 0.0 };
  double sd_kld{ 0.0 };
  std::size_t argmin_count{ 0 };     //!< trials whose AIC is minimized at this K
  std::size_t kld_argmin_count{ 0 }; //!< trials whose KLD is minimized at this K
};

struct SweepResult
{
  std::vector<TrialRow> rows; //!< ordered by (trial, K)
  std::vector<AggregateRow> aggregate;
  std::size_t completed_trials{ 0 };
  std::size_t failed_trials{ 0 };

  //! K with the largest argmin_count (smallest K on ties).
  int modal_aic_argmin() const;
  int modal_kld_argmin() const;
  //! K minimizing the per-K mean.
  int mean_aic_argmin() const;
  int mean_kld_argmin() const;
};

//! How a model's log-partition is obtained.
struct PartitionOptions
{
  std::size_t M{ default_mc_samples };
  bool exact_tree{ true };
  int grid{ 256 };
};

//! ln Z of a pairwise model: exact transfer-matrix elimination on the
//! discretized model for chains (when enabled), closed form for the K = 0
//! learned model, Monte Carlo otherwise.
Estimate model_log_partition(const PairwiseEnergy& model, const PartitionOptions& options, std::uint64_t seed);

//! Samples a dataset per trial, fits every K, scores it, and writes
//! trials.csv and aggregate.csv into cfg.output (when write_files is set).
SweepResult run_sweep(const ExperimentConfig& cfg, bool write_files = true);

void write_trials_csv(std::ostream& out, const std::vector<TrialRow>& rows);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

//! Header and one row in the per-trial schema.
void write_score_csv(std::ostream& out, const TrialRow& row);

//! H and J of the recovered coefficients as CSV (term,a,b,s,t,value).
void write_coefficients_csv(std::ostream& out, const CoefficientSet& coeffs);

} // namespace cmrf
