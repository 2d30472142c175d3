#include "cmrf/experiment/sweep.hpp"

#include "cmrf/core/errors.hpp"
#include "cmrf/core/parallel.hpp"
#include "cmrf/core/random.hpp"
#include "cmrf/infer/lbp.hpp"
#include "cmrf/learn/coefficients.hpp"
#include "cmrf/sample/sampler.hpp"

#include <fmt/core.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>

namespace cmrf {

namespace {

std::string
num(double x)
{
  return fmt::format("{:.12g}", x);
}

std::size_t
argmin_index(const std::vector<double>& v)
{
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

double
mean_of(const std::vector<double>& v)
{
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double
sd_of(const std::vector<double>& v)
{
  if (v.size() < 2)
    return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v)
    ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

struct TrialOutcome
{
  std::vector<TrialRow> rows;
  bool ok{ false };
  std::string reason;
};

TrialOutcome
run_trial(const ExperimentConfig& cfg, std::size_t trial)
{
  const auto trial_seed = derive_seed(cfg.seed, trial);
  const Graph graph = cfg.graph();
  const GenerativeEnergy gen(graph, cfg.interval(), cfg.negate_generative_energy);
  const BasisSystem basis = cfg.basis_system();
  const PartitionOptions popts{ cfg.M, cfg.exact_tree_partition, cfg.partition_grid };

  SamplerConfig sc = cfg.sampler;
  sc.seed = derive_seed(trial_seed, 1);
  const Dataset data = mh_sample(gen, cfg.N, sc);

  std::optional<Dataset> gen_samples;
  Estimate gen_lnz;
  if (cfg.kld) {
    sc.seed = derive_seed(trial_seed, 3);
    gen_samples = mh_sample(gen, cfg.kld_samples, sc);
    gen_lnz = model_log_partition(gen, popts, derive_seed(trial_seed, 4));
  }

  TrialOutcome out;
  for (int K : cfg.K_list) {
    const LearnedModel model = fit(data, graph, basis, K, cfg.epsilon);
    // one ln Z seed for all K: differences between orders see common noise
    const Estimate lnz = model_log_partition(model, popts, derive_seed(trial_seed, 2));
    TrialRow row;
    row.trial = trial;
    row.K = K;
    row.loglik = log_likelihood(model, data, lnz.value);
    row.loglik_se = lnz.std_error / static_cast<double>(graph.size());
    row.aic = aic(row.loglik, graph.size(), cfg.N, K, graph.edge_count());
    row.log_partition = lnz;
    row.seed = trial_seed;
    if (gen_samples)
      row.kld = kld_from_samples(gen, model, *gen_samples, gen_lnz, lnz);
    out.rows.push_back(row);
  }
  out.ok = true;
  return out;
}

std::vector<AggregateRow>
aggregate(const ExperimentConfig& cfg, const std::vector<TrialRow>& rows, std::size_t trials)
{
  const std::size_t nk = cfg.K_list.size();
  std::vector<AggregateRow> agg(nk);
  std::vector<std::vector<double>> ll(nk), ai(nk), kl(nk);
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> trial_aic(nk), trial_kld(nk);
    for (std::size_t k = 0; k < nk; ++k) {
      const auto& r = rows[t * nk + k];
      ll[k].push_back(r.loglik);
      ai[k].push_back(r.aic);
      trial_aic[k] = r.aic;
      if (r.kld) {
        kl[k].push_back(r.kld->value);
        trial_kld[k] = r.kld->value;
      }
    }
    ++agg[argmin_index(trial_aic)].argmin_count;
    if (cfg.kld)
      ++agg[argmin_index(trial_kld)].kld_argmin_count;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < nk; ++k) {
    auto& a = agg[k];
    a.K = cfg.K_list[k];
    a.mean_loglik = trials ? mean_of(ll[k]) : nan;
    a.sd_loglik = sd_of(ll[k]);
    a.mean_aic = trials ? mean_of(ai[k]) : nan;
    a.sd_aic = sd_of(ai[k]);
    a.mean_kld = kl[k].empty() ? nan : mean_of(kl[k]);
    a.sd_kld = kl[k].empty() ? nan : sd_of(kl[k]);
  }
  return agg;
}

int
modal(const std::vector<AggregateRow>& agg, std::size_t AggregateRow::*count)
{
  if (agg.empty())
    return -1;
  auto best = agg.begin();
  for (auto it = agg.begin(); it != agg.end(); ++it)
    if ((*it).*count > (*best).*count)
      best = it;
  return best->K;
}

int
mean_argmin(const std::vector<AggregateRow>& agg, double AggregateRow::*field)
{
  int best = -1;
  double value = std::numeric_limits<double>::infinity();
  for (const auto& a : agg)
    if (a.*field < value) {
      value = a.*field;
      best = a.K;
    }
  return best;
}

void
write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path.string());
  body(out);
  if (!out)
    throw IoError("write failed: " + path.string());
}

} // namespace

int
SweepResult::modal_aic_argmin() const
{
  return modal(aggregate, &AggregateRow::argmin_count);
}

int
SweepResult::modal_kld_argmin() const
{
  return modal(aggregate, &AggregateRow::kld_argmin_count);
}

int
SweepResult::mean_aic_argmin() const
{
  return mean_argmin(aggregate, &AggregateRow::mean_aic);
}

int
SweepResult::mean_kld_argmin() const
{
  return mean_argmin(aggregate, &AggregateRow::mean_kld);
}

Estimate
model_log_partition(const PairwiseEnergy& model, const PartitionOptions& options, std::uint64_t seed)
{
  const std::size_t n = model.size();
  const Interval iv = model.interval();
  if (const auto* learned = dynamic_cast<const LearnedModel*>(&model); learned && learned->order() == 0) {
    // constant energy: Z = exp(-Psi) chi^n
    std::vector<double> x(n, 0.5 * (iv.lower + iv.upper));
    return { -model.energy(x) + static_cast<double>(n) * std::log(iv.width()), 0.0 };
  }
  if (options.exact_tree && model.graph().is_chain()) {
    const auto field = discretize(model, options.grid);
    return { chain_marginals_exact(field).log_partition, 0.0 };
  }
  return mc_log_partition(model, options.M, seed);
}

SweepResult
run_sweep(const ExperimentConfig& cfg, bool write_files)
{
  cfg.validate();
  std::vector<TrialOutcome> outcomes(cfg.trials);
  std::mutex log_mutex;
  parallel_for(
    cfg.trials,
    [&](std::size_t t) {
      try {
        outcomes[t] = run_trial(cfg, t);
      } catch (const std::exception& e) {
        outcomes[t] = TrialOutcome{ {}, false, e.what() };
        std::lock_guard lock(log_mutex);
        fmt::print(stderr, "trial {} aborted: {}\n", t, e.what());
      }
    },
    cfg.threads);

  SweepResult result;
  for (auto& o : outcomes) {
    if (!o.ok) {
      ++result.failed_trials;
      continue;
    }
    ++result.completed_trials;
    for (auto& r : o.rows)
      result.rows.push_back(r);
  }
  result.aggregate = aggregate(cfg, result.rows, result.completed_trials);

  if (write_files) {
    std::filesystem::create_directories(cfg.output);
    write_file(cfg.output / "trials.csv", [&](std::ostream& out) { write_trials_csv(out, result.rows); });
    write_file(cfg.output / "aggregate.csv", [&](std::ostream& out) { write_aggregate_csv(out, result.aggregate); });
  }
  return result;
}

namespace {

void
trial_line(std::ostream& out, const TrialRow& r)
{
  const double nan = std::numeric_limits<double>::quiet_NaN();
  fmt::print(out, "{},{},{},{},{},{},{},{},{},{}\n", r.trial, r.K, num(r.loglik), num(r.loglik_se), num(r.aic),
             num(r.kld ? r.kld->value : nan), num(r.kld ? r.kld->std_error : nan), num(r.log_partition.value),
             num(r.log_partition.std_error), r.seed);
}

constexpr const char* trial_header = "trial,K,loglik,loglik_se,aic,kld,kld_se,lnZ,lnZ_se,seed\n";

} // namespace

void
write_trials_csv(std::ostream& out, const std::vector<TrialRow>& rows)
{
  out << trial_header;
  for (const auto& r : rows)
    trial_line(out, r);
}

void
write_score_csv(std::ostream& out, const TrialRow& row)
{
  out << trial_header;
  trial_line(out, row);
}

void
write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows)
{
  out << "K,mean_loglik,sd_loglik,mean_aic,sd_aic,mean_kld,sd_kld,argmin_count\n";
  for (const auto& a : rows)
    fmt::print(out, "{},{},{},{},{},{},{},{}\n", a.K, num(a.mean_loglik), num(a.sd_loglik), num(a.mean_aic),
               num(a.sd_aic), num(a.mean_kld), num(a.sd_kld), a.argmin_count);
}

void
write_coefficients_csv(std::ostream& out, const CoefficientSet& coeffs)
{
  out << "term,a,b,s,t,value\n";
  for (std::size_t i = 0; i < coeffs.H.size(); ++i)
    for (Eigen::Index s = 0; s < coeffs.H[i].size(); ++s)
      fmt::print(out, "H,{},,{},,{:.17g}\n", i, s + 1, coeffs.H[i][s]);
  for (std::size_t e = 0; e < coeffs.J.size(); ++e) {
    const auto& edge = coeffs.graph.edge(e);
    for (Eigen::Index s = 0; s < coeffs.J[e].rows(); ++s)
      for (Eigen::Index t = 0; t < coeffs.J[e].cols(); ++t)
        fmt::print(out, "J,{},{},{},{},{:.17g}\n", edge.u, edge.v, s + 1, t + 1, coeffs.J[e](s, t));
  }
}

} // namespace cmrf
