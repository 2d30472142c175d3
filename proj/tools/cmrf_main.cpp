// cmrf: sample, fit, score and sweep continuous pairwise MRFs.

#include "cmrf/core/errors.hpp"
#include "cmrf/core/random.hpp"
#include "cmrf/experiment/config.hpp"
#include "cmrf/experiment/sweep.hpp"
#include "cmrf/learn/coefficients.hpp"
#include "cmrf/sample/sampler.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <fstream>
#include <map>
#include <optional>
#include <string>

namespace {

using namespace cmrf;

struct Paths
{
  std::string data;
  std::string model;
  std::string out;
  std::string score_out;
  std::string coefficients;
  std::optional<int> K;
};

std::ofstream
open_output(const std::filesystem::path& path)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path.string());
  return out;
}

std::filesystem::path
or_default(const std::string& given, const ExperimentConfig& cfg, const char* name)
{
  return given.empty() ? cfg.output / name : std::filesystem::path(given);
}

PartitionOptions
partition_options(const ExperimentConfig& cfg)
{
  return { cfg.M, cfg.exact_tree_partition, cfg.partition_grid };
}

void
check_model_shape(const LearnedModel& model, const ExperimentConfig& cfg)
{
  if (model.graph() != cfg.graph())
    throw ValidationError("model graph does not match the configured graph");
  if (model.interval() != cfg.interval())
    throw ValidationError("model interval does not match the configured interval");
}

TrialRow
score_row(const LearnedModel& model, const Dataset& data, const ExperimentConfig& cfg)
{
  const auto& graph = model.graph();
  const auto lnz = model_log_partition(model, partition_options(cfg), derive_seed(cfg.seed, 2));
  TrialRow row;
  row.K = model.order();
  row.loglik = log_likelihood(model, data, lnz.value);
  row.loglik_se = lnz.std_error / static_cast<double>(graph.size());
  row.aic = aic(row.loglik, graph.size(), data.size(), model.order(), graph.edge_count());
  row.log_partition = lnz;
  row.seed = cfg.seed;
  if (cfg.kld) {
    const auto gen = generative_energy(graph, model.interval(), cfg.negate_generative_energy);
    auto sc = cfg.sampler;
    sc.seed = derive_seed(cfg.seed, 3);
    const auto samples = mh_sample(gen, cfg.kld_samples, sc);
    const auto gen_lnz = model_log_partition(gen, partition_options(cfg), derive_seed(cfg.seed, 4));
    row.kld = kld_from_samples(gen, model, samples, gen_lnz, lnz);
  }
  return row;
}

void
cmd_sample(const ExperimentConfig& cfg, const Paths& p)
{
  const auto gen = generative_energy(cfg.graph(), cfg.interval(), cfg.negate_generative_energy);
  auto sc = cfg.sampler;
  sc.seed = cfg.seed;
  const auto data = mh_sample(gen, cfg.N, sc);
  const auto path = or_default(p.out, cfg, "samples.csv");
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  save_dataset(data, path);
  fmt::print("wrote {} samples to {}\n", data.size(), path.string());
}

void
cmd_fit(const ExperimentConfig& cfg, const Paths& p)
{
  const int K = p.K ? *p.K : cfg.K_list.front();
  if (K < 0 || K > cfg.max_order)
    throw ValidationError(fmt::format("K = {} outside 0..{}", K, cfg.max_order));
  const auto data = load_dataset(p.data, cfg.interval());
  const auto model = fit(data, cfg.graph(), cfg.basis_system(), K, cfg.epsilon);

  const auto model_path = or_default(p.model, cfg, "model.txt");
  if (model_path.has_parent_path())
    std::filesystem::create_directories(model_path.parent_path());
  save_model(model, model_path);

  const auto row = score_row(model, data, cfg);
  auto score = open_output(or_default(p.score_out, cfg, "score.csv"));
  write_score_csv(score, row);

  if (!p.coefficients.empty()) {
    auto out = open_output(p.coefficients);
    write_coefficients_csv(out, recover_coefficients(model));
  }
  fmt::print("K={} loglik={:.6g} aic={:.6g}{}\n", K, row.loglik, row.aic,
             model.cutoff_active() ? " (cutoff active)" : "");
}

void
cmd_score(const ExperimentConfig& cfg, const Paths& p)
{
  const auto model = load_model(p.model);
  check_model_shape(model, cfg);
  const auto data = load_dataset(p.data, model.interval());
  const auto row = score_row(model, data, cfg);
  auto out = open_output(or_default(p.score_out, cfg, "score.csv"));
  write_score_csv(out, row);
  fmt::print("K={} loglik={:.6g} aic={:.6g}\n", row.K, row.loglik, row.aic);
}

void
cmd_kld(ExperimentConfig cfg, const Paths& p)
{
  const auto model = load_model(p.model);
  check_model_shape(model, cfg);
  cfg.kld = true;
  const auto& graph = model.graph();
  const auto gen = generative_energy(graph, model.interval(), cfg.negate_generative_energy);
  auto sc = cfg.sampler;
  sc.seed = derive_seed(cfg.seed, 3);
  const auto samples = mh_sample(gen, cfg.kld_samples, sc);
  const auto gen_lnz = model_log_partition(gen, partition_options(cfg), derive_seed(cfg.seed, 4));
  const auto lnz = model_log_partition(model, partition_options(cfg), derive_seed(cfg.seed, 2));
  const auto kld = kld_from_samples(gen, model, samples, gen_lnz, lnz);

  auto out = open_output(or_default(p.out, cfg, "kld.csv"));
  out << "K,kld,kld_se,lnZ_gen,lnZ_gen_se,lnZ,lnZ_se,seed\n";
  out << fmt::format("{},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{}\n", model.order(), kld.value,
                     kld.std_error, gen_lnz.value, gen_lnz.std_error, lnz.value, lnz.std_error, cfg.seed);
  fmt::print("K={} kld={:.6g} +- {:.2g}\n", model.order(), kld.value, kld.std_error);
}

void
cmd_sweep(const ExperimentConfig& cfg)
{
  const auto result = run_sweep(cfg);
  for (const auto& a : result.aggregate)
    fmt::print("K={} loglik={:.6g} aic={:.6g} kld={:.6g} argmin_count={}\n", a.K, a.mean_loglik, a.mean_aic,
               a.mean_kld, a.argmin_count);
  fmt::print("modal AIC argmin K={}; {} trials done, {} failed; results in {}\n", result.modal_aic_argmin(),
             result.completed_trials, result.failed_trials, cfg.output.string());
  if (result.completed_trials == 0)
    throw NumericError("every trial failed");
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Learn and evaluate continuous pairwise Markov random fields" };
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "INI-style configuration file");
  std::map<std::string, std::string> overrides;
  for (const auto& key : cmrf::config_keys()) {
    std::string name(key.key);
    app.add_option_function<std::string>(
         "--" + name, [&overrides, name](const std::string& v) { overrides[name] = v; },
         fmt::format("[{}] {}", key.section, key.help))
      ->group(fmt::format("{} settings", key.section));
  }

  Paths paths;
  auto* sample = app.add_subcommand("sample", "Draw a dataset from the generative model");
  sample->add_option("-o,--out", paths.out, "dataset CSV (default <output>/samples.csv)");

  auto* fit = app.add_subcommand("fit", "Fit a model to a dataset and score it");
  fit->add_option("-d,--data", paths.data, "dataset CSV")->required();
  fit->add_option("-K,--order", paths.K, "truncation order (default: first of K_list)");
  fit->add_option("-m,--model-out", paths.model, "model file (default <output>/model.txt)");
  fit->add_option("-s,--score-out", paths.score_out, "score CSV (default <output>/score.csv)");
  fit->add_option("-c,--coefficients", paths.coefficients, "write the recovered H and J as CSV");

  auto* score = app.add_subcommand("score", "Score a saved model on a dataset");
  score->add_option("-m,--model", paths.model, "model file")->required();
  score->add_option("-d,--data", paths.data, "dataset CSV")->required();
  score->add_option("-s,--score-out", paths.score_out, "score CSV (default <output>/score.csv)");

  auto* kld = app.add_subcommand("kld", "KL divergence from the generative model to a saved model");
  kld->add_option("-m,--model", paths.model, "model file")->required();
  kld->add_option("-o,--out", paths.out, "CSV (default <output>/kld.csv)");

  auto* sweep = app.add_subcommand("sweep", "Repeat sample, fit and score over trials and orders");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    cmrf::ExperimentConfig cfg;
    if (!config_path.empty())
      cmrf::apply_config_file(cfg, config_path);
    for (const auto& [key, value] : overrides)
      cmrf::set_config_value(cfg, key, value);
    cfg.validate();

    if (*sample)
      cmd_sample(cfg, paths);
    else if (*fit)
      cmd_fit(cfg, paths);
    else if (*score)
      cmd_score(cfg, paths);
    else if (*kld)
      cmd_kld(cfg, paths);
    else if (*sweep)
      cmd_sweep(cfg);
  } catch (const cmrf::IoError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const cmrf::ParseError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 3;
  } catch (const cmrf::ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 3;
  } catch (const cmrf::NumericError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
