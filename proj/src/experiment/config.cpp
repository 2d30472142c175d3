#include "cmrf/experiment/config.hpp"

#include "cmrf/core/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace cmrf {

namespace {

std::string
trimmed(std::string_view s)
{
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos)
    return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

[[noreturn]] void
bad_value(std::string_view key, std::string_view value, std::string_view expected)
{
  throw std::invalid_argument("invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected " +
                              std::string(expected) + ")");
}

template<class T>
T
parse_number(std::string_view key, std::string_view text, std::string_view expected)
{
  auto s = trimmed(text);
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    bad_value(key, text, expected);
  return value;
}

double
parse_double(std::string_view key, std::string_view text)
{
  return parse_number<double>(key, text, "a number");
}

std::size_t
parse_count(std::string_view key, std::string_view text)
{
  return parse_number<std::size_t>(key, text, "a non-negative integer");
}

bool
parse_bool(std::string_view key, std::string_view text)
{
  auto s = trimmed(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on")
    return true;
  if (s == "false" || s == "0" || s == "no" || s == "off")
    return false;
  bad_value(key, text, "true or false");
}

// "0,1,2", "0 1 2", "[0, 1, 2]" or a range "0..6"
std::vector<int>
parse_orders(std::string_view key, std::string_view text)
{
  auto s = trimmed(text);
  if (!s.empty() && s.front() == '[' && s.back() == ']')
    s = trimmed(std::string_view(s).substr(1, s.size() - 2));
  std::vector<int> out;
  if (auto dots = s.find(".."); dots != std::string::npos) {
    int lo = parse_number<int>(key, std::string_view(s).substr(0, dots), "a range a..b");
    int hi = parse_number<int>(key, std::string_view(s).substr(dots + 2), "a range a..b");
    if (hi < lo)
      bad_value(key, text, "a range a..b with a <= b");
    for (int k = lo; k <= hi; ++k)
      out.push_back(k);
    return out;
  }
  std::replace(s.begin(), s.end(), ',', ' ');
  std::size_t pos = 0;
  while ((pos = s.find_first_not_of(' ', pos)) != std::string::npos) {
    auto end = s.find(' ', pos);
    out.push_back(parse_number<int>(key, std::string_view(s).substr(pos, end - pos), "a list of orders"));
    pos = end;
  }
  if (out.empty())
    bad_value(key, text, "a non-empty list of orders");
  return out;
}

GraphKind
parse_graph_kind(std::string_view key, std::string_view text)
{
  auto s = trimmed(text);
  if (s == "chain")
    return GraphKind::chain;
  if (s == "grid")
    return GraphKind::grid;
  bad_value(key, text, "chain or grid");
}

} // namespace

Graph
ExperimentConfig::graph() const
{
  return graph_kind == GraphKind::chain ? build_chain(n) : build_grid(rows, cols);
}

void
ExperimentConfig::validate() const
{
  if (graph_kind == GraphKind::chain && n < 2)
    throw std::invalid_argument("chain needs n >= 2");
  if (graph_kind == GraphKind::grid && (rows < 2 || cols < 2))
    throw std::invalid_argument("grid needs rows, cols >= 2");
  if (!(alpha < beta))
    throw std::invalid_argument("interval needs alpha < beta");
  if (max_order < 1)
    throw std::invalid_argument("max_order must be at least 1");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("epsilon must be positive");
  if (K_list.empty())
    throw std::invalid_argument("K_list is empty");
  for (int K : K_list)
    if (K < 0 || K > max_order)
      throw std::invalid_argument("K = " + std::to_string(K) + " outside 0.." + std::to_string(max_order));
  if (N < 1)
    throw std::invalid_argument("N must be at least 1");
  if (sampler.thinning < 1)
    throw std::invalid_argument("thinning must be at least 1");
  if (M < 100)
    throw std::invalid_argument("M must be at least 100");
  if (kld && kld_samples < 1)
    throw std::invalid_argument("kld_samples must be at least 1");
  if (partition_grid < 8)
    throw std::invalid_argument("partition_grid must be at least 8");
  if (trials < 1)
    throw std::invalid_argument("trials must be at least 1");
}

const std::vector<ConfigKey>&
config_keys()
{
  static const std::vector<ConfigKey> keys{
    { "graph", "kind", "graph family: chain or grid" },
    { "graph", "n", "chain length" },
    { "graph", "rows", "grid rows" },
    { "graph", "cols", "grid columns" },
    { "model", "alpha", "interval lower end" },
    { "model", "beta", "interval upper end" },
    { "model", "basis", "cosine or legendre" },
    { "model", "max_order", "largest basis order available" },
    { "model", "epsilon", "belief cutoff" },
    { "model", "K_list", "truncation orders, e.g. 0..6 or 1,2,4" },
    { "data", "N", "samples per dataset" },
    { "sampler", "burn_in", "burn-in sweeps" },
    { "sampler", "thinning", "sweeps between kept samples" },
    { "sampler", "negate_generative_energy", "flip the sign of the generative energy" },
    { "eval", "M", "Monte Carlo samples for ln Z" },
    { "eval", "kld", "estimate the KL divergence" },
    { "eval", "kld_samples", "generative samples for the KL divergence" },
    { "eval", "exact_tree_partition", "use exact ln Z on chains" },
    { "eval", "partition_grid", "grid size for the exact chain ln Z" },
    { "experiment", "trials", "number of trials" },
    { "experiment", "seed", "base seed" },
    { "experiment", "threads", "worker threads (0: hardware)" },
    { "experiment", "output", "output directory" },
  };
  return keys;
}

void
set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value)
{
  if (key == "kind" || key == "graph.kind")
    cfg.graph_kind = parse_graph_kind(key, value);
  else if (key == "n" || key == "graph.n")
    cfg.n = parse_count(key, value);
  else if (key == "rows" || key == "graph.rows")
    cfg.rows = parse_count(key, value);
  else if (key == "cols" || key == "graph.cols")
    cfg.cols = parse_count(key, value);
  else if (key == "alpha" || key == "model.alpha")
    cfg.alpha = parse_double(key, value);
  else if (key == "beta" || key == "model.beta")
    cfg.beta = parse_double(key, value);
  else if (key == "basis" || key == "model.basis") {
    try {
      cfg.basis = basis_kind_from_string(trimmed(value));
    } catch (const std::invalid_argument&) {
      bad_value(key, value, "cosine or legendre");
    }
  } else if (key == "max_order" || key == "model.max_order")
    cfg.max_order = parse_number<int>(key, value, "an integer");
  else if (key == "epsilon" || key == "model.epsilon")
    cfg.epsilon = parse_double(key, value);
  else if (key == "K_list" || key == "model.K_list")
    cfg.K_list = parse_orders(key, value);
  else if (key == "N" || key == "data.N")
    cfg.N = parse_count(key, value);
  else if (key == "burn_in" || key == "sampler.burn_in")
    cfg.sampler.burn_in = parse_count(key, value);
  else if (key == "thinning" || key == "sampler.thinning")
    cfg.sampler.thinning = parse_count(key, value);
  else if (key == "negate_generative_energy" || key == "sampler.negate_generative_energy")
    cfg.negate_generative_energy = parse_bool(key, value);
  else if (key == "M" || key == "eval.M")
    cfg.M = parse_count(key, value);
  else if (key == "kld" || key == "eval.kld")
    cfg.kld = parse_bool(key, value);
  else if (key == "kld_samples" || key == "eval.kld_samples")
    cfg.kld_samples = parse_count(key, value);
  else if (key == "exact_tree_partition" || key == "eval.exact_tree_partition")
    cfg.exact_tree_partition = parse_bool(key, value);
  else if (key == "partition_grid" || key == "eval.partition_grid")
    cfg.partition_grid = parse_number<int>(key, value, "an integer");
  else if (key == "trials" || key == "experiment.trials")
    cfg.trials = parse_count(key, value);
  else if (key == "seed" || key == "experiment.seed")
    cfg.seed = parse_number<std::uint64_t>(key, value, "a non-negative integer");
  else if (key == "threads" || key == "experiment.threads")
    cfg.threads = parse_number<unsigned>(key, value, "a non-negative integer");
  else if (key == "output" || key == "experiment.output")
    cfg.output = trimmed(value);
  else
    throw std::invalid_argument("unknown configuration key '" + std::string(key) + "'");
}

void
apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open config file: " + path.string());
  CLI::ConfigBase reader;
  reader.arrayBounds('[', ']')->arrayDelimiter(',');
  std::vector<CLI::ConfigItem> items;
  try {
    items = reader.from_config(in);
  } catch (const CLI::Error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--")
      continue;
    std::string value;
    for (const auto& part : item.inputs)
      value += (value.empty() ? "" : ",") + part;
    if (item.parents.empty() || item.parents.front() == "default")
      throw ValidationError(path.string() + ": key '" + item.name + "' outside a section");
    auto qualified = item.fullname();
    auto known = std::any_of(config_keys().begin(), config_keys().end(), [&](const ConfigKey& k) {
      return std::string(k.section) + "." + std::string(k.key) == qualified;
    });
    if (!known)
      throw ValidationError(path.string() + ": unknown key '" + qualified + "'");
    try {
      set_config_value(cfg, qualified, value);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(path.string() + ": " + e.what());
    }
  }
}

std::filesystem::path
default_output_dir()
{
  if (const char* dir = std::getenv("CMRF_OUTPUT_DIR"); dir != nullptr && *dir != '\0')
    return dir;
  return "results";
}

} // namespace cmrf
