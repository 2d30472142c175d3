#pragma once

#include "cmrf/basis/basis.hpp"
#include "cmrf/core/graph.hpp"
#include "cmrf/core/interval.hpp"
#include "cmrf/sample/sampler.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cmrf {

//! Default output directory: $CMRF_OUTPUT_DIR when set, else "results".
std::filesystem::path default_output_dir();

enum class GraphKind
{
  chain,
  grid,
};

//! Settings of a K sweep. Defaults reproduce the chain experiment: n = 9 on
//! [0, 1], cosine basis, eps = 1e-4, M = 20000, 100 trials.
struct ExperimentConfig
{
  // [graph]
  GraphKind graph_kind{ GraphKind::chain };
  std::size_t n{ 9 };
  std::size_t rows{ 3 };
  std::size_t cols{ 3 };
  // [model]
  double alpha{ 0.0 };
  double beta{ 1.0 };
  BasisKind basis{ BasisKind::cosine };
  int max_order{ BasisSystem::default_max_order };
  double epsilon{ 1e-4 };
  std::vector<int> K_list{ 0, 1, 2, 3, 4, 5, 6 };
  // [data]
  std::size_t N{ 1000 };
  // [sampler]
  SamplerConfig sampler{};
  bool negate_generative_energy{ false };
  // [eval]
  std::size_t M{ 20000 };
  bool kld{ true };
  std::size_t kld_samples{ 20000 };
  bool exact_tree_partition{ true };
  int partition_grid{ 256 };
  // [experiment]
  std::size_t trials{ 100 };
  std::uint64_t seed{ 1 };
  unsigned threads{ 0 };
  std::filesystem::path output{ default_output_dir() };

  Graph graph() const;
  Interval interval() const { return { alpha, beta }; }
  BasisSystem basis_system() const { return BasisSystem(basis, interval(), max_order); }

  //! Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

//! A recognised configuration key: `section` is the file section, `key` the
//! name used both in the file and as the command-line flag (--key).
struct ConfigKey
{
  std::string_view section;
  std::string_view key;
  std::string_view help;
};

const std::vector<ConfigKey>& config_keys();

//! Sets one key from its textual value. Throws std::invalid_argument for an
//! unknown key or an unparsable value.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

//! Reads `key = value` lines grouped under [section] headers; '#' starts a
//! comment. Keys must belong to the section they appear in.
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

} // namespace cmrf
