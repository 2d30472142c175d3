#include "cmrf/core/dataset.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path work = testing::scratch_dir("cli");

// Runs the tool inside the scratch directory; returns the exit code.
int
run(const std::string& args, const std::string& env = "")
{
  std::string cmd = "cd '" + work.string() + "' && " + env + " '" CMRF_CLI "' " + args + " > out.txt 2> err.txt";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string
slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string>
lines(const fs::path& p)
{
  std::vector<std::string> out;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line))
    out.push_back(line);
  return out;
}

std::vector<std::string>
split(const std::string& s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string f;
  while (std::getline(ss, f, ','))
    out.push_back(f);
  return out;
}

const char* fast = "--burn_in 200 --thinning 2 --M 2000 --kld_samples 500";

} // namespace

TEST_CASE("sample writes a dataset")
{
  REQUIRE(run(std::string("sample --N 50 --n 4 --seed 3 -o s.csv ") + fast) == 0);
  auto d = cmrf::load_dataset(work / "s.csv", { 0.0, 1.0 });
  CHECK(d.size() == 50);
  CHECK(d.dims() == 4);
  REQUIRE(run(std::string("sample --N 50 --n 4 --seed 3 -o s2.csv ") + fast) == 0);
  CHECK(slurp(work / "s.csv") == slurp(work / "s2.csv"));
}

TEST_CASE("missing input files exit with code 2")
{
  CHECK(run("fit -d does_not_exist.csv -K 1") == 2);
  CHECK(slurp(work / "err.txt").find("does_not_exist.csv") != std::string::npos);
  CHECK(run("score -m no_model.txt -d x.csv") == 2);
  CHECK(slurp(work / "err.txt").find("no_model.txt") != std::string::npos);
  CHECK(run("sweep --config no_config.ini") == 2);
  CHECK(slurp(work / "err.txt").find("no_config.ini") != std::string::npos);
}

TEST_CASE("invalid settings are rejected")
{
  CHECK(run("sweep --trials 0") == 3);
  CHECK(run("sweep --K_list 0..20") == 3);
  CHECK(run("sweep --kind ring") == 3);
  CHECK(run("nonsense") != 0);
  CHECK(run("") != 0);
}

TEST_CASE("fit on uniform data recovers near-zero coefficients")
{
  auto data = testing::uniform_dataset(9, 10000, { 0.0, 1.0 }, 77);
  cmrf::save_dataset(data, work / "uniform.csv");
  REQUIRE(run(std::string("fit -d uniform.csv -K 1 -m u.model -s u.csv -c u_coef.csv ") + fast) == 0);
  auto coef = lines(work / "u_coef.csv");
  REQUIRE(coef.size() == 1 + 9 + 8);
  double worst = 0.0;
  for (std::size_t k = 1; k < coef.size(); ++k)
    worst = std::max(worst, std::abs(std::stod(split(coef[k]).back())));
  CHECK(worst <= 0.05);

  auto score = lines(work / "u.csv");
  REQUIRE(score.size() == 2);
  CHECK(score[0] == "trial,K,loglik,loglik_se,aic,kld,kld_se,lnZ,lnZ_se,seed");
  CHECK(split(score[1])[1] == "1");
  CHECK(fs::exists(work / "u.model"));
}

TEST_CASE("order zero scores zero log-likelihood")
{
  auto data = testing::uniform_dataset(9, 200, { 0.0, 1.0 }, 5);
  cmrf::save_dataset(data, work / "small.csv");
  REQUIRE(run(std::string("fit -d small.csv -K 0 -m z.model -s z.csv ") + fast) == 0);
  auto row = split(lines(work / "z.csv").at(1));
  CHECK(std::abs(std::stod(row[2])) <= 1e-12);
  CHECK(std::abs(std::stod(row[4])) <= 1e-12);
}

TEST_CASE("score and kld read a saved model")
{
  REQUIRE(run(std::string("sample --N 300 --seed 8 -o train.csv ") + fast) == 0);
  REQUIRE(run(std::string("fit -d train.csv -K 2 -m m2.model -s fit.csv ") + fast) == 0);
  REQUIRE(run(std::string("score -m m2.model -d train.csv -s score.csv ") + fast) == 0);
  CHECK(slurp(work / "fit.csv") == slurp(work / "score.csv"));
  REQUIRE(run(std::string("kld -m m2.model -o kld.csv ") + fast) == 0);
  auto k = lines(work / "kld.csv");
  REQUIRE(k.size() == 2);
  CHECK(k[0] == "K,kld,kld_se,lnZ_gen,lnZ_gen_se,lnZ,lnZ_se,seed");
  CHECK(std::stod(split(k[1])[1]) > 0.0);
  // model shape must match the configured graph
  CHECK(run("score -m m2.model -d train.csv --kind grid") == 3);
}

TEST_CASE("sweep from a configuration file is reproducible")
{
  std::ofstream(work / "exp.ini") << "[graph]\nkind = chain\nn = 5\n"
                                     "[model]\nK_list = 0..2\n"
                                     "[data]\nN = 200\n"
                                     "[sampler]\nburn_in = 200\nthinning = 2\n"
                                     "[eval]\nM = 2000\nkld_samples = 300\n"
                                     "[experiment]\ntrials = 2\nseed = 4\n";
  REQUIRE(run("sweep --config exp.ini --output r1") == 0);
  REQUIRE(run("sweep --config exp.ini --output r2") == 0);
  REQUIRE(run("sweep --config exp.ini --threads 2", "CMRF_OUTPUT_DIR=r3") == 0);
  for (const char* name : { "trials.csv", "aggregate.csv" }) {
    const auto ref = slurp(work / "r1" / name);
    CHECK_FALSE(ref.empty());
    CHECK(slurp(work / "r2" / name) == ref);
    CHECK(slurp(work / "r3" / name) == ref);
  }
  CHECK(lines(work / "r1" / "trials.csv").size() == 1 + 2 * 3);
  // command-line flags override the file
  REQUIRE(run("sweep --config exp.ini --output r4 --trials 1") == 0);
  CHECK(lines(work / "r4" / "trials.csv").size() == 1 + 3);
}
