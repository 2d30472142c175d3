#include "cmrf/core/dataset.hpp"

#include "cmrf/core/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>

namespace cmrf {

Dataset::Dataset(std::size_t n, std::vector<double> values, Interval interval)
  : n_(n)
  , values_(std::move(values))
  , interval_(interval)
{
  if (n_ == 0)
    throw ValidationError("dataset needs n >= 1 variables");
  if (values_.empty())
    throw ValidationError("dataset is empty (N >= 1 violated)");
  if (values_.size() % n_ != 0)
    throw ValidationError("value count is not a multiple of n");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!interval_.contains(values_[k]))
      throw ValidationError("value " + std::to_string(values_[k]) + " at row " +
                            std::to_string(k / n_ + 1) + ", column " + std::to_string(k % n_ + 1) +
                            " lies outside [" + std::to_string(interval_.lower) + ", " +
                            std::to_string(interval_.upper) + "]");
  }
}

namespace {

std::string_view
trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

} // namespace

Dataset
load_dataset(const std::filesystem::path& path, Interval interval)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open dataset file: " + path.string());

  std::vector<double> values;
  std::size_t n = 0;
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#')
      continue;
    row.clear();
    std::size_t pos = 0;
    while (pos <= body.size()) {
      auto comma = body.find(',', pos);
      if (comma == std::string_view::npos)
        comma = body.size();
      const auto field = trim(body.substr(pos, comma - pos));
      double v = 0.0;
      const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || end != field.data() + field.size())
        throw ParseError(lineno, "cannot parse '" + std::string(field) + "' as a number");
      row.push_back(v);
      pos = comma + 1;
    }
    if (n == 0)
      n = row.size();
    else if (row.size() != n)
      throw ParseError(lineno, "expected " + std::to_string(n) + " values, found " +
                                 std::to_string(row.size()));
    for (std::size_t i = 0; i < row.size(); ++i)
      if (!interval.contains(row[i]))
        throw ValidationError("value " + std::to_string(row[i]) + " on line " +
                              std::to_string(lineno) + ", column " + std::to_string(i + 1) +
                              " lies outside [" + std::to_string(interval.lower) + ", " +
                              std::to_string(interval.upper) + "]");
    values.insert(values.end(), row.begin(), row.end());
  }
  if (values.empty())
    throw ValidationError("dataset is empty (N >= 1 violated): " + path.string());
  return Dataset(n, std::move(values), interval);
}

void
save_dataset(const Dataset& data, const std::filesystem::path& path)
{
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write dataset file: " + path.string());
  char buf[32];
  for (std::size_t mu = 0; mu < data.size(); ++mu) {
    for (std::size_t i = 0; i < data.dims(); ++i) {
      const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, data(mu, i), std::chars_format::general, 17);
      if (i > 0)
        out << ',';
      out.write(buf, end - buf);
    }
    out << '\n';
  }
}

} // namespace cmrf
