#pragma once

#include "cmrf/core/interval.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace cmrf {

//! N points of n variables, every value inside a common interval.
class Dataset
{
public:
  //! Throws ValidationError when a value falls outside the interval or
  //! when N or n is zero.
  Dataset(std::size_t n, std::vector<double> values, Interval interval);

  std::size_t dims() const { return n_; }
  std::size_t size() const { return values_.size() / n_; }
  Interval interval() const { return interval_; }
  std::span<const double> point(std::size_t mu) const { return { values_.data() + mu * n_, n_ }; }
  double operator()(std::size_t mu, std::size_t i) const { return values_[mu * n_ + i]; }
  const std::vector<double>& values() const { return values_; }

private:
  std::size_t n_;
  std::vector<double> values_;
  Interval interval_;
};

Dataset load_dataset(const std::filesystem::path& path, Interval interval);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

} // namespace cmrf
