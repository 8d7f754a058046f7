#include "tailselect/sample_store.hpp"

#include <algorithm>
#include <stdexcept>

namespace tailselect {

SampleStore::SampleStore(int num_alternatives) {
  if (num_alternatives < 1)
    throw std::invalid_argument("SampleStore: need at least one alternative");
  cols_.resize(static_cast<std::size_t>(num_alternatives));
}

void SampleStore::check_index(int i) const {
  if (i < 0 || i >= num_alternatives())
    throw std::invalid_argument("SampleStore: alternative index out of range");
}

void SampleStore::add(int i, double value) {
  check_index(i);
  cols_[i].values.push_back(value);
}

long SampleStore::count(int i) const {
  check_index(i);
  return static_cast<long>(cols_[i].values.size());
}

long SampleStore::total_count() const {
  long t = 0;
  for (const auto& c : cols_) t += static_cast<long>(c.values.size());
  return t;
}

const std::vector<double>& SampleStore::sorted(int i) const {
  check_index(i);
  Column& c = cols_[i];
  if (c.sorted_prefix < c.values.size()) {
    auto mid = c.values.begin() + static_cast<std::ptrdiff_t>(c.sorted_prefix);
    std::sort(mid, c.values.end());
    std::inplace_merge(c.values.begin(), mid, c.values.end());
    c.sorted_prefix = c.values.size();
  }
  return c.values;
}

double SampleStore::order_statistic(int i, long r) const {
  const auto& v = sorted(i);
  if (r < 1 || r > static_cast<long>(v.size()))
    throw std::invalid_argument("SampleStore: order statistic rank out of range");
  return v[v.size() - static_cast<std::size_t>(r)];
}

double SampleStore::kth_smallest(int i, long r) const {
  const auto& v = sorted(i);
  if (r < 1 || r > static_cast<long>(v.size()))
    throw std::invalid_argument("SampleStore: order statistic rank out of range");
  return v[static_cast<std::size_t>(r - 1)];
}

const std::vector<double>& SampleStore::sorted_values(int i) const {
  return sorted(i);
}

}  // namespace tailselect
