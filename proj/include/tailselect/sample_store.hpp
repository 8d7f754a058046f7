#pragma once

#include <vector>

namespace tailselect {

// Per-alternative loss samples kept in sorted order. Inserts append and mark
// the column dirty; the first query after a batch of inserts sorts the new
// tail and merges it in, so a batch of m inserts plus queries costs
// O(m log m + n) rather than O(m log n) tree operations.
class SampleStore {
 public:
  explicit SampleStore(int num_alternatives);

  int num_alternatives() const { return static_cast<int>(cols_.size()); }
  void add(int i, double value);
  long count(int i) const;
  long total_count() const;

  // r-th largest stored value, 1-based; monotone nonincreasing in r.
  double order_statistic(int i, long r) const;
  // r-th smallest stored value, 1-based.
  double kth_smallest(int i, long r) const;
  // Ascending view of all values for alternative i.
  const std::vector<double>& sorted_values(int i) const;

 private:
  struct Column {
    std::vector<double> values;   // sorted ascending up to sorted_prefix
    std::size_t sorted_prefix = 0;
  };
  const std::vector<double>& sorted(int i) const;
  void check_index(int i) const;

  mutable std::vector<Column> cols_;
};

}  // namespace tailselect
