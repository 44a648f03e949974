#pragma once

#include <vector>

namespace swlme {

/// Gauss-Legendre rule on the reference cell [-1, 1]. Exact for polynomials
/// of degree 2n-1; nodes and weights are verified at construction.
class GaussRule {
 public:
  explicit GaussRule(int n);

  int size() const { return static_cast<int>(nodes_.size()); }
  double node(int q) const { return nodes_[q]; }
  double weight(int q) const { return weights_[q]; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace swlme
