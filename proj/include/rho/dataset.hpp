#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rho {

// n independent observations. Regression data carry the design points in w
// (same length as x, which then holds the responses).
struct Dataset {
  std::vector<double> x;
  std::vector<double> w;

  Dataset() = default;
  explicit Dataset(std::vector<double> xs) : x(std::move(xs)) {}
  Dataset(std::vector<double> ws, std::vector<double> ys) : x(std::move(ys)), w(std::move(ws)) {
    if (w.size() != x.size()) throw std::invalid_argument("Dataset: design and response lengths differ");
  }

  std::size_t size() const { return x.size(); }
  bool empty() const { return x.empty(); }
  bool paired() const { return !w.empty(); }
};

}  // namespace rho
