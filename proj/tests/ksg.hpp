#pragma once

/**
 * Kraskov-Stoegbauer-Grassberger nearest-neighbor mutual information
 * estimator for scalar pairs (estimator 1), used as an independent
 * Monte-Carlo oracle for the Gaussian closed form. Joint neighbors use
 * the max-norm; marginal counts are strict and exclude the point itself.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <vector>

namespace oracles {

inline double ksg_mutual_information(const std::vector<double>& xs, const std::vector<double>& ys,
                                     int k) {
  const std::size_t n = xs.size();
  if (ys.size() != n || n < static_cast<std::size_t>(k) + 1) {
    throw std::invalid_argument("ksg: need matching samples and n > k");
  }

  // Digamma of positive integers via harmonic numbers: psi(m) = H_{m-1} - gamma.
  std::vector<double> digamma(n + 2, 0.0);
  constexpr double kEulerGamma = 0.57721566490153286;
  digamma[1] = -kEulerGamma;
  for (std::size_t m = 2; m < digamma.size(); ++m) {
    digamma[m] = digamma[m - 1] + 1.0 / static_cast<double>(m - 1);
  }

  // Points ordered by x for the expanding-window joint k-NN search.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> x_sorted(n);
  std::vector<double> y_by_rank(n);
  for (std::size_t r = 0; r < n; ++r) {
    x_sorted[r] = xs[order[r]];
    y_by_rank[r] = ys[order[r]];
  }
  std::vector<double> y_sorted = ys;
  std::sort(y_sorted.begin(), y_sorted.end());

  auto strict_count = [](const std::vector<double>& sorted, double center, double radius) {
    // Number of values v with |v - center| < radius, minus the point itself.
    const auto lo = std::upper_bound(sorted.begin(), sorted.end(), center - radius);
    const auto hi = std::lower_bound(sorted.begin(), sorted.end(), center + radius);
    return static_cast<long>(hi - lo) - 1;
  };

  double mean_psi = 0.0;
  for (std::size_t rank = 0; rank < n; ++rank) {
    // k-th smallest max-norm distance, expanding outward in x-order: any
    // candidate further in x than the current k-th best cannot improve.
    std::priority_queue<double> best;
    long left = static_cast<long>(rank) - 1;
    std::size_t right = rank + 1;
    while (true) {
      const bool left_ok = left >= 0;
      const bool right_ok = right < n;
      if (!left_ok && !right_ok) break;
      double dx_left = left_ok ? x_sorted[rank] - x_sorted[static_cast<std::size_t>(left)]
                               : std::numeric_limits<double>::infinity();
      double dx_right = right_ok ? x_sorted[right] - x_sorted[rank]
                                 : std::numeric_limits<double>::infinity();
      const double next_dx = std::min(dx_left, dx_right);
      if (best.size() == static_cast<std::size_t>(k) && next_dx >= best.top()) break;
      std::size_t candidate = 0;
      if (dx_left <= dx_right) {
        candidate = static_cast<std::size_t>(left);
        --left;
      } else {
        candidate = right;
        ++right;
      }
      const double distance =
          std::max(std::abs(x_sorted[rank] - x_sorted[candidate]),
                   std::abs(y_by_rank[rank] - y_by_rank[candidate]));
      if (best.size() < static_cast<std::size_t>(k)) {
        best.push(distance);
      } else if (distance < best.top()) {
        best.pop();
        best.push(distance);
      }
    }
    const double epsilon = best.top();
    const long nx = strict_count(x_sorted, x_sorted[rank], epsilon);
    const long ny = strict_count(y_sorted, y_by_rank[rank], epsilon);
    mean_psi += digamma[static_cast<std::size_t>(nx) + 1] +
                digamma[static_cast<std::size_t>(ny) + 1];
  }
  mean_psi /= static_cast<double>(n);

  return digamma[static_cast<std::size_t>(k)] + digamma[n] - mean_psi;
}

}  // namespace oracles
