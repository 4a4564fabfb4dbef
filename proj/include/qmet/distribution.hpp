#pragma once

// Discrete weighted support on the real line: pointer and spectral
// distributions, and the 1-D Wasserstein 2-deviation between them.

#include <algorithm>
#include <cmath>
#include <vector>

#include "qmet/config.hpp"
#include "qmet/errors.hpp"

namespace qmet {

struct OutcomeDistribution {
  std::vector<double> support;  // sorted ascending
  std::vector<double> weights;  // nonnegative, sum to 1 within tolerance

  OutcomeDistribution() = default;
  OutcomeDistribution(std::vector<double> s, std::vector<double> w,
                      const Tolerances& t = tol())
      : support(std::move(s)), weights(std::move(w)) {
    if (support.size() != weights.size())
      throw ShapeError("OutcomeDistribution: support/weight length mismatch");
    if (support.empty()) throw ValidationError("OutcomeDistribution: empty");
    double sum = 0.0;
    for (size_t i = 0; i < support.size(); ++i) {
      if (i > 0 && support[i] < support[i - 1])
        throw ValidationError("OutcomeDistribution: support not sorted");
      if (weights[i] < -1e-15)
        throw ValidationError("OutcomeDistribution: negative weight");
      sum += weights[i];
    }
    if (std::abs(sum - 1.0) > t.distribution_norm)
      throw ValidationError("OutcomeDistribution: weights sum to " +
                            std::to_string(sum));
    for (auto& w : weights) w /= sum;
  }

  static OutcomeDistribution point_mass(double a) {
    return OutcomeDistribution({a}, {1.0});
  }
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

inline Moments moments(const OutcomeDistribution& d) {
  double m1 = 0.0, m2 = 0.0;
  for (size_t i = 0; i < d.support.size(); ++i) {
    m1 += d.weights[i] * d.support[i];
    m2 += d.weights[i] * d.support[i] * d.support[i];
  }
  return {m1, std::max(0.0, m2 - m1 * m1)};
}

// Wasserstein 2-deviation via the quantile coupling: the two quantile
// functions are step functions, so the integral is a finite sum over the
// merged partition of [0,1].
inline double wasserstein2(const OutcomeDistribution& a,
                           const OutcomeDistribution& b) {
  size_t i = 0, j = 0;
  double ra = a.weights[0], rb = b.weights[0], acc = 0.0;
  while (i < a.support.size() && j < b.support.size()) {
    const double step = std::min(ra, rb);
    const double diff = a.support[i] - b.support[j];
    acc += step * diff * diff;
    ra -= step;
    rb -= step;
    if (ra <= 1e-17) {
      ++i;
      ra = i < a.weights.size() ? a.weights[i] : 0.0;
    }
    if (rb <= 1e-17) {
      ++j;
      rb = j < b.weights.size() ? b.weights[j] : 0.0;
    }
  }
  return std::sqrt(acc);
}

// Merge support points closer than `gap` (degenerate Born weights).
inline OutcomeDistribution merge_close(std::vector<double> support,
                                       std::vector<double> weights, double gap) {
  std::vector<size_t> order(support.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](size_t u, size_t v) { return support[u] < support[v]; });
  std::vector<double> s, w;
  for (size_t k : order) {
    if (!s.empty() && support[k] - s.back() <= gap) {
      // weight-average the merged support point
      const double tw = w.back() + weights[k];
      if (tw > 0) s.back() = (s.back() * w.back() + support[k] * weights[k]) / tw;
      w.back() = tw;
    } else {
      s.push_back(support[k]);
      w.push_back(weights[k]);
    }
  }
  return OutcomeDistribution(std::move(s), std::move(w));
}

}  // namespace qmet
