#pragma once

// Classical transition-kernel measurement model on a discrete phase-space
// grid: pointwise RMS error/disturbance per grid point, their suprema, and
// the variational (measure-supremum) forms. The two definitions agree
// exactly because point masses attain the supremum and mixtures never exceed
// it; the tests drive that equivalence numerically.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qmet/errors.hpp"

namespace qmet {

struct PhaseSpaceGrid {
  std::vector<double> x_nodes;
  std::vector<double> p_nodes;

  PhaseSpaceGrid(std::vector<double> xs, std::vector<double> ps)
      : x_nodes(std::move(xs)), p_nodes(std::move(ps)) {
    check(x_nodes);
    check(p_nodes);
  }
  int points() const {
    return static_cast<int>(x_nodes.size() * p_nodes.size());
  }
  int index(int ix, int ip) const {
    return ix * static_cast<int>(p_nodes.size()) + ip;
  }

 private:
  static void check(const std::vector<double>& v) {
    if (v.size() < 2)
      throw ValidationError("PhaseSpaceGrid: at least 2 nodes per axis");
    for (size_t i = 1; i < v.size(); ++i)
      if (v[i] <= v[i - 1])
        throw ValidationError("PhaseSpaceGrid: nodes must increase strictly");
  }
};

// Row-stochastic kernel: row per grid point, column per outcome.
struct TransitionKernel {
  std::vector<double> outcomes;             // sorted outcome values
  std::vector<std::vector<double>> rows;    // probabilities per grid point

  TransitionKernel(std::vector<double> out,
                   std::vector<std::vector<double>> r)
      : outcomes(std::move(out)), rows(std::move(r)) {
    for (auto& row : rows) {
      if (row.size() != outcomes.size())
        throw ShapeError("TransitionKernel: row length mismatch");
      double sum = 0.0;
      for (double p : row) {
        if (p < 0) throw ValidationError("TransitionKernel: negative entry");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-10)
        throw ValidationError("TransitionKernel: row sums to " +
                              std::to_string(sum));
    }
  }
};

struct PhaseMeasure {
  std::vector<double> weights;  // over grid points, row-major (x, p)

  explicit PhaseMeasure(std::vector<double> w) : weights(std::move(w)) {
    double sum = 0.0;
    for (double x : weights) {
      if (x < 0) throw ValidationError("PhaseMeasure: negative weight");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-10)
      throw ValidationError("PhaseMeasure: weights sum to " +
                            std::to_string(sum));
  }

  static PhaseMeasure point_mass(const PhaseSpaceGrid& grid, int ix, int ip) {
    std::vector<double> w(grid.points(), 0.0);
    w[grid.index(ix, ip)] = 1.0;
    return PhaseMeasure(std::move(w));
  }
};

// sigma_ce(x,p): RMS difference between the outcome and the reference value
// at one grid point. For the error the reference is x; for the disturbance
// it is p.
inline double pointwise_rms(const TransitionKernel& kernel, int point,
                            double reference) {
  const auto& row = kernel.rows.at(point);
  double acc = 0.0;
  for (size_t k = 0; k < row.size(); ++k) {
    const double d = kernel.outcomes[k] - reference;
    acc += row[k] * d * d;
  }
  return std::sqrt(acc);
}

inline double pointwise_error(const TransitionKernel& kernel,
                              const PhaseSpaceGrid& grid, int ix, int ip) {
  return pointwise_rms(kernel, grid.index(ix, ip), grid.x_nodes[ix]);
}

inline double pointwise_disturbance(const TransitionKernel& kernel,
                                    const PhaseSpaceGrid& grid, int ix,
                                    int ip) {
  return pointwise_rms(kernel, grid.index(ix, ip), grid.p_nodes[ip]);
}

inline double sup_error(const TransitionKernel& kernel,
                        const PhaseSpaceGrid& grid) {
  double sup = 0.0;
  for (size_t ix = 0; ix < grid.x_nodes.size(); ++ix)
    for (size_t ip = 0; ip < grid.p_nodes.size(); ++ip)
      sup = std::max(sup, pointwise_error(kernel, grid, static_cast<int>(ix),
                                          static_cast<int>(ip)));
  return sup;
}

inline double sup_disturbance(const TransitionKernel& kernel,
                              const PhaseSpaceGrid& grid) {
  double sup = 0.0;
  for (size_t ix = 0; ix < grid.x_nodes.size(); ++ix)
    for (size_t ip = 0; ip < grid.p_nodes.size(); ++ip)
      sup = std::max(sup, pointwise_disturbance(kernel, grid,
                                                static_cast<int>(ix),
                                                static_cast<int>(ip)));
  return sup;
}

namespace detail {

// sqrt<(outcome - ref_mean)^2>^lambda - Delta^lambda(ref) for one measure.
inline double measure_increase(const TransitionKernel& kernel,
                               const PhaseSpaceGrid& grid,
                               const PhaseMeasure& lambda, bool against_x) {
  const size_t np = grid.p_nodes.size();
  double ref_mean = 0.0;
  for (size_t ix = 0; ix < grid.x_nodes.size(); ++ix)
    for (size_t ip = 0; ip < np; ++ip)
      ref_mean += lambda.weights[grid.index(static_cast<int>(ix),
                                            static_cast<int>(ip))] *
                  (against_x ? grid.x_nodes[ix] : grid.p_nodes[ip]);
  double ref_var = 0.0, out_second = 0.0;
  for (size_t ix = 0; ix < grid.x_nodes.size(); ++ix)
    for (size_t ip = 0; ip < np; ++ip) {
      const int point = grid.index(static_cast<int>(ix), static_cast<int>(ip));
      const double w = lambda.weights[point];
      if (w == 0.0) continue;
      const double ref = against_x ? grid.x_nodes[ix] : grid.p_nodes[ip];
      ref_var += w * (ref - ref_mean) * (ref - ref_mean);
      for (size_t k = 0; k < kernel.outcomes.size(); ++k) {
        const double d = kernel.outcomes[k] - ref_mean;
        out_second += w * kernel.rows[point][k] * d * d;
      }
    }
  return std::sqrt(out_second) - std::sqrt(ref_var);
}

}  // namespace detail

// Variational form: supremum over the supplied measures of the RMS-deviation
// increase. With every point mass included this equals the pointwise
// supremum, which is the content of the equivalence argument.
inline double variational_error(const TransitionKernel& kernel,
                                const PhaseSpaceGrid& grid,
                                const std::vector<PhaseMeasure>& measures) {
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& lam : measures)
    sup = std::max(sup, detail::measure_increase(kernel, grid, lam, true));
  return sup;
}

inline double variational_disturbance(const TransitionKernel& kernel,
                                      const PhaseSpaceGrid& grid,
                                      const std::vector<PhaseMeasure>& measures) {
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& lam : measures)
    sup = std::max(sup, detail::measure_increase(kernel, grid, lam, false));
  return sup;
}

// All point masses on the grid; callers append random mixtures on top.
inline std::vector<PhaseMeasure> point_masses(const PhaseSpaceGrid& grid) {
  std::vector<PhaseMeasure> out;
  for (size_t ix = 0; ix < grid.x_nodes.size(); ++ix)
    for (size_t ip = 0; ip < grid.p_nodes.size(); ++ip)
      out.push_back(PhaseMeasure::point_mass(grid, static_cast<int>(ix),
                                             static_cast<int>(ip)));
  return out;
}

// One-sided chain for a single measure:
// sqrt<(mu_f - xbar)^2> <= Delta^lambda x + Delta_ce x.
inline bool chain_holds(const TransitionKernel& kernel,
                        const PhaseSpaceGrid& grid, const PhaseMeasure& lambda,
                        bool against_x, double tolerance = 1e-9) {
  const double inc = detail::measure_increase(kernel, grid, lambda, against_x);
  const double sup =
      against_x ? sup_error(kernel, grid) : sup_disturbance(kernel, grid);
  return inc <= sup + tolerance;
}

}  // namespace qmet
