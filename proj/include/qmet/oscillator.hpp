#pragma once

// Truncated harmonic-oscillator (Fock) representations of the
// continuous-variable objects: ladder operators, x/p quadratures, coherent and
// displaced states, position grids, and the von Neumann lattice.
//
// Fock truncation is the primary representation; position grids are derived
// views. Truncation-sensitive assertions live on the interior subspace, the
// span of the lowest ceil(0.9*dim) levels.

#include <cmath>
#include <vector>

#include "qmet/distribution.hpp"
#include "qmet/hilbert.hpp"

namespace qmet {

struct OscillatorRep {
  int dim = 2;
  double hbar = 1.0;
  double mass = 1.0;
  double omega = 1.0;

  OscillatorRep(int d, double hb = 1.0, double m = 1.0, double w = 1.0)
      : dim(d), hbar(hb), mass(m), omega(w) {
    if (dim < 2) throw ValidationError("OscillatorRep: dim >= 2 required");
    if (hbar <= 0 || mass <= 0 || omega <= 0)
      throw ValidationError("OscillatorRep: units must be positive");
  }

  // ground-state length scale sqrt(hbar / m omega); Delta x of |0> is width/sqrt(2)
  double width() const { return std::sqrt(hbar / (mass * omega)); }
  int interior_levels(const Tolerances& t = tol()) const {
    return static_cast<int>(std::ceil(t.interior_fraction * dim));
  }
};

inline ComplexMatrix ladder(const OscillatorRep& rep) {
  ComplexMatrix a = ComplexMatrix::Zero(rep.dim, rep.dim);
  for (int k = 0; k + 1 < rep.dim; ++k) a(k, k + 1) = std::sqrt(k + 1.0);
  return a;
}

inline HermitianOperator number_op(const OscillatorRep& rep) {
  ComplexMatrix n = ComplexMatrix::Zero(rep.dim, rep.dim);
  for (int k = 0; k < rep.dim; ++k) n(k, k) = k;
  return HermitianOperator(std::move(n), "n");
}

inline HermitianOperator position_op(const OscillatorRep& rep) {
  const ComplexMatrix a = ladder(rep);
  const double s = std::sqrt(rep.hbar / (2.0 * rep.mass * rep.omega));
  return HermitianOperator(s * (a + a.adjoint()), "x");
}

inline HermitianOperator momentum_op(const OscillatorRep& rep) {
  const ComplexMatrix a = ladder(rep);
  const double s = std::sqrt(rep.hbar * rep.mass * rep.omega / 2.0);
  return HermitianOperator(complexd(0, 1) * s * (a.adjoint() - a), "p");
}

inline ComplexVector ground_state(const OscillatorRep& rep) {
  ComplexVector v = ComplexVector::Zero(rep.dim);
  v(0) = 1.0;
  return v;
}

// Mean excitation carried by phase-space amplitudes (x0, p0).
inline double mean_excitation(const OscillatorRep& rep, double x0, double p0) {
  const double u = x0 / rep.width();
  const double v = p0 * rep.width() / rep.hbar;
  return 0.5 * (u * u + v * v);
}

// Coherent state with <x> = x0, <p> = p0, phase convention of D(x0,p0)|0>.
// Warns through TruncationOverflow when the amplitude crowds the truncation.
inline ComplexVector coherent_state(const OscillatorRep& rep, double x0,
                                    double p0) {
  const double nbar = mean_excitation(rep, x0, p0);
  if (nbar > 0.5 * rep.dim)
    throw TruncationOverflow("coherent_state: mean excitation " +
                             std::to_string(nbar) + " exceeds dim/2");
  const double u = x0 / rep.width();
  const double v = p0 * rep.width() / rep.hbar;
  const complexd beta = complexd(u, v) / std::sqrt(2.0);
  ComplexVector c = ComplexVector::Zero(rep.dim);
  if (std::abs(beta) == 0.0) {
    c(0) = 1.0;
    return c;
  }
  // log-space recurrence avoids overflow in beta^n / sqrt(n!)
  const complexd logb = std::log(beta);
  double logfact = 0.0;
  for (int n = 0; n < rep.dim; ++n) {
    if (n > 0) logfact += std::log(static_cast<double>(n));
    c(n) = std::exp(-nbar + complexd(n) * logb - 0.5 * logfact);
  }
  // renormalize: the truncated tail carries the (tiny) missing mass
  return c / c.norm();
}

// D(x,p) = exp(i (p x^ - x p^) / hbar)
inline UnitaryOperator displacement_op(const OscillatorRep& rep, double x,
                                       double p) {
  const ComplexMatrix gen = (p * position_op(rep).matrix() -
                             x * momentum_op(rep).matrix()) /
                            rep.hbar;
  return expm_i(HermitianOperator(gen, "displacement generator"), 1.0);
}

// ---------------------------------------------------------------------------
// position grids and Hermite-function expansions

struct PositionGrid {
  RealVector points;  // sorted, uniform

  double step() const { return points(1) - points(0); }
  int size() const { return static_cast<int>(points.size()); }
};

// Default grid: 2048 points spanning +-8 ground-state widths, extended so the
// full truncated basis is normalizable on it and re-centered/widened for
// displaced states.
inline PositionGrid default_grid(const OscillatorRep& rep, double center = 0.0,
                                 double extra_halfwidth = 0.0, int n = 2048) {
  const double w = rep.width();
  const double basis_extent = w * (std::sqrt(2.0 * rep.dim) + 4.0);
  const double half = std::max(8.0 * w, basis_extent) + std::abs(center) +
                      extra_halfwidth;
  PositionGrid g;
  g.points = RealVector::LinSpaced(n, -half, half);
  return g;
}

// Orthonormal oscillator eigenfunctions phi_n(x) for n < dim, evaluated on the
// grid via the stable normalized recurrence.
inline Eigen::MatrixXd hermite_functions(const OscillatorRep& rep,
                                         const PositionGrid& grid) {
  const int n = grid.size();
  Eigen::MatrixXd phi(rep.dim, n);
  const double s = 1.0 / rep.width();
  const double norm0 = std::pow(s * s / M_PI, 0.25);
  for (int j = 0; j < n; ++j) {
    const double xi = s * grid.points(j);
    phi(0, j) = norm0 * std::exp(-0.5 * xi * xi);
    if (rep.dim > 1) phi(1, j) = std::sqrt(2.0) * xi * phi(0, j);
    for (int k = 1; k + 1 < rep.dim; ++k)
      phi(k + 1, j) =
          (std::sqrt(2.0) * xi * phi(k, j) - std::sqrt(k) * phi(k - 1, j)) /
          std::sqrt(k + 1.0);
  }
  return phi;
}

inline ComplexVector position_wavefunction(const OscillatorRep& rep,
                                           const ComplexVector& state,
                                           const PositionGrid& grid) {
  if (state.size() != rep.dim) throw ShapeError("position_wavefunction: dim");
  return hermite_functions(rep, grid).transpose().cast<complexd>() * state;
}

// Momentum wavefunction: <p|n> = (-i)^n phi_n(p) with the momentum-scaled
// Hermite functions.
inline ComplexVector momentum_wavefunction(const OscillatorRep& rep,
                                           const ComplexVector& state,
                                           const PositionGrid& pgrid) {
  // width in momentum space is sqrt(hbar m omega)
  const double pw = std::sqrt(rep.hbar * rep.mass * rep.omega);
  OscillatorRep momentum_rep(rep.dim, pw * pw, 1.0, 1.0);  // width() == pw
  Eigen::MatrixXd phi = hermite_functions(momentum_rep, pgrid);
  ComplexVector rotated(rep.dim);
  complexd phase(1.0, 0.0);
  const complexd mi(0.0, -1.0);
  for (int k = 0; k < rep.dim; ++k) {
    rotated(k) = state(k) * phase;
    phase *= mi;
  }
  return phi.transpose().cast<complexd>() * rotated;
}

// |<x|psi>|^2 dx on the grid. Normalization failure (coarse or short grid)
// raises; callers widen the grid instead of silently rescaling.
inline OutcomeDistribution position_distribution(const OscillatorRep& rep,
                                                 const ComplexVector& state,
                                                 const PositionGrid& grid,
                                                 const Tolerances& t = tol()) {
  const ComplexVector wave = position_wavefunction(rep, state, grid);
  const double dx = grid.step();
  std::vector<double> s(grid.size()), w(grid.size());
  double sum = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    s[j] = grid.points(j);
    w[j] = std::norm(wave(j)) * dx;
    sum += w[j];
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw NumericalError("position_distribution: grid captures mass " +
                         std::to_string(sum));
  (void)t;
  return OutcomeDistribution(std::move(s), std::move(w));
}

// ---------------------------------------------------------------------------
// von Neumann lattice

struct LatticeSpec {
  double lambda = 1.0;  // scale length
  int half_width = 1;   // N: lattice indices run over [-N, N]^2

  LatticeSpec(double lam, int n) : lambda(lam), half_width(n) {
    if (lambda <= 0) throw ValidationError("LatticeSpec: lambda > 0 required");
    if (half_width < 1) throw ValidationError("LatticeSpec: N >= 1 required");
  }
};

// Lattice state |n,m>: Gaussian of width lambda centered at n*lambda carrying
// momentum 2 pi m hbar / lambda, expanded in the Fock basis by quadrature
// against the Hermite functions.
inline ComplexVector lattice_state(const OscillatorRep& rep,
                                   const LatticeSpec& spec, int n, int m,
                                   int grid_points = 4001) {
  if (std::abs(n) > spec.half_width || std::abs(m) > spec.half_width)
    throw ValidationError("lattice_state: |n|,|m| must be <= N");
  const double x0 = n * spec.lambda;
  const double p0 = 2.0 * M_PI * m * rep.hbar / spec.lambda;
  const double nbar = mean_excitation(rep, x0, p0);
  if (nbar > 0.5 * rep.dim)
    throw TruncationOverflow("lattice_state: mean excitation " +
                             std::to_string(nbar));
  // the integrand lives under the lattice Gaussian: a window of +-12 widths
  // around its center resolves every Fock level the overlap can reach
  const double span = std::max(12.0 * spec.lambda, 10.0 * rep.width());
  PositionGrid g;
  g.points = RealVector::LinSpaced(grid_points, x0 - span, x0 + span);
  const double dx = g.step();
  Eigen::MatrixXd phi = hermite_functions(rep, g);
  const double norm = std::pow(1.0 / (M_PI * spec.lambda * spec.lambda), 0.25);
  ComplexVector wave(g.size());
  for (int j = 0; j < g.size(); ++j) {
    const double x = g.points(j);
    const double gauss = std::exp(-0.5 * (x - x0) * (x - x0) /
                                  (spec.lambda * spec.lambda));
    wave(j) = norm * gauss *
              std::exp(complexd(0.0, 2.0 * M_PI * m * x / spec.lambda));
  }
  ComplexVector c = phi.cast<complexd>() * wave * dx;
  const double nrm = c.norm();
  if (nrm < 0.999)
    throw TruncationOverflow("lattice_state: basis captures only norm " +
                             std::to_string(nrm));
  return c / nrm;
}

struct LatticeProjector {
  HermitianOperator projector;
  double gram_condition = 0.0;
  int rank = 0;
};

// Projector onto span{|n,m> : -N <= n,m <= N}, built from the Gram
// pseudo-inverse. Ill conditioning is reported, not hidden.
inline LatticeProjector lattice_projector(const OscillatorRep& rep,
                                          const LatticeSpec& spec) {
  const int nstates = (2 * spec.half_width + 1) * (2 * spec.half_width + 1);
  ComplexMatrix v(rep.dim, nstates);
  int col = 0;
  for (int n = -spec.half_width; n <= spec.half_width; ++n)
    for (int m = -spec.half_width; m <= spec.half_width; ++m)
      v.col(col++) = lattice_state(rep, spec, n, m);
  ComplexMatrix gram = v.adjoint() * v;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram);
  const double emax = es.eigenvalues().maxCoeff();
  const double thresh = 1e-10 * emax;
  ComplexVector inv(nstates);
  int rank = 0;
  double emin_kept = emax;
  for (int k = 0; k < nstates; ++k) {
    const double e = es.eigenvalues()(k);
    if (e > thresh) {
      inv(k) = 1.0 / e;
      emin_kept = std::min(emin_kept, e);
      ++rank;
    } else {
      inv(k) = 0.0;
    }
  }
  ComplexMatrix ginv =
      es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
  ComplexMatrix p = v * ginv * v.adjoint();
  LatticeProjector out{HermitianOperator(0.5 * (p + p.adjoint().eval()), "P"),
                       emax / emin_kept, rank};
  return out;
}

// Interior projector: lowest ceil(interior_fraction * dim) levels.
inline ComplexMatrix interior_projector(const OscillatorRep& rep,
                                        const Tolerances& t = tol()) {
  ComplexMatrix p = ComplexMatrix::Zero(rep.dim, rep.dim);
  const int k = rep.interior_levels(t);
  for (int i = 0; i < k; ++i) p(i, i) = 1.0;
  return p;
}

}  // namespace qmet
