#pragma once

// Numerical witnesses for the analytic machinery behind the restricted
// relations: Schwartz-type norms of truncated states, adequacy of the von
// Neumann lattice projection, difference-quotient differentiability of
// displaced states, the trace-derivative identities, and the
// divergence-theorem step that turns the commutator identity into the
// restricted bound chain.
//
// The existence constants in the source lemmas are never fixed here; checks
// report empirical ratio ceilings instead.

#include <functional>
#include <vector>

#include "qmet/measurement.hpp"
#include "qmet/metrics.hpp"
#include "qmet/oscillator.hpp"
#include "qmet/suprema.hpp"

namespace qmet {

struct NormSpec {
  int derivative_order = 0;  // m
  double decay_exponent = 0.0;  // beta

  NormSpec(int m, double beta) : derivative_order(m), decay_exponent(beta) {
    if (m < 0) throw ValidationError("NormSpec: m >= 0 required");
  }
};

enum class WaveSide { Position, Momentum };

// N_{m,beta}(psi) = sup_x (1 + x^2)^beta |d^m psi / dx^m| evaluated on the
// grid; derivatives act spectrally through the ladder operators
// (psi^(m) = <x| (i p/hbar)^m |psi>, and the momentum-side analogue).
// A grid-leakage flag marks norms whose supremum sits on the boundary.
struct SchwartzNorm {
  double value = 0.0;
  bool grid_leakage = false;
};

inline SchwartzNorm schwartz_norm(const OscillatorRep& rep,
                                  const ComplexVector& state,
                                  const NormSpec& spec, const PositionGrid& grid,
                                  WaveSide side = WaveSide::Position) {
  const ComplexMatrix gen =
      side == WaveSide::Position
          ? ComplexMatrix(complexd(0, 1) / rep.hbar * momentum_op(rep).matrix())
          : ComplexMatrix(complexd(0, -1) / rep.hbar * position_op(rep).matrix());
  ComplexVector v = state;
  for (int k = 0; k < spec.derivative_order; ++k) v = gen * v;
  ComplexVector wave = side == WaveSide::Position
                           ? position_wavefunction(rep, v, grid)
                           : momentum_wavefunction(rep, v, grid);
  SchwartzNorm out;
  int arg = 0;
  for (int j = 0; j < grid.size(); ++j) {
    const double x = grid.points(j);
    const double w = std::pow(1.0 + x * x, spec.decay_exponent) *
                     std::abs(wave(j));
    if (w > out.value) {
      out.value = w;
      arg = j;
    }
  }
  out.grid_leakage = arg < 2 || arg > grid.size() - 3;
  return out;
}

// ---------------------------------------------------------------------------
// lattice projection adequacy

struct LatticeResidual {
  double residual = 0.0;       // ||(1 - P)|psi>||
  double gram_condition = 0.0;
};

inline LatticeResidual lattice_residual(const OscillatorRep& rep,
                                        const LatticeSpec& spec,
                                        const ComplexVector& state) {
  LatticeProjector lp = lattice_projector(rep, spec);
  ComplexVector proj = lp.projector.matrix() * state;
  double r = (state - proj).norm();
  return {std::min(1.0, r), lp.gram_condition};
}

// ---------------------------------------------------------------------------
// difference-quotient differentiability of displaced states

struct QuotientCheck {
  std::vector<double> eps;       // the step list, decreasing
  std::vector<double> lhs;       // quotient-minus-generator norms
  std::vector<double> ratio;     // lhs / eps, should stabilize
  double bound_estimate = 0.0;   // max ratio / ((4 + p^2) N~_{0,3/2})
  double consistency = 0.0;      // quotient-vs-generator residual at eps.back()
  bool decreasing = true;
};

// || (1/eps)(|psi_{x+eps,p}> - |psi_{x,p}>) + (i/hbar)(p^ - p/2)|psi_{x,p}> ||
// is bounded by eps * B (4 + p^2) N~_{0,3/2}(psi); the check witnesses the
// linear-in-eps decay and reports the empirical constant.
inline QuotientCheck quotient_bound_check(const OscillatorRep& rep,
                                          const ComplexVector& psi, double x,
                                          double p,
                                          const std::vector<double>& eps_list) {
  QuotientCheck out;
  const ComplexMatrix pmat = momentum_op(rep).matrix();
  const ComplexMatrix dxp = displacement_op(rep, x, p).matrix();
  const ComplexVector base = dxp * psi;
  const ComplexVector gen =
      complexd(0, 1) / rep.hbar * ((pmat * base) - 0.5 * p * base);
  for (double e : eps_list) {
    const ComplexMatrix dplus = displacement_op(rep, x + e, p).matrix();
    const ComplexVector quotient = (dplus * psi - base) / e;
    const double l = (quotient + gen).norm();
    if (!out.lhs.empty() && l > out.lhs.back() + 1e-12) out.decreasing = false;
    out.eps.push_back(e);
    out.lhs.push_back(l);
    out.ratio.push_back(l / e);
  }
  PositionGrid grid = default_grid(rep);
  const double ntilde =
      schwartz_norm(rep, psi, NormSpec(0, 1.5), grid, WaveSide::Momentum).value;
  double max_ratio = 0.0;
  for (double r : out.ratio) max_ratio = std::max(max_ratio, r);
  out.bound_estimate = max_ratio / ((4.0 + p * p) * ntilde);
  out.consistency = out.lhs.back();
  return out;
}

// ---------------------------------------------------------------------------
// trace-derivative identities

struct DerivativeCheck {
  double fd_x = 0.0;        // central difference of Tr((rho_xp (x) alpha) A)
  double analytic_x = 0.0;  // (i/hbar) Tr((rho_xp (x) alpha) [p_i, A])
  double fd_p = 0.0;
  double analytic_p = 0.0;  // -(i/hbar) Tr((rho_xp (x) alpha) [x_i, A])
  double rel_err = 0.0;     // worst of the two axes, floored at scale 1
};

namespace detail {

inline double trace_against(const MeasurementModel& m, const Ensemble& sys,
                            const ComplexMatrix& a) {
  double acc = 0.0;
  for (const auto& [wq, phi] : ensemble_of(m.ready))
    for (const auto& [wp, psi] : sys) {
      const ComplexVector v = tensor_product(psi, phi);
      acc += wp * wq * (v.adjoint() * a * v)(0).real();
    }
  return acc;
}

inline Ensemble displaced(const OscillatorRep& rep, const Ensemble& fid,
                          double x, double p) {
  const ComplexMatrix d = displacement_op(rep, x, p).matrix();
  Ensemble out;
  for (const auto& [w, v] : fid) out.emplace_back(w, d * v);
  return out;
}

}  // namespace detail

inline DerivativeCheck derivative_identity_check(const MeasurementModel& m,
                                                 const Ensemble& fiducial,
                                                 const ComplexMatrix& a,
                                                 double x, double p, double h) {
  if (!m.rep) throw ValidationError("derivative check: oscillator model required");
  const OscillatorRep rep = *m.rep;
  auto f = [&](double xx, double pp) {
    Ensemble e = detail::displaced(rep, fiducial, xx, pp);
    const double mass = detail::interior_flag(m, e, tol()) ? 0.0 : 1.0;
    if (mass == 0.0)
      throw TruncationOverflow("derivative check: displaced state leaks");
    return detail::trace_against(m, e, a);
  };
  DerivativeCheck out;
  out.fd_x = (f(x + h, p) - f(x - h, p)) / (2.0 * h);
  out.fd_p = (f(x, p + h) - f(x, p - h)) / (2.0 * h);
  const Ensemble at = detail::displaced(rep, fiducial, x, p);
  // <[P, A]> through matrix-vector products: (Pv)^dag (Av) - (Av)^dag (Pv)
  auto comm_expect = [&](Observable which) {
    complexd acc(0, 0);
    for (const auto& [wq, phi] : ensemble_of(m.ready))
      for (const auto& [wp, psi] : at) {
        const ComplexVector v = tensor_product(psi, phi);
        const ComplexVector pv = apply_initial(m, which, v);
        const ComplexVector av = a * v;
        const complexd z = pv.dot(av);  // <Pv, Av> = <v|P A|v>
        acc += wp * wq * (z - std::conj(z));
      }
    return acc;
  };
  out.analytic_x =
      (complexd(0, 1) / rep.hbar * comm_expect(Observable::Conjugate)).real();
  out.analytic_p =
      (complexd(0, -1) / rep.hbar * comm_expect(Observable::Measured)).real();
  const double scale_x = std::max(1.0, std::abs(out.analytic_x));
  const double scale_p = std::max(1.0, std::abs(out.analytic_p));
  out.rel_err = std::max(std::abs(out.fd_x - out.analytic_x) / scale_x,
                         std::abs(out.fd_p - out.analytic_p) / scale_p);
  return out;
}

// ---------------------------------------------------------------------------
// divergence-theorem step

struct DivergenceCheck {
  double volume_integral = 0.0;   // trapezoid integral of div v over the box
  double boundary_flux = 0.0;     // contour integral of n . v
  double relative_error = 0.0;
  double interior_identity_residual = 0.0;  // pointwise commutator identity
  // the derived chain, evaluated line by line
  double eps_R = 0.0, eta_R = 0.0;
  double chain_mid = 0.0;    // (hbar/2)(1 - |flux| / (l_X l_P))
  double chain_low = 0.0;    // hbar (1/2 - eps_R/l_X - eta_R/l_P)
  bool chain_ordered = false;
};

// Builds v = (<eps>, <eta>) on the grid, verifies the pointwise identity
// Tr((rho_xp (x) alpha)[eps, eta]) = -i hbar (1 + div v) against central
// differences, and checks the volume/boundary agreement. The volume side
// integrates div v taken from the commutator (no finite differences), so the
// two sides carry independent discretization errors.
inline DivergenceCheck divergence_check(const MeasurementModel& m,
                                        const Ensemble& fiducial,
                                        const RegionSpec& region,
                                        int interior_probes = 9) {
  if (!m.rep) throw ValidationError("divergence check: oscillator model required");
  const OscillatorRep rep = *m.rep;
  const ComplexMatrix eps_op = error_operator(m);
  const ComplexMatrix eta_op = disturbance_operator(m);
  const double hbar = rep.hbar;
  const auto xs = region.x_nodes();
  const auto ps = region.p_nodes();
  const int nx = static_cast<int>(xs.size());
  const int np = static_cast<int>(ps.size());
  if (nx < 3 || np < 3)
    throw ValidationError("divergence check: at least a 3 x 3 grid");
  Eigen::MatrixXd v1(nx, np), v2(nx, np), divv(nx, np);
  double eps_sup = 0.0, eta_sup = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < np; ++j) {
      Ensemble e = detail::displaced(rep, fiducial, xs[i], ps[j]);
      v1(i, j) = detail::trace_against(m, e, eps_op);
      v2(i, j) = detail::trace_against(m, e, eta_op);
      // div v from the commutator identity (independent of grid differences):
      // <v|[eps,eta]|v> = 2i Im((eps v)^dag (eta v))
      double imag_part = 0.0;
      for (const auto& [wq, phi] : ensemble_of(m.ready))
        for (const auto& [wp, psi] : e) {
          const ComplexVector v = tensor_product(psi, phi);
          const ComplexVector ev = eps_op * v;
          const ComplexVector hv = eta_op * v;
          imag_part += wp * wq * 2.0 * ev.dot(hv).imag();
        }
      divv(i, j) = -imag_part / hbar - 1.0;
      eps_sup = std::max(eps_sup, o_error(m, e).value);
      eta_sup = std::max(eta_sup, o_disturbance(m, e).value);
    }
  DivergenceCheck out;
  out.eps_R = eps_sup;
  out.eta_R = eta_sup;
  // trapezoid weights
  auto tw = [](int n, double h) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
    w(0) = w(n - 1) = h / 2.0;
    return w;
  };
  const double hx = xs[1] - xs[0];
  const double hp = ps[1] - ps[0];
  Eigen::VectorXd wx = tw(nx, hx), wp_ = tw(np, hp);
  out.volume_integral = wx.transpose() * divv * wp_;
  out.boundary_flux = (v1.row(nx - 1) * wp_).value() - (v1.row(0) * wp_).value() +
                      (v2.col(np - 1).transpose() * wx).value() -
                      (v2.col(0).transpose() * wx).value();
  const double scale =
      std::max({1e-12, std::abs(out.volume_integral), std::abs(out.boundary_flux)});
  out.relative_error = std::abs(out.volume_integral - out.boundary_flux) / scale;
  // pointwise identity on interior probes: commutator vs central differences
  double worst = 0.0;
  for (int probe = 0; probe < interior_probes; ++probe) {
    const int i = 1 + (probe % (nx - 2));
    const int j = 1 + ((probe * 2 + 1) % (np - 2));
    const double fd = (v1(i + 1, j) - v1(i - 1, j)) / (2.0 * hx) +
                      (v2(i, j + 1) - v2(i, j - 1)) / (2.0 * hp);
    worst = std::max(worst, std::abs(divv(i, j) - fd) * hbar);
  }
  out.interior_identity_residual = worst;
  // derived chain: eps_R eta_R >= (hbar/2)(1 - |flux|/(lx lp))
  //                        >= hbar (1/2 - eps_R/l_X - eta_R/l_P)
  out.chain_mid = (hbar / 2.0) *
                  (1.0 - std::abs(out.boundary_flux) / (region.l_x * region.l_p));
  out.chain_low = hbar * (0.5 - eps_sup / region.l_x - eta_sup / region.l_p);
  out.chain_ordered = eps_sup * eta_sup >= out.chain_mid - 1e-9 * hbar &&
                      out.chain_mid >= out.chain_low - 1e-9 * hbar;
  return out;
}

}  // namespace qmet
