#pragma once

// The O, D and C error/disturbance functionals, ordinary uncertainties,
// pointer and observable distributions.
//
// O quantities: RMS expectations of the error/disturbance operators in
// rho (x) alpha. D quantities: increase of the RMS deviation of the final
// pointer (momentum) from the initial-state mean, relative to the initial
// spread; may be negative and is reported raw. C quantities: supremum over
// bipartite extensions rho_AB with Tr_A rho_AB = rho of the increase in the
// correlation deviation against a reference observable on A; the optimizer
// output is a certified lower bound, and known maximizers evaluate exactly.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qmet/distribution.hpp"
#include "qmet/measurement.hpp"
#include "qmet/random.hpp"

namespace qmet {

// Ensemble decomposition sum_i w_i |psi_i><psi_i| (vectors normalized, not
// necessarily orthogonal). All metric formulas are linear in the state, so a
// low-rank ensemble avoids product-space density matrices.
using Ensemble = std::vector<std::pair<double, ComplexVector>>;

inline Ensemble ensemble_of(const DensityOperator& rho) {
  Ensemble e;
  for (auto& [w, v] : rho.decompose()) e.emplace_back(w, v);
  return e;
}

inline double ensemble_expectation(const Ensemble& e, const ComplexMatrix& a) {
  double out = 0.0;
  for (const auto& [w, v] : e) out += w * (v.adjoint() * a * v)(0).real();
  return out;
}

inline double ensemble_uncertainty(const Ensemble& e, const ComplexMatrix& a) {
  double m1 = 0.0, m2 = 0.0;
  for (const auto& [w, v] : e) {
    const ComplexVector av = a * v;
    m1 += w * v.dot(av).real();
    m2 += w * av.squaredNorm();
  }
  return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

struct MetricValue {
  double value = 0.0;
  bool truncation_flag = false;  // interior mass of rho (x) alpha < threshold
};

namespace detail {

// sqrt( sum_ij w_i q_j || K |psi_i (x) phi_j> ||^2 ) for K given as an apply
// closure on the product space.
inline double rms_apply(const MeasurementModel& m, const Ensemble& sys,
                        const std::function<ComplexVector(const ComplexVector&)>& k) {
  double acc = 0.0;
  for (const auto& [wq, phi] : ensemble_of(m.ready))
    for (const auto& [wp, psi] : sys) {
      const ComplexVector v = tensor_product(psi, phi);
      acc += wp * wq * k(v).squaredNorm();
    }
  return std::sqrt(std::max(0.0, acc));
}

inline bool interior_flag(const MeasurementModel& m, const Ensemble& sys,
                          const Tolerances& t) {
  if (!m.rep) return false;
  // diagonal mass of the ensemble on the total-number interior
  const RealVector d = product_interior_diag(m, t);
  double mass = 0.0;
  for (const auto& [wq, phi] : ensemble_of(m.ready))
    for (const auto& [wp, psi] : sys)
      for (int i = 0; i < m.system_dim; ++i)
        for (int j = 0; j < m.apparatus_dim; ++j)
          if (d(i * m.apparatus_dim + j) > 0.5)
            mass += wp * wq * std::norm(psi(i)) * std::norm(phi(j));
  return mass < t.interior_mass;
}

}  // namespace detail

// eps^rho(x) = sqrt Tr(eps^_X^2 (rho (x) alpha))
inline MetricValue o_error(const MeasurementModel& m, const Ensemble& rho,
                           const Tolerances& t = tol()) {
  auto eps = [&](const ComplexVector& v) {
    return (apply_final(m, Observable::Pointer, v) -
            apply_initial(m, Observable::Measured, v))
        .eval();
  };
  return {detail::rms_apply(m, rho, eps), detail::interior_flag(m, rho, t)};
}

// eta^rho(p) = sqrt Tr(eta^_P^2 (rho (x) alpha))
inline MetricValue o_disturbance(const MeasurementModel& m, const Ensemble& rho,
                                 const Tolerances& t = tol()) {
  auto eta = [&](const ComplexVector& v) {
    return (apply_final(m, Observable::Conjugate, v) -
            apply_initial(m, Observable::Conjugate, v))
        .eval();
  };
  return {detail::rms_apply(m, rho, eta), detail::interior_flag(m, rho, t)};
}

// D error: sqrt Tr((mu^_f - xbar)^2 (rho (x) alpha)) - Delta^rho x (raw, can
// be negative).
inline MetricValue d_error(const MeasurementModel& m, const Ensemble& rho,
                           const Tolerances& t = tol()) {
  const double xbar = ensemble_expectation(rho, m.measured.matrix());
  const double dx = ensemble_uncertainty(rho, m.measured.matrix());
  auto shifted = [&](const ComplexVector& v) {
    return (apply_final(m, Observable::Pointer, v) - xbar * v).eval();
  };
  const double a = detail::rms_apply(m, rho, shifted);
  return {a - dx, detail::interior_flag(m, rho, t)};
}

inline MetricValue d_disturbance(const MeasurementModel& m, const Ensemble& rho,
                                 const Tolerances& t = tol()) {
  const double pbar = ensemble_expectation(rho, m.conjugate.matrix());
  const double dp = ensemble_uncertainty(rho, m.conjugate.matrix());
  auto shifted = [&](const ComplexVector& v) {
    return (apply_final(m, Observable::Conjugate, v) - pbar * v).eval();
  };
  const double a = detail::rms_apply(m, rho, shifted);
  return {a - dp, detail::interior_flag(m, rho, t)};
}

// DensityOperator conveniences
inline MetricValue o_error(const MeasurementModel& m, const DensityOperator& r) {
  return o_error(m, ensemble_of(r));
}
inline MetricValue o_disturbance(const MeasurementModel& m,
                                 const DensityOperator& r) {
  return o_disturbance(m, ensemble_of(r));
}
inline MetricValue d_error(const MeasurementModel& m, const DensityOperator& r) {
  return d_error(m, ensemble_of(r));
}
inline MetricValue d_disturbance(const MeasurementModel& m,
                                 const DensityOperator& r) {
  return d_disturbance(m, ensemble_of(r));
}

// ---------------------------------------------------------------------------
// distributions

// Born distribution of a system observable in rho, degenerate eigenvalues
// merged within the configured gap.
inline OutcomeDistribution observable_distribution(const HermitianOperator& a,
                                                   const Ensemble& rho,
                                                   const Tolerances& t = tol()) {
  SpectralClasses sc = spectral_classes(a, t);
  std::vector<double> w(sc.values.size(), 0.0);
  for (const auto& [wp, psi] : rho) {
    const ComplexVector amps = sc.vectors.adjoint() * psi;
    for (Eigen::Index k = 0; k < amps.size(); ++k)
      w[sc.klass[k]] += wp * std::norm(amps(k));
  }
  return OutcomeDistribution(sc.values, std::move(w), t);
}

inline OutcomeDistribution observable_distribution(const HermitianOperator& a,
                                                   const DensityOperator& rho) {
  return observable_distribution(a, ensemble_of(rho));
}

// Spectral distribution of mu^_f in rho (x) alpha: the pointer eigenprojectors
// conjugate through the coupling, so weights are norms of U|v> components.
inline OutcomeDistribution pointer_distribution(const MeasurementModel& m,
                                                const Ensemble& rho,
                                                const Tolerances& t = tol()) {
  SpectralClasses sc = spectral_classes(m.pointer, t);
  std::vector<double> w(sc.values.size(), 0.0);
  for (const auto& [wq, phi] : ensemble_of(m.ready))
    for (const auto& [wp, psi] : rho) {
      ComplexVector v = m.coupling->apply(tensor_product(psi, phi));
      // rotate apparatus factor to the pointer eigenbasis
      Eigen::Map<const Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic,
                                     Eigen::RowMajor>>
          vin(v.data(), m.system_dim, m.apparatus_dim);
      Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
          amp = vin * sc.vectors.conjugate();
      for (int i = 0; i < m.system_dim; ++i)
        for (int j = 0; j < m.apparatus_dim; ++j)
          w[sc.klass[j]] += wp * wq * std::norm(amp(i, j));
    }
  // drop never-populated filler slots
  std::vector<double> s2, w2;
  for (size_t k = 0; k < w.size(); ++k)
    if (w[k] > 1e-14 || sc.values.size() == 1) {
      s2.push_back(sc.values[k]);
      w2.push_back(w[k]);
    }
  return OutcomeDistribution(std::move(s2), std::move(w2), t);
}

inline OutcomeDistribution pointer_distribution(const MeasurementModel& m,
                                                const DensityOperator& rho) {
  return pointer_distribution(m, ensemble_of(rho));
}

// The post-interaction reduced system state sum over the apparatus.
inline DensityOperator post_measurement_state(const MeasurementModel& m,
                                              const Ensemble& rho) {
  ComplexMatrix out = ComplexMatrix::Zero(m.system_dim, m.system_dim);
  for (const auto& [wq, phi] : ensemble_of(m.ready))
    for (const auto& [wp, psi] : rho) {
      ComplexVector v = m.coupling->apply(tensor_product(psi, phi));
      Eigen::Map<const Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic,
                                     Eigen::RowMajor>>
          vin(v.data(), m.system_dim, m.apparatus_dim);
      out += wp * wq * (vin * vin.adjoint());
    }
  return DensityOperator(out);
}

// ---------------------------------------------------------------------------
// C quantities: supremum over extensions

struct ExtensionSearchConfig {
  int ancilla_dim = 0;     // 0: use the system dimension
  int restarts = 6;
  int max_iters = 200;
  std::uint64_t seed = 1;
  double initial_step = 0.5;
  double min_step = 1e-12;
  double step_growth = 1.3;
  double step_shrink = 0.5;
  int mixture_components = 1;  // purifications mixed per candidate (<= 3)
};

struct CResult {
  double value = 0.0;            // best found (certified lower bound on the sup)
  double optimizer_value = 0.0;  // best from the search alone
  double candidate_value = 0.0;  // best among supplied exact candidates
  bool improved = false;         // optimizer improved over its restarts
  int evaluations = 0;
};

namespace detail {

// Precomputed quadratic forms for the extension objective
//   f = sqrt(s_final + <ref_A^2> - 2 Re Tr((ref_A (x) mfin_B) rho_AB))
//     - sqrt(s_init  + <ref_A^2> - 2 Re Tr((ref_A (x) minit_B) rho_AB))
struct CForms {
  double s_final = 0.0;        // <F^2>_{rho (x) alpha}, F the final-time observable
  double s_init = 0.0;         // <X_B^2>_rho for the initial-time comparison
  ComplexMatrix mfin_B;        // Tr_ap(F (I (x) alpha)) on B
  ComplexMatrix minit_B;       // the initial-time B observable
  ComplexMatrix ref_A;         // reference observable on the ancilla
  // rank-r data of rho: sqrt-weights and eigenvectors
  std::vector<double> sqrt_w;
  ComplexMatrix basis_B;       // d_s x r
};

inline CForms c_forms(const MeasurementModel& m, const DensityOperator& rho,
                      Observable final_of, const ComplexMatrix& init_B,
                      int ancilla_dim) {
  CForms f;
  const Ensemble sys = ensemble_of(rho);
  auto applyF = [&](const ComplexVector& v) { return apply_final(m, final_of, v); };
  f.s_final = 0.0;
  for (const auto& [wq, phi] : ensemble_of(m.ready))
    for (const auto& [wp, psi] : sys) {
      const ComplexVector v = tensor_product(psi, phi);
      f.s_final += wp * wq * applyF(v).squaredNorm();
    }
  f.minit_B = init_B;
  f.s_init = ensemble_expectation(sys, init_B * init_B);
  // mfin_B(b,b') = sum_j q_j <b (x) phi_j| F |b' (x) phi_j>
  f.mfin_B = ComplexMatrix::Zero(m.system_dim, m.system_dim);
  for (const auto& [wq, phi] : ensemble_of(m.ready)) {
    for (int bp = 0; bp < m.system_dim; ++bp) {
      ComplexVector e = ComplexVector::Zero(m.system_dim);
      e(bp) = 1.0;
      ComplexVector w = applyF(tensor_product(e, phi));
      Eigen::Map<const Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic,
                                     Eigen::RowMajor>>
          win(w.data(), m.system_dim, m.apparatus_dim);
      f.mfin_B.col(bp) += wq * (win * phi.conjugate());
    }
  }
  // reference observable on A: leading block of the initial-time observable
  if (ancilla_dim > init_B.rows())
    throw ValidationError("c quantities: ancilla_dim exceeds system dim");
  f.ref_A = init_B.topLeftCorner(ancilla_dim, ancilla_dim);
  const auto decomp = rho.decompose();
  f.basis_B.resize(rho.dim(), static_cast<Eigen::Index>(decomp.size()));
  for (size_t i = 0; i < decomp.size(); ++i) {
    f.sqrt_w.push_back(std::sqrt(decomp[i].first));
    f.basis_B.col(static_cast<Eigen::Index>(i)) = decomp[i].second;
  }
  return f;
}

// Objective at a mixture of purifications {(q_k, W_k)}; each W_k has
// orthonormal columns, |Phi_k> = sum_i sqrt(lam_i) (W_k e_i) (x) b_i.
inline double c_objective(const CForms& f,
                          const std::vector<std::pair<double, ComplexMatrix>>& mix) {
  const int r = static_cast<int>(f.sqrt_w.size());
  // r x r coupling matrices in the rho eigenbasis
  ComplexMatrix mfin_r(r, r), minit_r(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const complexd mf =
          (f.basis_B.col(j).adjoint() * f.mfin_B * f.basis_B.col(i))(0);
      const complexd mi =
          (f.basis_B.col(j).adjoint() * f.minit_B * f.basis_B.col(i))(0);
      mfin_r(j, i) = f.sqrt_w[i] * f.sqrt_w[j] * mf;
      minit_r(j, i) = f.sqrt_w[i] * f.sqrt_w[j] * mi;
    }
  double refA2 = 0.0, cross_fin = 0.0, cross_init = 0.0;
  for (const auto& [q, w] : mix) {
    ComplexMatrix xw = f.ref_A * w;  // d_A x r
    // <ref_A^2>: sum_i lam_i ||ref_A w_i||^2
    for (int i = 0; i < r; ++i)
      refA2 += q * f.sqrt_w[i] * f.sqrt_w[i] * xw.col(i).squaredNorm();
    ComplexMatrix wxw = w.adjoint() * xw;  // (W^dag ref_A W)_{j i}
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        cross_fin += q * (wxw(j, i) * mfin_r(j, i)).real();
        cross_init += q * (wxw(j, i) * minit_r(j, i)).real();
      }
  }
  const double t1 = f.s_final + refA2 - 2.0 * cross_fin;
  const double t2 = f.s_init + refA2 - 2.0 * cross_init;
  return std::sqrt(std::max(0.0, t1)) - std::sqrt(std::max(0.0, t2));
}

// Deterministic Gram-Schmidt with positive-diagonal phase fix.
inline ComplexMatrix orthonormalize(ComplexMatrix m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index k = 0; k < j; ++k)
      m.col(j) -= m.col(k).dot(m.col(j)) * m.col(k);
    const double n = m.col(j).norm();
    if (n < 1e-14) {
      m.col(j).setZero();
      m(j % m.rows(), j) = 1.0;  // degenerate column: fall back to a basis vector
      for (Eigen::Index k = 0; k < j; ++k)
        m.col(j) -= m.col(k).dot(m.col(j)) * m.col(k);
      m.col(j).normalize();
    } else {
      m.col(j) /= n;
    }
  }
  return m;
}

struct CParams {
  std::vector<ComplexMatrix> raw;  // unconstrained d_A x r matrices
  std::vector<double> logits;      // mixture weights via softmax

  std::vector<std::pair<double, ComplexMatrix>> mixture() const {
    std::vector<std::pair<double, ComplexMatrix>> mix;
    double z = 0.0;
    std::vector<double> q(logits.size());
    for (size_t k = 0; k < logits.size(); ++k) {
      q[k] = std::exp(logits[k] - logits[0]);
      z += q[k];
    }
    for (size_t k = 0; k < raw.size(); ++k)
      mix.emplace_back(q[k] / z, orthonormalize(raw[k]));
    return mix;
  }
};

}  // namespace detail

// Evaluate the C objective at an explicit pure extension |Phi> on A (x) B with
// Tr_A |Phi><Phi| = rho (checked). Used for paper-specified maximizers; both
// terms are vector norms so a perfectly correlated extension cancels exactly
// instead of leaving a sqrt(eps) residue.
inline double c_value_at_pure_extension(const MeasurementModel& m,
                                        const DensityOperator& rho,
                                        Observable final_of,
                                        const ComplexMatrix& init_B,
                                        const ComplexVector& phi_AB,
                                        int ancilla_dim) {
  const int dA = ancilla_dim, dB = m.system_dim, da = m.apparatus_dim;
  if (phi_AB.size() != dA * dB)
    throw ShapeError("c_value_at_pure_extension: vector dim");
  if (dA * dB * da > 2'000'000)
    throw ValidationError("c_value_at_pure_extension: space too large");
  Eigen::Map<const Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      c(phi_AB.data(), dA, dB);
  ComplexMatrix marg = c.transpose() * c.conjugate();  // B marginal
  if (max_abs(marg - rho.matrix()) > 1e-9)
    throw ValidationError("extension candidate does not extend rho");
  const ComplexMatrix ref_A = init_B.topLeftCorner(dA, dA);
  // initial-time term lives on A (x) B only: (I_A (x) X_B - ref_A (x) I_B)|Phi>
  ComplexVector t2v(dA * dB);
  {
    Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        xb = (c * init_B.transpose());   // rows: A index, cols: B index
    Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        xa = (ref_A * c);
    Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        d2 = xb - xa;
    t2v = Eigen::Map<ComplexVector>(d2.data(), dA * dB);
  }
  const double t2 = t2v.squaredNorm();
  // final-time term: sum_j q_j || (I_A (x) F - ref_A (x) I)|Phi (x) phi_j> ||^2
  double t1 = 0.0;
  for (const auto& [q, phi_a] : ensemble_of(m.ready)) {
    ComplexVector big = tensor_product(phi_AB, phi_a);  // (A,B,ap) ordering
    ComplexVector fbig(big.size());
    for (int a = 0; a < dA; ++a)
      fbig.segment(a * dB * da, dB * da) =
          apply_final(m, final_of, big.segment(a * dB * da, dB * da));
    // ref_A acts on the A index
    Eigen::Map<const Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        bin(big.data(), dA, dB * da);
    Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        xabig = ref_A * bin;
    t1 += q * (fbig - Eigen::Map<ComplexVector>(xabig.data(), big.size()))
                  .squaredNorm();
  }
  return std::sqrt(std::max(0.0, t1)) - std::sqrt(std::max(0.0, t2));
}

namespace detail {

inline CResult c_supremum(const MeasurementModel& m, const DensityOperator& rho,
                          Observable final_of, const ComplexMatrix& init_B,
                          const ExtensionSearchConfig& cfg,
                          const std::vector<ComplexVector>& candidates) {
  const int r = std::max(1, rho.rank());
  int dA = cfg.ancilla_dim > 0 ? cfg.ancilla_dim : m.system_dim;
  if (dA < r)
    throw ValidationError("ExtensionSearchConfig: ancilla_dim " +
                          std::to_string(dA) + " < rank " + std::to_string(r));
  CForms f = c_forms(m, rho, final_of, init_B, dA);
  CResult out;
  int evals = 0;
  auto value = [&](const CParams& p) {
    ++evals;
    return c_objective(f, p.mixture());
  };

  Rng rng(cfg.seed);
  const int K = std::min(3, std::max(1, cfg.mixture_components));
  double best = -std::numeric_limits<double>::infinity();
  bool any_iter_improved = false;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng r_rng = rng.child(restart);
    CParams p;
    for (int k = 0; k < K; ++k) p.raw.push_back(r_rng.gaussian_matrix(dA, r));
    p.logits.assign(K, 0.0);
    double step = cfg.initial_step;
    double fcur = value(p);
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
      // central finite-difference gradient in all raw parameters
      const double h = std::max(1e-7, step * 1e-4);
      CParams g = p;  // reuse structure for the gradient
      double gnorm2 = 0.0;
      for (size_t k = 0; k < p.raw.size(); ++k)
        for (Eigen::Index i = 0; i < p.raw[k].rows(); ++i)
          for (Eigen::Index j = 0; j < p.raw[k].cols(); ++j) {
            CParams pp = p, pm = p;
            pp.raw[k](i, j) += h;
            pm.raw[k](i, j) -= h;
            const double dre = (value(pp) - value(pm)) / (2 * h);
            pp = p;
            pm = p;
            pp.raw[k](i, j) += complexd(0, h);
            pm.raw[k](i, j) -= complexd(0, h);
            const double dim_ = (value(pp) - value(pm)) / (2 * h);
            g.raw[k](i, j) = complexd(dre, dim_);
            gnorm2 += dre * dre + dim_ * dim_;
          }
      for (size_t k = 0; K > 1 && k < p.logits.size(); ++k) {
        CParams pp = p, pm = p;
        pp.logits[k] += h;
        pm.logits[k] -= h;
        g.logits[k] = (value(pp) - value(pm)) / (2 * h);
        gnorm2 += g.logits[k] * g.logits[k];
      }
      const double gnorm = std::sqrt(gnorm2);
      if (gnorm < 1e-14) break;
      bool improved = false;
      while (step > cfg.min_step) {
        CParams ptry = p;
        for (size_t k = 0; k < p.raw.size(); ++k)
          ptry.raw[k] += (step / gnorm) * g.raw[k];
        if (K > 1)
          for (size_t k = 0; k < p.logits.size(); ++k)
            ptry.logits[k] += (step / gnorm) * g.logits[k];
        const double ftry = value(ptry);
        if (ftry > fcur + 1e-16) {
          p = ptry;
          fcur = ftry;
          improved = true;
          any_iter_improved = true;
          step *= cfg.step_growth;
          break;
        }
        step *= cfg.step_shrink;
      }
      if (!improved) break;
    }
    best = std::max(best, fcur);
  }
  out.optimizer_value = best;
  out.improved = any_iter_improved;
  out.evaluations = evals;
  out.candidate_value = -std::numeric_limits<double>::infinity();
  for (const auto& cand : candidates)
    out.candidate_value = std::max(
        out.candidate_value,
        c_value_at_pure_extension(m, rho, final_of, init_B, cand, dA));
  out.value = std::max(out.optimizer_value, candidates.empty()
                                                ? out.optimizer_value
                                                : out.candidate_value);
  return out;
}

}  // namespace detail

// C error: reference observable is the measured one; compares the final
// pointer against x_A, the initial system observable against x_A.
inline CResult c_error(const MeasurementModel& m, const DensityOperator& rho,
                       const ExtensionSearchConfig& cfg = {},
                       const std::vector<ComplexVector>& candidates = {}) {
  return detail::c_supremum(m, rho, Observable::Pointer, m.measured.matrix(),
                            cfg, candidates);
}

// C disturbance: final-time conjugate observable against p_A.
inline CResult c_disturbance(const MeasurementModel& m,
                             const DensityOperator& rho,
                             const ExtensionSearchConfig& cfg = {},
                             const std::vector<ComplexVector>& candidates = {}) {
  return detail::c_supremum(m, rho, Observable::Conjugate,
                            m.conjugate.matrix(), cfg, candidates);
}

// ---------------------------------------------------------------------------
// aggregate report

struct MetricsReport {
  std::string model_id;
  std::string state_id;
  double o_error = 0.0, o_disturbance = 0.0;
  double d_error = 0.0, d_disturbance = 0.0;
  double c_error = 0.0, c_disturbance = 0.0;
  double uncertainty_x = 0.0, uncertainty_p = 0.0;
  double mean_x = 0.0, mean_p = 0.0;
  bool truncation_flag = false;
  bool c_improved = true;
  int c_evaluations = 0;
};

inline MetricsReport metrics_report(const MeasurementModel& m,
                                    const DensityOperator& rho,
                                    const ExtensionSearchConfig& cfg = {},
                                    const std::string& state_id = {}) {
  MetricsReport r;
  r.model_id = m.id;
  r.state_id = state_id;
  const Ensemble e = ensemble_of(rho);
  auto oe = o_error(m, e);
  auto od = o_disturbance(m, e);
  auto de = d_error(m, e);
  auto dd = d_disturbance(m, e);
  r.o_error = oe.value;
  r.o_disturbance = od.value;
  r.d_error = de.value;
  r.d_disturbance = dd.value;
  r.truncation_flag = oe.truncation_flag || od.truncation_flag;
  auto ce = c_error(m, rho, cfg);
  auto cd = c_disturbance(m, rho, cfg);
  r.c_error = ce.value;
  r.c_disturbance = cd.value;
  r.c_improved = ce.improved && cd.improved;
  r.c_evaluations = ce.evaluations + cd.evaluations;
  r.uncertainty_x = ensemble_uncertainty(e, m.measured.matrix());
  r.uncertainty_p = ensemble_uncertainty(e, m.conjugate.matrix());
  r.mean_x = ensemble_expectation(e, m.measured.matrix());
  r.mean_p = ensemble_expectation(e, m.conjugate.matrix());
  return r;
}

}  // namespace qmet
