#pragma once

// Measurement models: a system and an apparatus prepared in a ready state,
// coupled by a unitary, read out through a pointer observable. Heisenberg
// initial/final observables, the error and disturbance operators, and the
// concrete model zoo (rotation coupling, idle joint measurement, spin models,
// von Neumann readout, chained double measurement, sharp POVM surrogate).
//
// Unitaries act through a small interface so that structured couplings
// (signed permutations, controlled shifts) never materialize product-space
// matrices they do not need.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmet/hilbert.hpp"
#include "qmet/oscillator.hpp"

namespace qmet {

// ---------------------------------------------------------------------------
// unitary actions on a two-factor product space

class UnitaryAction {
 public:
  virtual ~UnitaryAction() = default;
  virtual int dim() const = 0;
  virtual ComplexVector apply(const ComplexVector& v) const = 0;
  virtual ComplexVector apply_adjoint(const ComplexVector& v) const = 0;
  // Dense matrix; structured implementations build it on demand.
  virtual ComplexMatrix matrix() const = 0;
  // Structured actions apply in far less than a dense matvec.
  virtual bool structured() const { return false; }
  // Heisenberg conjugation U^dag M U; structured actions avoid the two
  // dense products.
  virtual ComplexMatrix conjugate(const ComplexMatrix& m) const {
    const ComplexMatrix u = matrix();
    return u.adjoint() * m * u;
  }
};

class DenseUnitary final : public UnitaryAction {
 public:
  explicit DenseUnitary(UnitaryOperator u) : u_(std::move(u)) {}
  int dim() const override { return u_.dim(); }
  ComplexVector apply(const ComplexVector& v) const override {
    return u_.matrix() * v;
  }
  ComplexVector apply_adjoint(const ComplexVector& v) const override {
    return u_.matrix().adjoint() * v;
  }
  ComplexMatrix matrix() const override { return u_.matrix(); }

 private:
  UnitaryOperator u_;
};

class IdentityUnitary final : public UnitaryAction {
 public:
  explicit IdentityUnitary(int d) : d_(d) {}
  int dim() const override { return d_; }
  ComplexVector apply(const ComplexVector& v) const override { return v; }
  ComplexVector apply_adjoint(const ComplexVector& v) const override {
    return v;
  }
  ComplexMatrix matrix() const override { return ComplexMatrix::Identity(d_, d_); }
  bool structured() const override { return true; }
  ComplexMatrix conjugate(const ComplexMatrix& m) const override { return m; }

 private:
  int d_;
};

// |m,n> -> (-1)^n |n,m> on d x d: the pi/2 rotation that carries the system
// position onto the pointer. Exact restriction of the infinite-dimensional
// rotation, and exactly unitary at every truncation.
class SwapParityUnitary final : public UnitaryAction {
 public:
  explicit SwapParityUnitary(int d) : d_(d) {}
  int dim() const override { return d_ * d_; }
  ComplexVector apply(const ComplexVector& v) const override {
    ComplexVector out(d_ * d_);
    for (int m = 0; m < d_; ++m)
      for (int n = 0; n < d_; ++n)
        out(n * d_ + m) = ((n & 1) ? -1.0 : 1.0) * v(m * d_ + n);
    return out;
  }
  ComplexVector apply_adjoint(const ComplexVector& v) const override {
    ComplexVector out(d_ * d_);
    for (int m = 0; m < d_; ++m)
      for (int n = 0; n < d_; ++n)
        out(m * d_ + n) = ((n & 1) ? -1.0 : 1.0) * v(n * d_ + m);
    return out;
  }
  ComplexMatrix matrix() const override {
    ComplexMatrix u = ComplexMatrix::Zero(d_ * d_, d_ * d_);
    for (int m = 0; m < d_; ++m)
      for (int n = 0; n < d_; ++n)
        u(n * d_ + m, m * d_ + n) = (n & 1) ? -1.0 : 1.0;
    return u;
  }
  bool structured() const override { return true; }
  // (U^dag M U)(mn, m'n') = s(n) s(n') M(nm, n'm') for the signed swap.
  ComplexMatrix conjugate(const ComplexMatrix& m) const override {
    ComplexMatrix out(d_ * d_, d_ * d_);
    for (int a = 0; a < d_; ++a)
      for (int b = 0; b < d_; ++b)
        for (int ap = 0; ap < d_; ++ap)
          for (int bp = 0; bp < d_; ++bp) {
            const double sign = (((b + bp) & 1) ? -1.0 : 1.0);
            out(a * d_ + b, ap * d_ + bp) = sign * m(b * d_ + a, bp * d_ + ap);
          }
    return out;
  }

 private:
  int d_;
};

// Von Neumann readout: U = sum_k P_k (x) S^k with P_k the eigenprojectors of
// the measured observable and S the cyclic shift on the pointer register.
class ControlledShiftUnitary final : public UnitaryAction {
 public:
  ControlledShiftUnitary(ComplexMatrix eigvecs, std::vector<int> klass,
                         int pointer_dim)
      : v_(std::move(eigvecs)), klass_(std::move(klass)), dp_(pointer_dim) {
    ds_ = static_cast<int>(v_.rows());
  }
  int dim() const override { return ds_ * dp_; }

  ComplexVector apply(const ComplexVector& v) const override {
    return transform(v, +1);
  }
  ComplexVector apply_adjoint(const ComplexVector& v) const override {
    return transform(v, -1);
  }
  ComplexMatrix matrix() const override {
    ComplexMatrix u = ComplexMatrix::Zero(dim(), dim());
    for (int c = 0; c < dim(); ++c) {
      ComplexVector e = ComplexVector::Zero(dim());
      e(c) = 1.0;
      u.col(c) = apply(e);
    }
    return u;
  }
  bool structured() const override { return true; }

 private:
  ComplexVector transform(const ComplexVector& v, int dir) const {
    // to eigenbasis of the observable on the system factor
    Eigen::Map<const Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        vin(v.data(), ds_, dp_);
    Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        w = v_.adjoint() * vin;
    Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        shifted(ds_, dp_);
    for (int i = 0; i < ds_; ++i) {
      const int k = klass_[i];
      for (int j = 0; j < dp_; ++j) {
        const int jj = ((j + dir * k) % dp_ + dp_) % dp_;
        shifted(i, jj) = w(i, j);
      }
    }
    Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        out = v_ * shifted;
    return Eigen::Map<ComplexVector>(out.data(), ds_ * dp_);
  }

  ComplexMatrix v_;          // eigenvectors of the measured observable
  std::vector<int> klass_;   // eigenvalue class per eigenvector
  int ds_ = 0, dp_ = 0;
};

// ---------------------------------------------------------------------------
// measurement model

enum class Observable { Measured, Conjugate, Pointer };

struct MeasurementModel {
  std::string id;
  int system_dim = 0;
  int apparatus_dim = 0;
  DensityOperator ready;                       // apparatus ready state
  std::shared_ptr<const UnitaryAction> coupling;
  HermitianOperator pointer;                   // on the apparatus
  HermitianOperator measured;                  // on the system (x^ slot)
  HermitianOperator conjugate;                 // on the system (p^ slot)
  bool canonical_pair = false;                 // true for continuous-variable models
  std::optional<OscillatorRep> rep;            // set for oscillator models
  // Builder-supplied exact Heisenberg finals (skip conjugation cost).
  std::optional<ComplexMatrix> cached_final_measured;
  std::optional<ComplexMatrix> cached_final_conjugate;
  std::optional<ComplexMatrix> cached_final_pointer;

  CompositeSpace space() const { return CompositeSpace{system_dim, apparatus_dim}; }
  int product_dim() const { return system_dim * apparatus_dim; }

  const HermitianOperator& system_observable(Observable which) const {
    return which == Observable::Measured ? measured : conjugate;
  }
};

inline void validate_model(const MeasurementModel& m) {
  if (m.ready.dim() != m.apparatus_dim)
    throw ShapeError("MeasurementModel: ready state dim mismatch");
  if (m.pointer.dim() != m.apparatus_dim)
    throw ShapeError("MeasurementModel: pointer dim mismatch");
  if (m.measured.dim() != m.system_dim || m.conjugate.dim() != m.system_dim)
    throw ShapeError("MeasurementModel: system observable dim mismatch");
  if (m.coupling->dim() != m.product_dim())
    throw ShapeError("MeasurementModel: coupling dim mismatch");
}

inline ComplexMatrix heisenberg_initial(const MeasurementModel& m,
                                        Observable which) {
  switch (which) {
    case Observable::Measured:
      return tensor_product(m.measured.matrix(), id(m.apparatus_dim));
    case Observable::Conjugate:
      return tensor_product(m.conjugate.matrix(), id(m.apparatus_dim));
    case Observable::Pointer:
      return tensor_product(id(m.system_dim), m.pointer.matrix());
  }
  throw Error("unreachable");
}

inline ComplexMatrix heisenberg_final(const MeasurementModel& m,
                                      Observable which) {
  if (which == Observable::Measured && m.cached_final_measured)
    return *m.cached_final_measured;
  if (which == Observable::Conjugate && m.cached_final_conjugate)
    return *m.cached_final_conjugate;
  if (which == Observable::Pointer && m.cached_final_pointer)
    return *m.cached_final_pointer;
  return m.coupling->conjugate(heisenberg_initial(m, which));
}

inline ComplexVector apply_initial(const MeasurementModel& m, Observable which,
                                   const ComplexVector& v) {
  // (A (x) I)|v> and (I (x) B)|v> via the row-major reshape of v
  Eigen::Map<const Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      vin(v.data(), m.system_dim, m.apparatus_dim);
  Eigen::Matrix<complexd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out;
  switch (which) {
    case Observable::Measured:
      out = m.measured.matrix() * vin;
      break;
    case Observable::Conjugate:
      out = m.conjugate.matrix() * vin;
      break;
    case Observable::Pointer:
      out = vin * m.pointer.matrix().transpose();
      break;
  }
  return Eigen::Map<ComplexVector>(out.data(), v.size());
}

// Matrix-free application of a Heisenberg-final observable to a product-space
// vector: U^dag O_i U |v>.
inline ComplexVector apply_final(const MeasurementModel& m, Observable which,
                                 const ComplexVector& v) {
  if (!m.coupling->structured()) {
    const ComplexMatrix* cached = nullptr;
    if (which == Observable::Measured && m.cached_final_measured)
      cached = &*m.cached_final_measured;
    if (which == Observable::Conjugate && m.cached_final_conjugate)
      cached = &*m.cached_final_conjugate;
    if (which == Observable::Pointer && m.cached_final_pointer)
      cached = &*m.cached_final_pointer;
    if (cached) return *cached * v;
  }
  ComplexVector w = m.coupling->apply(v);
  w = apply_initial(m, which, w);
  return m.coupling->apply_adjoint(w);
}

// eps^_X = mu^_f - x^_i
inline ComplexMatrix error_operator(const MeasurementModel& m) {
  return heisenberg_final(m, Observable::Pointer) -
         heisenberg_initial(m, Observable::Measured);
}

// eta^_P = p^_f - p^_i
inline ComplexMatrix disturbance_operator(const MeasurementModel& m) {
  return heisenberg_final(m, Observable::Conjugate) -
         heisenberg_initial(m, Observable::Conjugate);
}

// Total-number interior projector diag for two oscillator factors; assertions
// about truncated continuous-variable models live inside it.
inline RealVector product_interior_diag(const MeasurementModel& m,
                                        const Tolerances& t = tol()) {
  RealVector d = RealVector::Ones(m.product_dim());
  if (!m.rep) return d;
  const int cut = static_cast<int>(
      std::ceil(t.interior_fraction * std::min(m.system_dim, m.apparatus_dim)));
  // strict: the top factor levels carry the ladder-truncation defect even when
  // the other factor sits low
  for (int i = 0; i < m.system_dim; ++i)
    for (int j = 0; j < m.apparatus_dim; ++j)
      d(i * m.apparatus_dim + j) = (i + j < cut) ? 1.0 : 0.0;
  return d;
}

// Mass of rho (x) alpha on the total-number interior.
inline double interior_mass(const MeasurementModel& m,
                            const DensityOperator& rho,
                            const Tolerances& t = tol()) {
  if (!m.rep) return 1.0;
  const RealVector d = product_interior_diag(m, t);
  double mass = 0.0;
  for (int i = 0; i < m.system_dim; ++i)
    for (int j = 0; j < m.apparatus_dim; ++j)
      if (d(i * m.apparatus_dim + j) > 0.5)
        mass += rho.matrix()(i, i).real() * m.ready.matrix()(j, j).real();
  return mass;
}

// ---------------------------------------------------------------------------
// model builders

// Rotation coupling (position measurement with zero error operator): the
// generator x^_i pi^_i - mu^_i p^_i rotates the system position onto the
// pointer; at angle pi/2 the unitary is the signed swap |m,n> -> (-1)^n |n,m>.
inline MeasurementModel rotation_model(const OscillatorRep& rep) {
  auto swap = std::make_shared<SwapParityUnitary>(rep.dim);
  MeasurementModel m{
      "rotation",
      rep.dim,
      rep.dim,
      DensityOperator::pure(ground_state(rep)),
      swap,
      position_op(rep),   // pointer: position of the pointer particle
      position_op(rep),
      momentum_op(rep),
      true,
      rep,
      {},
      {},
      {}};
  validate_model(m);
  return m;
}

// Decoupled model: U = I, pointer reads the ready state only.
inline MeasurementModel decoupled_model(const OscillatorRep& rep) {
  MeasurementModel m{
      "decoupled",
      rep.dim,
      rep.dim,
      DensityOperator::pure(ground_state(rep)),
      std::make_shared<IdentityUnitary>(rep.dim * rep.dim),
      position_op(rep),
      position_op(rep),
      momentum_op(rep),
      true,
      rep,
      {},
      {},
      {}};
  validate_model(m);
  return m;
}

// Joint measurement = a position branch plus a momentum branch that share the
// system. The two pointers live on separate apparatus factors, so each branch
// evaluates on its own two-factor space.
struct JointMeasurementModel {
  MeasurementModel x_branch;  // error operator mu^_f - x^_i
  MeasurementModel p_branch;  // error operator mu^_{P,f} - p^_i
};

// Rotation coupling for the position pointer; the momentum pointer rides along
// without interacting. Its "measured" slot is p^, so o_error on the p branch
// is sqrt<(mu^_{P,i} - p^_i)^2>.
inline JointMeasurementModel idle_joint_model(const OscillatorRep& rep) {
  JointMeasurementModel j{rotation_model(rep), decoupled_model(rep)};
  j.p_branch.id = "idle-momentum-pointer";
  j.p_branch.measured = momentum_op(rep);
  j.p_branch.conjugate = position_op(rep);
  return j;
}

enum class SpinModelKind { IdentityCoupling, SigmaYEvolution };

// Spin-1/2 models. IdentityCoupling: U = I, apparatus prepared in the same
// state as the system, both observables sigma_z. SigmaYEvolution: U = sigma_y
// (x) I on the maximally mixed state; the disturbed observable is sigma_x.
inline MeasurementModel spin_model(SpinModelKind kind,
                                   const DensityOperator& system_state) {
  if (system_state.dim() != 2) throw ShapeError("spin_model: qubit expected");
  switch (kind) {
    case SpinModelKind::IdentityCoupling: {
      MeasurementModel m{"spin-identity-coupling",
                         2,
                         2,
                         system_state,  // alpha matches the system state
                         std::make_shared<DenseUnitary>(UnitaryOperator(id(4))),
                         HermitianOperator(pauli_z(), "pointer sz"),
                         HermitianOperator(pauli_z(), "sz"),
                         HermitianOperator(pauli_x(), "sx"),
                         false,
                         {},
                         {},
                         {},
                         {}};
      validate_model(m);
      return m;
    }
    case SpinModelKind::SigmaYEvolution: {
      MeasurementModel m{"spin-sigma-y",
                         2,
                         2,
                         DensityOperator(0.5 * id(2)),
                         std::make_shared<DenseUnitary>(UnitaryOperator(
                             tensor_product(pauli_y(), id(2)))),
                         HermitianOperator(pauli_z(), "pointer sz"),
                         HermitianOperator(pauli_z(), "sz"),
                         HermitianOperator(pauli_x(), "sx"),
                         false,
                         {},
                         {},
                         {},
                         {}};
      validate_model(m);
      return m;
    }
  }
  throw Error("unreachable");
}

// Distinct-eigenvalue classes of a Hermitian observable, merge gap from tol().
struct SpectralClasses {
  std::vector<double> values;    // one per class
  std::vector<int> klass;        // class index per eigenvector column
  ComplexMatrix vectors;
};

inline SpectralClasses spectral_classes(const HermitianOperator& a,
                                        const Tolerances& t = tol()) {
  EigResult e = hermitian_eig(a, t);
  SpectralClasses out;
  out.vectors = e.vectors;
  out.klass.resize(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (i == 0 || e.values(i) - out.values.back() > t.eigenvalue_merge_gap) {
      out.values.push_back(e.values(i));
    }
    out.klass[i] = static_cast<int>(out.values.size()) - 1;
  }
  return out;
}

// Projective readout of `observable` onto an orthonormal pointer register:
// ready |0>, coupling U = sum_k P_k (x) S^k, pointer eigenvalue a_k on slot k.
// Filler slots (pointer_dim beyond the number of classes) carry values above
// the spectrum and are never populated from the ready state.
inline MeasurementModel von_neumann_model(const HermitianOperator& observable,
                                          int pointer_dim,
                                          const HermitianOperator& conjugate) {
  SpectralClasses sc = spectral_classes(observable);
  const int nclass = static_cast<int>(sc.values.size());
  if (pointer_dim < nclass)
    throw ValidationError("von_neumann_model: pointer_dim " +
                          std::to_string(pointer_dim) + " < " +
                          std::to_string(nclass) + " distinct eigenvalues");
  ComplexMatrix mu = ComplexMatrix::Zero(pointer_dim, pointer_dim);
  const double top = sc.values.back();
  for (int k = 0; k < pointer_dim; ++k)
    mu(k, k) = k < nclass ? sc.values[k] : top + 1.0 + (k - nclass);
  ComplexMatrix alpha = ComplexMatrix::Zero(pointer_dim, pointer_dim);
  alpha(0, 0) = 1.0;
  MeasurementModel m{"von-neumann[" + observable.label() + "]",
                     observable.dim(),
                     pointer_dim,
                     DensityOperator(alpha),
                     std::make_shared<ControlledShiftUnitary>(sc.vectors,
                                                              sc.klass,
                                                              pointer_dim),
                     HermitianOperator(mu, "pointer"),
                     observable,
                     conjugate,
                     false,
                     {},
                     {},
                     {},
                     {}};
  validate_model(m);
  return m;
}

// Sharp POVM surrogate: pointer statistics are the spectral measure of A and
// the error operator reduces system-side to A - x^. Realized as the von
// Neumann dilation of A with the measured slot holding x^.
inline MeasurementModel sharp_povm_model(const HermitianOperator& a,
                                         const HermitianOperator& measured,
                                         const HermitianOperator& conjugate) {
  SpectralClasses sc = spectral_classes(a);
  MeasurementModel m =
      von_neumann_model(a, static_cast<int>(sc.values.size()), conjugate);
  m.id = "sharp-povm[" + a.label() + "]";
  m.measured = measured;
  return m;
}

// Chained Busch model: identity coupling into apparatus 1, then a von Neumann
// sigma_z measurement of the system onto apparatus 2. Exposes the final pure
// state of system + both apparatuses and the two pointer observables.
struct DoubleMeasurementModel {
  ComplexVector final_state;  // on s (x) a1 (x) a2
  ComplexMatrix pointer1;
  ComplexMatrix pointer2;
  CompositeSpace space{2, 2, 2};
};

inline DoubleMeasurementModel double_measurement_model(
    const ComplexVector& psi) {
  if (psi.size() != 2) throw ShapeError("double_measurement_model: qubit");
  ComplexVector ground2 = ComplexVector::Zero(2);
  ground2(0) = 1.0;
  const ComplexVector unit = psi / psi.norm();
  ComplexVector init = tensor_product(tensor_product(unit, unit), ground2);
  // CNOT from the system onto apparatus 2 in the sigma_z basis
  ComplexVector fin = ComplexVector::Zero(8);
  for (int s = 0; s < 2; ++s)
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 2; ++a2)
        fin(4 * s + 2 * a1 + (a2 ^ s)) = init(4 * s + 2 * a1 + a2);
  DoubleMeasurementModel d;
  d.final_state = fin;
  d.pointer1 = tensor_product(tensor_product(id(2), pauli_z()), id(2));
  d.pointer2 = tensor_product(tensor_product(id(2), id(2)), pauli_z());
  return d;
}

// sqrt<Psi|(mu2 - mu1)^2|Psi> for the chained model.
inline double pointer_mismatch(const DoubleMeasurementModel& d) {
  const ComplexMatrix diff = d.pointer2 - d.pointer1;
  const ComplexVector w = diff * d.final_state;
  return w.norm();
}

}  // namespace qmet
