#pragma once

// Finite-dimensional complex linear algebra and quantum-state primitives.
// Dense storage throughout; truncation dimensions stay small enough that
// sparsity would buy nothing.

#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmet/config.hpp"
#include "qmet/errors.hpp"

namespace qmet {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using complexd = std::complex<double>;

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b,
                         double tolerance) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return max_abs(a - b) <= tolerance;
}

// Ordered list of tensor factor dimensions, system factors first.
struct CompositeSpace {
  std::vector<int> dims;

  CompositeSpace() = default;
  CompositeSpace(std::initializer_list<int> d) : dims(d) { validate(); }
  explicit CompositeSpace(std::vector<int> d) : dims(std::move(d)) { validate(); }

  int total_dim() const {
    return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
  }
  int factors() const { return static_cast<int>(dims.size()); }

 private:
  void validate() const {
    if (dims.empty()) throw ValidationError("CompositeSpace: no factors");
    for (int d : dims)
      if (d <= 0) throw ValidationError("CompositeSpace: nonpositive factor dim");
  }
};

class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m, std::string label = {},
                             const Tolerances& t = tol())
      : m_(std::move(m)), label_(std::move(label)) {
    if (m_.rows() != m_.cols()) throw ShapeError("HermitianOperator: not square");
    const double dev = max_abs(m_ - m_.adjoint());
    if (dev > t.hermiticity)
      throw ValidationError("HermitianOperator '" + label_ +
                            "': ||M - M^dag||_max = " + std::to_string(dev));
    m_ = 0.5 * (m_ + m_.adjoint().eval());  // symmetrize away roundoff
  }

  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  const std::string& label() const { return label_; }

 private:
  ComplexMatrix m_;
  std::string label_;
};

class UnitaryOperator {
 public:
  explicit UnitaryOperator(ComplexMatrix m, const Tolerances& t = tol())
      : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw ShapeError("UnitaryOperator: not square");
    const double dev =
        max_abs(m_.adjoint() * m_ - ComplexMatrix::Identity(m_.rows(), m_.cols()));
    if (dev > t.unitarity)
      throw ValidationError("UnitaryOperator: ||U^dag U - I||_max = " +
                            std::to_string(dev));
  }

  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  ComplexMatrix m_;
};

class DensityOperator {
 public:
  explicit DensityOperator(ComplexMatrix m, const Tolerances& t = tol())
      : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw ShapeError("DensityOperator: not square");
    const double herm = max_abs(m_ - m_.adjoint());
    if (herm > t.hermiticity)
      throw ValidationError("DensityOperator: hermiticity deviation " +
                            std::to_string(herm));
    m_ = 0.5 * (m_ + m_.adjoint().eval());
    const double tr = m_.trace().real();
    if (std::abs(tr - 1.0) > t.trace_one)
      throw ValidationError("DensityOperator: trace = " + std::to_string(tr));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < -t.eigenvalue_clamp)
      throw ValidationError("DensityOperator: eigenvalue " + std::to_string(lo));
  }

  static DensityOperator pure(const ComplexVector& psi) {
    ComplexVector v = psi / psi.norm();
    return DensityOperator(v * v.adjoint());
  }

  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  // Spectral decomposition with eigenvalues in [-clamp, 0) clamped to zero and
  // zero-weight directions dropped. Used by everything that iterates over an
  // ensemble decomposition of the state.
  std::vector<std::pair<double, ComplexVector>> decompose(
      double cutoff = 1e-14) const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_);
    std::vector<std::pair<double, ComplexVector>> out;
    for (int i = 0; i < m_.rows(); ++i) {
      double w = es.eigenvalues()(i);
      if (w < cutoff) continue;
      out.emplace_back(w, es.eigenvectors().col(i));
    }
    return out;
  }

  int rank(double cutoff = 1e-12) const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
    int r = 0;
    for (int i = 0; i < m_.rows(); ++i)
      if (es.eigenvalues()(i) > cutoff) ++r;
    return r;
  }

 private:
  ComplexMatrix m_;
};

// ---------------------------------------------------------------------------
// operations

inline ComplexMatrix tensor_product(const ComplexMatrix& a,
                                    const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexVector tensor_product(const ComplexVector& a,
                                    const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline HermitianOperator tensor_product(const HermitianOperator& a,
                                        const HermitianOperator& b) {
  return HermitianOperator(tensor_product(a.matrix(), b.matrix()));
}

inline DensityOperator tensor_product(const DensityOperator& a,
                                      const DensityOperator& b) {
  return DensityOperator(tensor_product(a.matrix(), b.matrix()));
}

// Reduced matrix on factor `keep`, tracing out every other factor.
inline ComplexMatrix partial_trace_keep(const ComplexMatrix& m,
                                        const CompositeSpace& space, int keep) {
  if (keep < 0 || keep >= space.factors())
    throw ShapeError("partial_trace: invalid factor index");
  if (m.rows() != space.total_dim())
    throw ShapeError("partial_trace: dimension mismatch");
  const int dk = space.dims[keep];
  // strides for the mixed-radix index
  std::vector<int> stride(space.factors(), 1);
  for (int f = space.factors() - 2; f >= 0; --f)
    stride[f] = stride[f + 1] * space.dims[f + 1];
  const int rest = space.total_dim() / dk;
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  // enumerate the traced-out multi-index
  std::vector<int> idx(space.factors(), 0);
  for (int r = 0; r < rest; ++r) {
    // decode r into all factors except `keep`
    int rr = r;
    int base = 0;
    for (int f = space.factors() - 1; f >= 0; --f) {
      if (f == keep) continue;
      idx[f] = rr % space.dims[f];
      rr /= space.dims[f];
      base += idx[f] * stride[f];
    }
    for (int i = 0; i < dk; ++i)
      for (int j = 0; j < dk; ++j)
        out(i, j) += m(base + i * stride[keep], base + j * stride[keep]);
  }
  return out;
}

inline DensityOperator partial_trace(const DensityOperator& rho,
                                     const CompositeSpace& space, int keep) {
  return DensityOperator(partial_trace_keep(rho.matrix(), space, keep));
}

struct EigResult {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns, orthonormal
};

inline EigResult hermitian_eig(const HermitianOperator& h,
                               const Tolerances& t = tol()) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
  if (es.info() != Eigen::Success)
    throw NumericalError("hermitian_eig: solver failed to converge (dim " +
                         std::to_string(h.dim()) + ", max sweeps ~30*dim)");
  EigResult r{es.eigenvalues(), es.eigenvectors()};
  const double scale = std::max(1e-300, max_abs(h.matrix()));
  const double resid =
      max_abs(h.matrix() * r.vectors - r.vectors * r.values.asDiagonal().toDenseMatrix().cast<complexd>());
  if (resid > t.eig_residual * scale * 10.0)
    throw NumericalError("hermitian_eig: residual " + std::to_string(resid));
  return r;
}

// exp(i * scale * H), computed through the eigendecomposition.
inline UnitaryOperator expm_i(const HermitianOperator& h, double scale,
                              const Tolerances& t = tol()) {
  EigResult e = hermitian_eig(h, t);
  ComplexVector phases(e.values.size());
  for (Eigen::Index k = 0; k < e.values.size(); ++k)
    phases(k) = std::exp(complexd(0.0, scale * e.values(k)));
  ComplexMatrix u = e.vectors * phases.asDiagonal() * e.vectors.adjoint();
  return UnitaryOperator(std::move(u), t);
}

inline double expectation(const ComplexMatrix& a, const ComplexMatrix& rho,
                          const Tolerances& t = tol()) {
  if (a.rows() != rho.rows()) throw ShapeError("expectation: dimension mismatch");
  const complexd val = (a * rho).trace();
  if (std::abs(val.imag()) > t.imag_residue * std::max(1.0, std::abs(val.real())))
    throw NumericalError("expectation: imaginary residue " +
                         std::to_string(val.imag()));
  return val.real();
}

inline double expectation(const HermitianOperator& a, const DensityOperator& rho,
                          const Tolerances& t = tol()) {
  return expectation(a.matrix(), rho.matrix(), t);
}

inline double uncertainty(const HermitianOperator& a, const DensityOperator& rho,
                          const Tolerances& t = tol()) {
  const double m1 = expectation(a.matrix(), rho.matrix(), t);
  const double m2 = expectation(a.matrix() * a.matrix(), rho.matrix(), t);
  double var = m2 - m1 * m1;
  if (var < 0.0) {
    if (var < -t.variance_clamp)
      throw NumericalError("uncertainty: negative variance " + std::to_string(var));
    var = 0.0;
  }
  return std::sqrt(var);
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("commutator: shape mismatch");
  return a * b - b * a;
}

inline ComplexMatrix anticommutator(const ComplexMatrix& a,
                                    const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("anticommutator: shape mismatch");
  return a * b + b * a;
}

// Pauli matrices and the 2x2 identity.
inline ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << complexd(0, 0), complexd(0, -1), complexd(0, 1), complexd(0, 0);
  return m;
}
inline ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
inline ComplexMatrix id(int d) { return ComplexMatrix::Identity(d, d); }

}  // namespace qmet
