#pragma once

// Central numerical tolerances. Every validation and clamping threshold in the
// library reads from one of these knobs so truncation studies can tighten or
// loosen them in a single place.

namespace qmet {

struct Tolerances {
  double hermiticity = 1e-12;        // ||M - M^dag||_max at construction
  double unitarity = 1e-10;          // ||U^dag U - I||_max
  double trace_one = 1e-10;          // |Tr(rho) - 1|
  double eigenvalue_clamp = 1e-10;   // eigenvalues in [-clamp, 0) clamp to 0
  double imag_residue = 1e-10;       // imaginary part allowed in real expectations
  double variance_clamp = 1e-12;     // negative variance tolerated before error
  double eig_residual = 1e-9;        // ||H V - V L|| <= eig_residual * ||H||
  double distribution_norm = 1e-8;   // |sum w - 1|
  double eigenvalue_merge_gap = 1e-9;
  double interior_mass = 0.999;      // minimum state mass on the interior subspace
  double interior_fraction = 0.9;    // interior = lowest ceil(0.9*dim) Fock levels
};

inline const Tolerances& tol() {
  static const Tolerances t{};
  return t;
}

}  // namespace qmet
