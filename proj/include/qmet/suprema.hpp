#pragma once

// State families over phase-space boxes, state-independent quantities, and
// the inequality verifiers: the restricted error-disturbance/error-error
// relations, their state-dependent counterparts, and the supremum form with
// the K constants.
//
// Families are finite grids, so every supremum here is a maximum over
// samples; reports carry the grid resolution so refinement studies can judge
// the surrogate.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qmet/metrics.hpp"

namespace qmet {

// Nonnegative extended real with the convention q * inf = inf for every
// q >= 0, including q = 0.
struct ExtendedReal {
  double value = 0.0;
  bool infinite = false;

  static ExtendedReal inf() { return {0.0, true}; }
  static ExtendedReal finite(double v) { return {v, false}; }

  friend ExtendedReal operator*(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite || b.infinite) return inf();
    return finite(a.value * b.value);
  }
  friend ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite || b.infinite) return inf();
    return finite(a.value + b.value);
  }
  friend ExtendedReal operator*(double q, const ExtendedReal& b) {
    if (b.infinite) return inf();  // q * inf = inf even for q = 0
    return finite(q * b.value);
  }
  bool at_least(double threshold) const {
    return infinite || value >= threshold;
  }
  double finite_or(double fallback) const {
    return infinite ? fallback : value;
  }
};

// Phase-space box of side l_x (position) by l_p (momentum), sampled on an
// inclusive grid. Degenerate 1 x 1 grids are allowed: a single-point family
// reduces the restricted relations to their state-dependent forms.
struct RegionSpec {
  double l_x = 1.0;
  double l_p = 1.0;
  int grid_nx = 3;
  int grid_np = 3;

  RegionSpec(double lx, double lp, int nx, int np)
      : l_x(lx), l_p(lp), grid_nx(nx), grid_np(np) {
    if (l_x <= 0 || l_p <= 0) throw ValidationError("RegionSpec: sides > 0");
    if (grid_nx < 1 || grid_np < 1)
      throw ValidationError("RegionSpec: grid at least 1 x 1");
  }

  std::vector<double> x_nodes() const { return nodes(l_x, grid_nx); }
  std::vector<double> p_nodes() const { return nodes(l_p, grid_np); }

 private:
  static std::vector<double> nodes(double l, int n) {
    std::vector<double> out(n);
    if (n == 1) {
      out[0] = 0.0;
      return out;
    }
    for (int i = 0; i < n; ++i) out[i] = -l / 2 + l * i / (n - 1);
    return out;
  }
};

// Family member: a displaced copy of the fiducial state (plus the closure
// states x rho x / Tr(rho x^2) and p rho p / Tr(rho p^2) when enabled).
struct FamilyMember {
  double x = 0.0;
  double p = 0.0;
  std::string id;
  Ensemble state;
};

struct StateFamily {
  OscillatorRep rep;
  Ensemble fiducial;     // decomposition of the fiducial density operator
  RegionSpec region;
  bool closure = false;  // include the Theorem-condition closure states

  StateFamily(const OscillatorRep& r, const DensityOperator& rho,
              const RegionSpec& reg, bool close)
      : rep(r), fiducial(ensemble_of(rho)), region(reg), closure(close) {}
};

namespace detail {

inline Ensemble conjugated_ensemble(const Ensemble& e, const ComplexMatrix& op) {
  // op rho op^dag / Tr(op rho op^dag) as a normalized ensemble
  Ensemble out;
  double total = 0.0;
  for (const auto& [w, v] : e) {
    ComplexVector ov = op * v;
    total += w * ov.squaredNorm();
  }
  if (total <= 1e-300)
    throw NumericalError("closure state: vanishing normalization");
  for (const auto& [w, v] : e) {
    ComplexVector ov = op * v;
    const double n2 = ov.squaredNorm();
    if (n2 < 1e-30) continue;
    out.emplace_back(w * n2 / total, ov / std::sqrt(n2));
  }
  return out;
}

}  // namespace detail

// Deterministic enumeration: row-major over (x, p) nodes; closure states
// follow their base point immediately.
inline std::vector<FamilyMember> enumerate_family(const StateFamily& f) {
  std::vector<FamilyMember> out;
  const ComplexMatrix x = position_op(f.rep).matrix();
  const ComplexMatrix p = momentum_op(f.rep).matrix();
  const auto xs = f.region.x_nodes();
  const auto ps = f.region.p_nodes();
  const int interior = f.rep.interior_levels();
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = 0; j < ps.size(); ++j) {
      const ComplexMatrix d = displacement_op(f.rep, xs[i], ps[j]).matrix();
      FamilyMember base;
      base.x = xs[i];
      base.p = ps[j];
      base.id = "x" + std::to_string(i) + "_p" + std::to_string(j);
      double mass = 0.0;
      for (const auto& [w, v] : f.fiducial) {
        ComplexVector dv = d * v;
        mass += w * dv.head(interior).squaredNorm();
        base.state.emplace_back(w, std::move(dv));
      }
      // precondition: truncation admits all displaced states
      if (mass < tol().interior_mass)
        throw TruncationOverflow(
            "enumerate_family: displaced fiducial at (" + std::to_string(xs[i]) +
            ", " + std::to_string(ps[j]) + ") keeps interior mass " +
            std::to_string(mass));
      out.push_back(base);
      if (f.closure) {
        FamilyMember cx = base;
        cx.id += "_xclose";
        cx.state = detail::conjugated_ensemble(base.state, x);
        FamilyMember cp = base;
        cp.id += "_pclose";
        cp.state = detail::conjugated_ensemble(base.state, p);
        out.push_back(std::move(cx));
        out.push_back(std::move(cp));
      }
    }
  return out;
}

struct SupResult {
  ExtendedReal value;
  std::string argmax_id;
  std::string offending_id;  // member that made the metric infinite, if any
};

// Supremum (max over the enumerated members) of a metric functional. A
// non-finite member value turns the result into +inf and names the offender.
inline SupResult sup_metric(
    const std::function<double(const FamilyMember&)>& metric,
    const std::vector<FamilyMember>& members) {
  SupResult r;
  r.value = ExtendedReal::finite(-std::numeric_limits<double>::infinity());
  for (const auto& mem : members) {
    const double v = metric(mem);
    if (!std::isfinite(v)) {
      r.value = ExtendedReal::inf();
      r.offending_id = mem.id;
      return r;
    }
    if (v > r.value.value) {
      r.value = ExtendedReal::finite(v);
      r.argmax_id = mem.id;
    }
  }
  return r;
}

struct KConstants {
  double k_x = 0.0;  // sup of Delta^rho p over the family
  double k_p = 0.0;  // sup of Delta^rho x over the family
};

inline KConstants k_constants(const StateFamily& f) {
  const ComplexMatrix x = position_op(f.rep).matrix();
  const ComplexMatrix p = momentum_op(f.rep).matrix();
  KConstants k;
  for (const auto& mem : enumerate_family(f)) {
    k.k_x = std::max(k.k_x, ensemble_uncertainty(mem.state, p));
    k.k_p = std::max(k.k_p, ensemble_uncertainty(mem.state, x));
  }
  return k;
}

// ---------------------------------------------------------------------------
// inequality verifiers

struct IneqReport {
  std::string relation;
  ExtendedReal lhs;
  double rhs = 0.0;             // hbar / 2
  double slack = 0.0;           // lhs - rhs (infinite lhs: +inf)
  bool pass = false;
  // diagnostics
  double first = 0.0, second = 0.0;   // the two sup quantities entering lhs
  bool first_infinite = false, second_infinite = false;
  std::string dominant_term;
  double coeff_first = 0.0, coeff_second = 0.0;  // additive-term coefficients
};

namespace detail {

inline IneqReport restricted_relation(const std::string& name,
                                      const ExtendedReal& first,
                                      const ExtendedReal& second,
                                      double coeff_first, double coeff_second,
                                      double hbar) {
  IneqReport r;
  r.relation = name;
  r.first = first.finite_or(std::numeric_limits<double>::infinity());
  r.second = second.finite_or(std::numeric_limits<double>::infinity());
  r.first_infinite = first.infinite;
  r.second_infinite = second.infinite;
  r.coeff_first = coeff_first;
  r.coeff_second = coeff_second;
  r.lhs = first * second + coeff_first * first + coeff_second * second;
  r.rhs = hbar / 2.0;
  if (r.lhs.infinite) {
    r.slack = std::numeric_limits<double>::infinity();
    r.pass = true;
    r.dominant_term = "infinite";
    return r;
  }
  r.slack = r.lhs.value - r.rhs;
  r.pass = r.slack >= -1e-9 * hbar;
  const double prod = first.value * second.value;
  const double t1 = coeff_first * first.value;
  const double t2 = coeff_second * second.value;
  r.dominant_term = prod >= t1 && prod >= t2 ? "product"
                    : t1 >= t2               ? "first-additive"
                                             : "second-additive";
  return r;
}

}  // namespace detail

// Restricted error-disturbance relation over a family satisfying the closure
// condition: eps_R eta_R + (hbar/l_X) eps_R + (hbar/l_P) eta_R >= hbar/2.
inline IneqReport verify_appleby_ed(const MeasurementModel& m,
                                    const StateFamily& f) {
  if (!m.canonical_pair)
    throw ValidationError("verify_appleby_ed: continuous-variable model required");
  if (!f.closure)
    throw ValidationError(
        "verify_appleby_ed: family must include the closure states "
        "(construct the StateFamily with closure = true)");
  const auto members = enumerate_family(f);
  SupResult eps = sup_metric(
      [&](const FamilyMember& mem) { return o_error(m, mem.state).value; },
      members);
  SupResult eta = sup_metric(
      [&](const FamilyMember& mem) { return o_disturbance(m, mem.state).value; },
      members);
  const double hbar = f.rep.hbar;
  return detail::restricted_relation("restricted-error-disturbance", eps.value,
                                     eta.value, hbar / f.region.l_x,
                                     hbar / f.region.l_p, hbar);
}

// Error-error form for a joint measurement.
inline IneqReport verify_appleby_ee(const JointMeasurementModel& j,
                                    const StateFamily& f) {
  if (!j.x_branch.canonical_pair || !j.p_branch.canonical_pair)
    throw ValidationError("verify_appleby_ee: continuous-variable model required");
  if (!f.closure)
    throw ValidationError("verify_appleby_ee: closure condition required");
  const auto members = enumerate_family(f);
  SupResult ex = sup_metric(
      [&](const FamilyMember& mem) {
        return o_error(j.x_branch, mem.state).value;
      },
      members);
  SupResult ep = sup_metric(
      [&](const FamilyMember& mem) {
        return o_error(j.p_branch, mem.state).value;
      },
      members);
  const double hbar = f.rep.hbar;
  return detail::restricted_relation("restricted-error-error", ex.value,
                                     ep.value, hbar / f.region.l_x,
                                     hbar / f.region.l_p, hbar);
}

// State-dependent relation: eps eta + Delta p * eps + Delta x * eta >= hbar/2.
inline IneqReport verify_ozawa_ed(const MeasurementModel& m,
                                  const Ensemble& rho) {
  if (!m.canonical_pair)
    throw ValidationError(
        "verify_ozawa_ed: relation holds for canonical pairs; spin models are "
        "out of domain");
  const double eps = o_error(m, rho).value;
  const double eta = o_disturbance(m, rho).value;
  const double dx = ensemble_uncertainty(rho, m.measured.matrix());
  const double dp = ensemble_uncertainty(rho, m.conjugate.matrix());
  IneqReport r = detail::restricted_relation(
      "state-dependent-error-disturbance", ExtendedReal::finite(eps),
      ExtendedReal::finite(eta), dp, dx, m.rep ? m.rep->hbar : 1.0);
  return r;
}

inline IneqReport verify_ozawa_ee(const JointMeasurementModel& j,
                                  const Ensemble& rho) {
  if (!j.x_branch.canonical_pair || !j.p_branch.canonical_pair)
    throw ValidationError("verify_ozawa_ee: canonical pairs required");
  const double ex = o_error(j.x_branch, rho).value;
  const double ep = o_error(j.p_branch, rho).value;
  const double dx = ensemble_uncertainty(rho, j.x_branch.measured.matrix());
  const double dp = ensemble_uncertainty(rho, j.p_branch.measured.matrix());
  return detail::restricted_relation(
      "state-dependent-error-error", ExtendedReal::finite(ex),
      ExtendedReal::finite(ep), dp, dx,
      j.x_branch.rep ? j.x_branch.rep->hbar : 1.0);
}

struct SupOzawaReport {
  IneqReport ineq;
  KConstants k;
  // The supremum form is weaker than the restricted relation exactly when its
  // additive coefficients dominate: hbar/l_X <= K_x and hbar/l_P <= K_p.
  bool weaker_than_restricted = false;
};

inline SupOzawaReport verify_sup_ozawa_ed(const MeasurementModel& m,
                                          const StateFamily& f) {
  if (!m.canonical_pair)
    throw ValidationError("verify_sup_ozawa_ed: continuous-variable model");
  const auto members = enumerate_family(f);
  SupResult eps = sup_metric(
      [&](const FamilyMember& mem) { return o_error(m, mem.state).value; },
      members);
  SupResult eta = sup_metric(
      [&](const FamilyMember& mem) { return o_disturbance(m, mem.state).value; },
      members);
  SupOzawaReport out;
  out.k = k_constants(f);
  const double hbar = f.rep.hbar;
  out.ineq = detail::restricted_relation("sup-ozawa-error-disturbance",
                                         eps.value, eta.value, out.k.k_x,
                                         out.k.k_p, hbar);
  out.weaker_than_restricted =
      hbar / f.region.l_x <= out.k.k_x && hbar / f.region.l_p <= out.k.k_p;
  return out;
}

}  // namespace qmet
