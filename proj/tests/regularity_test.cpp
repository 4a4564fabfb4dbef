#include "qmet/regularity.hpp"

#include <algorithm>

#include <gtest/gtest.h>

#include "qmet/random.hpp"

using namespace qmet;

TEST(SchwartzNorm, GroundStatePeakOracle) {
  OscillatorRep rep(40, 1, 1, 1);
  PositionGrid g = default_grid(rep);
  SchwartzNorm n00 =
      schwartz_norm(rep, ground_state(rep), NormSpec(0, 0.0), g);
  EXPECT_NEAR(n00.value, std::pow(1.0 / M_PI, 0.25), 1e-4);  // grid-limited
  EXPECT_FALSE(n00.grid_leakage);
}

TEST(SchwartzNorm, GroundFirstDerivativeCriticalPoint) {
  // |psi_0'| = |x| e^{-x^2/2} (1/pi)^{1/4} peaks at |x| = 1
  OscillatorRep rep(40, 1, 1, 1);
  PositionGrid g = default_grid(rep);
  SchwartzNorm n10 =
      schwartz_norm(rep, ground_state(rep), NormSpec(1, 0.0), g);
  // tolerance limited by the grid resolution around the critical point
  EXPECT_NEAR(n10.value, std::pow(1.0 / M_PI, 0.25) * std::exp(-0.5), 1e-4);
}

TEST(SchwartzNorm, FiniteAndDecreasingUnderGridExtension) {
  OscillatorRep rep(40, 1, 1, 1);
  for (double beta : {0.5, 2.0, 4.0}) {
    PositionGrid narrow;
    narrow.points = RealVector::LinSpaced(2048, -12.0, 12.0);
    PositionGrid wide;
    wide.points = RealVector::LinSpaced(4096, -18.0, 18.0);
    SchwartzNorm a =
        schwartz_norm(rep, ground_state(rep), NormSpec(0, beta), narrow);
    SchwartzNorm b =
        schwartz_norm(rep, ground_state(rep), NormSpec(0, beta), wide);
    ASSERT_TRUE(std::isfinite(a.value));
    // the Gaussian beats the polynomial: extending the grid cannot raise the sup
    ASSERT_LE(b.value, a.value + 1e-9) << beta;
  }
}

TEST(SchwartzNorm, MomentumSideGaussian) {
  OscillatorRep rep(40, 1, 1, 1);
  PositionGrid g = default_grid(rep);
  SchwartzNorm n = schwartz_norm(rep, ground_state(rep), NormSpec(0, 0.0), g,
                                 WaveSide::Momentum);
  EXPECT_NEAR(n.value, std::pow(1.0 / M_PI, 0.25), 1e-4);
}

TEST(LatticeResidual, SpanMemberIsRepresented) {
  OscillatorRep rep(200, 1, 1, 1);
  LatticeSpec spec(1.0, 2);
  ComplexVector st = lattice_state(rep, spec, 1, -1);
  LatticeResidual r = lattice_residual(rep, spec, st);
  EXPECT_LE(r.residual, 1e-8);
}

TEST(LatticeResidual, WindowInteriorCoherentStates) {
  // Frozen from the projector oracle: on-lattice points are reproduced to
  // machine precision; between lattice sites the critical-density window at
  // N = 4 leaves a percent-level residual.
  OscillatorRep rep(700, 1, 1, 1);
  LatticeSpec spec(1.0, 4);
  LatticeProjector lp = lattice_projector(rep, spec);
  auto resid = [&](double x0, double p0) {
    ComplexVector v = coherent_state(rep, x0, p0);
    return (v - lp.projector.matrix() * v).norm();
  };
  EXPECT_LE(resid(2.0, 0.0), 1e-8);                    // lattice point
  EXPECT_LE(resid(1.0, 0.0), 1e-8);                    // lattice point
  EXPECT_LE(resid(0.5, 0.0), 2e-2);                    // midpoint in x
  EXPECT_LE(resid(1.5, 2.0 * M_PI), 2e-2);             // midpoint, boosted
  EXPECT_GE(lp.gram_condition, 1.0);
}

TEST(LatticeResidual, FarDisplacedStateOrthogonal) {
  OscillatorRep rep(700, 1, 1, 1);
  LatticeSpec spec(1.0, 4);
  ComplexVector far = coherent_state(rep, 12.0, 0.0);
  LatticeResidual r = lattice_residual(rep, spec, far);
  EXPECT_GE(r.residual, 0.9);
}

TEST(LatticeResidual, MonotoneNonIncreasingInN) {
  OscillatorRep rep(700, 1, 1, 1);
  ComplexVector probe = coherent_state(rep, 1.5, 1.5);
  double prev = 2.0;
  for (int n = 1; n <= 3; ++n) {
    LatticeSpec spec(1.0, n);
    LatticeResidual r = lattice_residual(rep, spec, probe);
    ASSERT_LE(r.residual, prev + 1e-10) << n;
    prev = r.residual;
  }
}

TEST(QuotientCheck, GroundAtOriginLinearDecay) {
  OscillatorRep rep(60, 1, 1, 1);
  QuotientCheck q = quotient_bound_check(rep, ground_state(rep), 0.0, 0.0,
                                         {1e-2, 1e-3, 1e-4});
  EXPECT_TRUE(q.decreasing);
  // lhs ~ c * eps: the ratio stabilizes
  EXPECT_NEAR(q.ratio[1], q.ratio[2], 1e-3 * q.ratio[1] + 1e-12);
  EXPECT_LE(q.lhs.back(), 1e-3);
  EXPECT_GT(q.bound_estimate, 0.0);
}

TEST(QuotientCheck, EigenConsistencyAtSmallStep) {
  // the quotient converges to -(i/hbar)(p - p/2)|psi_xp>
  OscillatorRep rep(60, 1, 1, 1);
  QuotientCheck q = quotient_bound_check(rep, ground_state(rep), 0.3, 0.5,
                                         {1e-3, 1e-4});
  EXPECT_LE(q.consistency, 1e-3);
}

TEST(QuotientCheck, MomentumScalingWithinLemmaEnvelope) {
  // The quotient slope obeys slope(p) <= B (4 + p^2) N~ for one constant B:
  // the empirical B estimates stay bounded across p and settle for large p.
  // (Exact Gaussian moments: slope(p) = ||(p^ - p/2)^2 psi_0|| / 2, so
  // B_est peaks near p = 2 at ~1.26x its p = 0 value and decreases after.)
  OscillatorRep rep(80, 1, 1, 1);
  std::vector<double> b_est;
  for (double p : {0.0, 2.0, 4.0, 6.0}) {
    QuotientCheck q = quotient_bound_check(rep, ground_state(rep), 0.0, p,
                                           {1e-3, 1e-4});
    b_est.push_back(q.bound_estimate);
  }
  const double lo = *std::min_element(b_est.begin(), b_est.end());
  const double hi = *std::max_element(b_est.begin(), b_est.end());
  EXPECT_LE(hi / lo, 1.5);
  EXPECT_LE(b_est[3], b_est[1]);  // the envelope dominates at larger p
}

TEST(DerivativeIdentity, IdentityOperatorBothSidesVanish) {
  OscillatorRep rep(30, 1, 1, 1);
  MeasurementModel m = decoupled_model(rep);
  Ensemble fid{{1.0, ground_state(rep)}};
  DerivativeCheck d = derivative_identity_check(
      m, fid, id(m.product_dim()), 0.4, -0.2, 1e-3);
  EXPECT_NEAR(d.fd_x, 0.0, 1e-9);
  EXPECT_NEAR(d.analytic_x, 0.0, 1e-12);
  EXPECT_NEAR(d.fd_p, 0.0, 1e-9);
}

TEST(DerivativeIdentity, PositionObservableUnitSlope) {
  // A = x_i: d<A>/dx = 1 via the displacement covariance
  OscillatorRep rep(30, 1, 1, 1);
  MeasurementModel m = decoupled_model(rep);
  Ensemble fid{{1.0, ground_state(rep)}};
  DerivativeCheck d = derivative_identity_check(
      m, fid, heisenberg_initial(m, Observable::Measured), 0.2, 0.1, 1e-3);
  EXPECT_NEAR(d.analytic_x, 1.0, 1e-10);
  EXPECT_NEAR(d.fd_x, 1.0, 1e-6);
  EXPECT_NEAR(d.analytic_p, 0.0, 1e-10);
  EXPECT_LE(d.rel_err, 1e-6);
}

TEST(DerivativeIdentity, RotationErrorOperatorTenRandomPoints) {
  OscillatorRep rep(40, 1, 1, 1);
  MeasurementModel m = rotation_model(rep);
  Ensemble fid{{1.0, ground_state(rep)}};
  const ComplexMatrix eps_op = error_operator(m);
  Rng rng(6);
  for (int k = 0; k < 10; ++k) {
    const double x = rng.uniform(-1.5, 1.5);
    const double p = rng.uniform(-1.5, 1.5);
    DerivativeCheck d = derivative_identity_check(m, fid, eps_op, x, p, 1e-3);
    ASSERT_LE(d.rel_err, 1e-4) << "(" << x << ", " << p << ")";
  }
}

TEST(DerivativeIdentity, CubicObservableSecondOrderConvergence) {
  // <x^3>(x) has constant third derivative: the central-difference error
  // scales as h^2 and halving h quarters it.
  OscillatorRep rep(40, 1, 1, 1);
  MeasurementModel m = decoupled_model(rep);
  Ensemble fid{{1.0, ground_state(rep)}};
  const ComplexMatrix x1 = heisenberg_initial(m, Observable::Measured);
  const ComplexMatrix x3 = x1 * x1 * x1;
  const double x = 0.7, p = -0.3;
  std::vector<double> errs;
  for (double h : {2e-2, 1e-2, 5e-3}) {
    DerivativeCheck d = derivative_identity_check(m, fid, x3, x, p, h);
    errs.push_back(std::abs(d.fd_x - d.analytic_x));
  }
  const double r1 = errs[0] / errs[1];
  const double r2 = errs[1] / errs[2];
  EXPECT_GE(r1, 3.5);
  EXPECT_LE(r1, 4.5);
  EXPECT_GE(r2, 3.5);
  EXPECT_LE(r2, 4.5);
}

TEST(Divergence, DecoupledModelStructure) {
  // eta = 0 kills the second component; div v = -1 from the x term alone
  OscillatorRep rep(30, 1, 1, 1);
  MeasurementModel m = decoupled_model(rep);
  Ensemble fid{{1.0, ground_state(rep)}};
  DivergenceCheck d = divergence_check(m, fid, RegionSpec(3, 3, 9, 9));
  EXPECT_NEAR(d.eta_R, 0.0, 1e-10);
  EXPECT_NEAR(d.volume_integral, -9.0, 1e-8);  // -1 over a 3x3 box
  EXPECT_LE(d.relative_error, 1e-8);
  EXPECT_LE(d.interior_identity_residual, 1e-8);
}

TEST(Divergence, RotationModelGreenAgreement) {
  OscillatorRep rep(40, 1, 1, 1);
  MeasurementModel m = rotation_model(rep);
  Ensemble fid{{1.0, ground_state(rep)}};
  DivergenceCheck d = divergence_check(m, fid, RegionSpec(6, 6, 17, 17));
  EXPECT_LE(d.relative_error, 1e-4);
  EXPECT_LE(d.interior_identity_residual, 1e-6);
  EXPECT_TRUE(d.chain_ordered);
}

TEST(Divergence, AnharmonicRefinementRatio) {
  // number-conserving beamsplitter + Kerr cross term: v is nonlinear in
  // (x, p), so the quadrature error has a genuine h^2 signal
  OscillatorRep rep(24, 1, 1, 1);
  const ComplexMatrix x = position_op(rep).matrix();
  const ComplexMatrix p = momentum_op(rep).matrix();
  const ComplexMatrix n = number_op(rep).matrix();
  const ComplexMatrix eye = id(rep.dim);
  ComplexMatrix gen = tensor_product(x, eye) * tensor_product(eye, p) -
                      tensor_product(eye, x) * tensor_product(p, eye) +
                      0.4 * tensor_product(n, n);
  MeasurementModel m = decoupled_model(rep);
  m.coupling = std::make_shared<DenseUnitary>(
      expm_i(HermitianOperator(gen), -M_PI / 5.0));
  m.cached_final_pointer.reset();
  m.cached_final_measured.reset();
  m.cached_final_conjugate.reset();
  Ensemble fid{{1.0, ground_state(rep)}};
  std::vector<double> errs;
  for (int nodes : {9, 17, 33}) {
    DivergenceCheck d =
        divergence_check(m, fid, RegionSpec(3, 3, nodes, nodes));
    errs.push_back(std::abs(d.volume_integral - d.boundary_flux));
  }
  const double r1 = errs[0] / errs[1];
  const double r2 = errs[1] / errs[2];
  EXPECT_GE(r1, 3.0);
  EXPECT_LE(r1, 5.0);
  EXPECT_GE(r2, 3.0);
  EXPECT_LE(r2, 5.0);
}

TEST(Divergence, DerivedChainReproducedLineByLine) {
  OscillatorRep rep(40, 1, 1, 1);
  MeasurementModel m = rotation_model(rep);
  Ensemble fid{{1.0, ground_state(rep)}};
  DivergenceCheck d = divergence_check(m, fid, RegionSpec(6, 6, 9, 9));
  // eps_R eta_R >= (hbar/2)(1 - |flux|/(l_X l_P)) >= hbar(1/2 - eps/l - eta/l)
  EXPECT_GE(d.eps_R * d.eta_R, d.chain_mid - 1e-9);
  EXPECT_GE(d.chain_mid, d.chain_low - 1e-9);
  EXPECT_TRUE(d.chain_ordered);
}
