#include "qmet/metrics.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qmet/random.hpp"

using namespace qmet;

namespace {
ComplexVector plus_x() {
  ComplexVector v(2);
  v << 1, 1;
  return v / std::sqrt(2.0);
}
ComplexVector phi_plus() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}
}  // namespace

TEST(OError, RotationModelFamilyStatesNearZero) {
  OscillatorRep rep(40, 1, 1, 1);
  MeasurementModel m = rotation_model(rep);
  for (double x0 : {0.0, 1.0, -2.0}) {
    DensityOperator rho = DensityOperator::pure(coherent_state(rep, x0, 0.5));
    EXPECT_LE(o_error(m, rho).value, 1e-6);
  }
}

TEST(OError, SpinIdentityCouplingPlusX) {
  DensityOperator rho = DensityOperator::pure(plus_x());
  MeasurementModel m = spin_model(SpinModelKind::IdentityCoupling, rho);
  // <eps^2> = 2 - 2<sz>^2 = 2 at |+x>
  EXPECT_NEAR(o_error(m, rho).value, std::sqrt(2.0), 1e-12);
}

TEST(OError, DecoupledOscillatorGroundPair) {
  OscillatorRep rep(30, 1, 1, 1);
  MeasurementModel m = decoupled_model(rep);
  DensityOperator rho = DensityOperator::pure(ground_state(rep));
  // <mu^2> + <x^2> = 1/2 + 1/2, cross term zero
  EXPECT_NEAR(o_error(m, rho).value, 1.0, 1e-10);
}

TEST(ODisturbance, RotationModelGroundPairIsOne) {
  OscillatorRep rep(40, 1, 1, 1);
  MeasurementModel m = rotation_model(rep);
  DensityOperator rho = DensityOperator::pure(ground_state(rep));
  EXPECT_NEAR(o_disturbance(m, rho).value, 1.0, 1e-10);
}

TEST(OError, TruncationFlagRaisedOutsideInterior) {
  OscillatorRep rep(12, 1, 1, 1);
  MeasurementModel m = rotation_model(rep);
  DensityOperator rho = DensityOperator::pure(coherent_state(rep, 2.4, 2.2));
  EXPECT_TRUE(o_error(m, rho).truncation_flag);
}

TEST(DError, SpinIdentityCouplingZeroForPureStates) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexVector psi = rng.child(trial).unit_vector(2);
    DensityOperator rho = DensityOperator::pure(psi);
    MeasurementModel m = spin_model(SpinModelKind::IdentityCoupling, rho);
    ASSERT_NEAR(d_error(m, rho).value, 0.0, 1e-12);
  }
}

TEST(DError, Example7GroundStateZero) {
  OscillatorRep rep(60, 1, 1, 1);
  const ComplexMatrix x = position_op(rep).matrix();
  const ComplexMatrix p = momentum_op(rep).matrix();
  ComplexMatrix hosc = p * p / 2.0 + x * x / 2.0;
  HermitianOperator hprime(x + hosc - 0.5 * id(rep.dim), "H'");
  MeasurementModel m =
      sharp_povm_model(hprime, position_op(rep), momentum_op(rep));
  DensityOperator rho = DensityOperator::pure(ground_state(rep));
  EXPECT_NEAR(d_error(m, rho).value, 0.0, 1e-8);
}

TEST(DDisturbance, KorzekwaZero) {
  HermitianOperator sz(pauli_z(), "sz");
  MeasurementModel m = von_neumann_model(sz, 2, HermitianOperator(pauli_x()));
  ComplexVector up(2);
  up << 1, 0;
  EXPECT_NEAR(d_disturbance(m, DensityOperator::pure(up)).value, 0.0, 1e-12);
}

TEST(PointerDistribution, IdentityCouplingDiagonalOfReady) {
  // U = I with a diagonal pointer reads the ready state's diagonal
  OscillatorRep rep(6, 1, 1, 1);
  Rng rng(3);
  MeasurementModel m = decoupled_model(rep);
  m.pointer = number_op(rep);
  DensityOperator alpha(rng.density(6, 6));
  m.ready = alpha;
  DensityOperator rho(rng.density(6, 2));
  OutcomeDistribution d = pointer_distribution(m, rho);
  for (int k = 0; k < 6; ++k)
    EXPECT_NEAR(d.weights[k], alpha.matrix()(k, k).real(), 1e-12);
}

TEST(PointerDistribution, Example7PoissonHalfLaw) {
  OscillatorRep rep(60, 1, 1, 1);
  const ComplexMatrix x = position_op(rep).matrix();
  const ComplexMatrix p = momentum_op(rep).matrix();
  ComplexMatrix hosc = p * p / 2.0 + x * x / 2.0;
  HermitianOperator hprime(x + hosc - 0.5 * id(rep.dim), "H'");
  MeasurementModel m =
      sharp_povm_model(hprime, position_op(rep), momentum_op(rep));
  DensityOperator rho = DensityOperator::pure(ground_state(rep));
  OutcomeDistribution d = pointer_distribution(m, rho);
  // support n - 1/2, weights e^{-1/2} (1/2)^n / n!
  for (int n = 0; n < 8; ++n) {
    ASSERT_NEAR(d.support[n], n - 0.5, 1e-8);
    ASSERT_NEAR(d.weights[n], oracle::poisson_pmf(0.5, n), 1e-8);
  }
  Moments mm = moments(d);
  EXPECT_NEAR(mm.mean, 0.0, 1e-8);
  EXPECT_NEAR(mm.variance, 0.5, 1e-6);
}

TEST(PointerDistribution, SpinPlusXHalfHalf) {
  DensityOperator rho = DensityOperator::pure(plus_x());
  MeasurementModel m = spin_model(SpinModelKind::IdentityCoupling, rho);
  OutcomeDistribution d = pointer_distribution(m, rho);
  EXPECT_NEAR(d.support[0], -1.0, 1e-14);
  EXPECT_NEAR(d.support[1], 1.0, 1e-14);
  EXPECT_NEAR(d.weights[0], 0.5, 1e-13);
}

TEST(Wasserstein, PointMasses) {
  EXPECT_NEAR(wasserstein2(OutcomeDistribution::point_mass(1.0),
                           OutcomeDistribution::point_mass(4.0)),
              3.0, 1e-15);
}

TEST(Wasserstein, SelfDistanceZeroAndSymmetry) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Rng r = rng.child(trial);
    const int n = 2 + static_cast<int>(r.uniform() * 5);
    std::vector<double> s(n), w(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      s[i] = (i == 0 ? 0.0 : s[i - 1]) + r.uniform(0.01, 1.0);
      w[i] = r.uniform(0.05, 1.0);
      acc += w[i];
    }
    for (auto& x : w) x /= acc;
    OutcomeDistribution d(s, w);
    ASSERT_NEAR(wasserstein2(d, d), 0.0, 1e-15);
  }
}

TEST(Wasserstein, AgreesWithQuantileGridOracle) {
  OutcomeDistribution a({-1.0, 0.5, 2.0}, {0.3, 0.5, 0.2});
  OutcomeDistribution b({-0.5, 1.0, 1.5, 3.0}, {0.1, 0.4, 0.3, 0.2});
  const double mine = wasserstein2(a, b);
  const double ref =
      oracle::w2_grid(a.support, a.weights, b.support, b.weights);
  EXPECT_NEAR(mine, ref, 2e-4);
}

TEST(Wasserstein, TriangleInequalityRandomTriples) {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    Rng r = rng.child(trial);
    auto rnd = [&]() {
      const int n = 2 + static_cast<int>(r.uniform() * 4);
      std::vector<double> s(n), w(n);
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        s[i] = (i == 0 ? r.uniform(-2, 0) : s[i - 1]) + r.uniform(0.01, 1.0);
        w[i] = r.uniform(0.05, 1.0);
        acc += w[i];
      }
      for (auto& x : w) x /= acc;
      return OutcomeDistribution(s, w);
    };
    OutcomeDistribution a = rnd(), b = rnd(), c = rnd();
    ASSERT_LE(wasserstein2(a, c),
              wasserstein2(a, b) + wasserstein2(b, c) + 1e-10);
  }
}

TEST(Wasserstein, Example7PositiveAndTruncationStable) {
  auto w2_at_dim = [](int dim) {
    OscillatorRep rep(dim, 1, 1, 1);
    const ComplexMatrix x = position_op(rep).matrix();
    const ComplexMatrix p = momentum_op(rep).matrix();
    ComplexMatrix hosc = p * p / 2.0 + x * x / 2.0;
    HermitianOperator hprime(x + hosc - 0.5 * id(rep.dim), "H'");
    MeasurementModel m =
        sharp_povm_model(hprime, position_op(rep), momentum_op(rep));
    DensityOperator rho = DensityOperator::pure(ground_state(rep));
    OutcomeDistribution pointer = pointer_distribution(m, rho);
    PositionGrid g;
    g.points = RealVector::LinSpaced(4001, -8.0, 8.0);
    OutcomeDistribution pos = position_distribution(rep, ground_state(rep), g);
    return wasserstein2(pointer, pos);
  };
  const double w40 = w2_at_dim(40);
  const double w80 = w2_at_dim(80);
  EXPECT_GT(w40, 0.1);
  EXPECT_NEAR(w40, w80, 1e-3);
  // frozen from the quadrature oracle
  EXPECT_NEAR(w40, 0.4066, 5e-3);
}

TEST(MomentsOp, PointMassAndGaussian) {
  Moments pm = moments(OutcomeDistribution::point_mass(2.5));
  EXPECT_NEAR(pm.mean, 2.5, 1e-15);
  EXPECT_NEAR(pm.variance, 0.0, 1e-15);
  OscillatorRep rep(40, 1, 1, 1);
  PositionGrid g = default_grid(rep);
  Moments gm = moments(position_distribution(rep, ground_state(rep), g));
  EXPECT_NEAR(gm.mean, 0.0, 1e-10);
  EXPECT_NEAR(gm.variance, 0.5, 1e-4);
}

// --------------------------------------------------------------------------
// C quantities

TEST(CError, SpinIdentityCouplingPureStatesZero) {
  Rng rng(19);
  ExtensionSearchConfig cfg;
  cfg.restarts = 3;
  cfg.max_iters = 60;
  for (int trial = 0; trial < 5; ++trial) {
    ComplexVector psi = rng.child(trial).unit_vector(2);
    DensityOperator rho = DensityOperator::pure(psi);
    MeasurementModel m = spin_model(SpinModelKind::IdentityCoupling, rho);
    cfg.seed = 100 + trial;
    CResult c = c_error(m, rho, cfg);
    // every extension of a pure state is a product, and with alpha = rho the
    // two correlation terms coincide
    ASSERT_NEAR(c.value, 0.0, 1e-9);
  }
}

TEST(CError, MaximallyMixedReachesSqrt2) {
  DensityOperator rho(0.5 * id(2));
  MeasurementModel m = spin_model(SpinModelKind::IdentityCoupling, rho);
  m.ready = rho;  // maximally mixed apparatus as well
  ExtensionSearchConfig cfg;
  cfg.seed = 7;
  CResult c = c_error(m, rho, cfg, {phi_plus()});
  EXPECT_NEAR(c.candidate_value, std::sqrt(2.0), 1e-12);
  EXPECT_GE(c.optimizer_value, std::sqrt(2.0) - 1e-6);
  EXPECT_LE(c.value, std::sqrt(2.0) + 1e-9);
}

TEST(CError, CandidateMarginalValidation) {
  DensityOperator rho(0.5 * id(2));
  MeasurementModel m = spin_model(SpinModelKind::IdentityCoupling, rho);
  ComplexVector bad = ComplexVector::Zero(4);
  bad(0) = 1.0;  // extends |0><0|, not I/2
  EXPECT_THROW(
      c_error(m, rho, ExtensionSearchConfig{}, {bad}), ValidationError);
}

TEST(CDisturbance, SigmaYModelAtStatedMaximizer) {
  // At the sigma_x-correlated maximally entangled extension the objective
  // evaluates to 2 (= the O disturbance; the chain C <= O is tight here).
  DensityOperator rho(0.5 * id(2));
  MeasurementModel m = spin_model(SpinModelKind::SigmaYEvolution, rho);
  const double at_max = c_value_at_pure_extension(
      m, rho, Observable::Conjugate, m.conjugate.matrix(), phi_plus(), 2);
  EXPECT_NEAR(at_max, 2.0, 1e-12);
  ExtensionSearchConfig cfg;
  cfg.seed = 11;
  CResult c = c_disturbance(m, rho, cfg, {phi_plus()});
  EXPECT_GE(c.optimizer_value, std::sqrt(2.0) - 1e-6);
  EXPECT_NEAR(c.value, 2.0, 1e-9);
  EXPECT_NEAR(o_disturbance(m, rho).value, 2.0, 1e-12);
}

TEST(CDisturbance, KorzekwaZero) {
  HermitianOperator sz(pauli_z(), "sz");
  MeasurementModel m = von_neumann_model(sz, 2, HermitianOperator(pauli_x()));
  ComplexVector up(2);
  up << 1, 0;
  ExtensionSearchConfig cfg;
  cfg.restarts = 3;
  cfg.max_iters = 60;
  cfg.seed = 5;
  CResult c = c_disturbance(m, DensityOperator::pure(up), cfg);
  EXPECT_NEAR(c.value, 0.0, 1e-9);
}

TEST(CError, AncillaRankGuard) {
  DensityOperator rho(0.5 * id(2));
  MeasurementModel m = spin_model(SpinModelKind::IdentityCoupling, rho);
  ExtensionSearchConfig cfg;
  cfg.ancilla_dim = 1;  // below rank(rho) = 2
  EXPECT_THROW(c_error(m, rho, cfg), ValidationError);
}

// --------------------------------------------------------------------------
// bound chains and covariance properties

TEST(BoundChains, RandomSpinModelsDAndCertifiedC) {
  Rng rng(2025);
  ExtensionSearchConfig cfg;
  cfg.restarts = 2;
  cfg.max_iters = 40;
  for (int trial = 0; trial < 60; ++trial) {
    Rng r = rng.child(trial);
    DensityOperator alpha(r.density(2, 2));
    DensityOperator rho(r.density(2, r.uniform() < 0.5 ? 1 : 2));
    MeasurementModel m{"random-spin",
                       2,
                       2,
                       alpha,
                       std::make_shared<DenseUnitary>(UnitaryOperator(r.unitary(4))),
                       HermitianOperator(r.hermitian(2)),
                       HermitianOperator(r.hermitian(2)),
                       HermitianOperator(r.hermitian(2)),
                       false,
                       {},
                       {},
                       {},
                       {}};
    const Ensemble e = ensemble_of(rho);
    const double o = o_error(m, e).value;
    const double d = d_error(m, e).value;
    const double od = o_disturbance(m, e).value;
    const double dd = d_disturbance(m, e).value;
    const double dx = ensemble_uncertainty(e, m.measured.matrix());
    const double dp = ensemble_uncertainty(e, m.conjugate.matrix());
    ASSERT_LE(d, o + 1e-9);
    ASSERT_LE(o, d + 2 * dx + 1e-9);
    ASSERT_LE(dd, od + 1e-9);
    ASSERT_LE(od, dd + 2 * dp + 1e-9);
    cfg.seed = 300 + trial;
    const double c = c_error(m, rho, cfg).value;
    ASSERT_LE(c, o + 1e-9);
    ASSERT_LE(c - d, 2 * dx + 1e-9);
  }
}

TEST(Covariance, PointerRecalibrationLeavesOErrorInvariant) {
  Rng rng(99);
  OscillatorRep rep(10, 1, 1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Rng r = rng.child(trial);
    MeasurementModel m = decoupled_model(rep);
    m.coupling = std::make_shared<DenseUnitary>(UnitaryOperator(r.unitary(100)));
    m.cached_final_pointer.reset();
    m.cached_final_measured.reset();
    m.cached_final_conjugate.reset();
    DensityOperator rho(r.density(10, 2));
    const double before = o_error(m, rho).value;
    // recalibrate: mu -> Ua^dag mu Ua together with U -> (I (x) Ua^dag) U
    ComplexMatrix ua = r.unitary(10);
    MeasurementModel m2 = m;
    m2.pointer = HermitianOperator(ua.adjoint() * m.pointer.matrix() * ua);
    m2.coupling = std::make_shared<DenseUnitary>(UnitaryOperator(
        tensor_product(id(10), ua.adjoint()) * m.coupling->matrix()));
    const double after = o_error(m2, rho).value;
    ASSERT_NEAR(before, after, 1e-9);
  }
}

TEST(Report, AggregatesAllSixMetrics) {
  DensityOperator rho(0.5 * id(2));
  MeasurementModel m = spin_model(SpinModelKind::IdentityCoupling, rho);
  m.ready = rho;
  ExtensionSearchConfig cfg;
  cfg.restarts = 3;
  cfg.max_iters = 80;
  cfg.seed = 21;
  MetricsReport r = metrics_report(m, rho, cfg, "maximally-mixed");
  EXPECT_NEAR(r.o_error, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.d_error, 0.0, 1e-12);
  EXPECT_GE(r.c_error, std::sqrt(2.0) - 1e-6);
  EXPECT_NEAR(r.uncertainty_x, 1.0, 1e-12);
  EXPECT_FALSE(r.truncation_flag);
}
