// Acceptance suite: every release criterion evaluated at its stated
// tolerance, one printed PASS/FAIL line per criterion. Two sub-assertions of
// criterion 3 pin quoted values that the faithful definitions do not
// reproduce (the identity-coupling operator error equals sqrt(2) times the
// sigma_z uncertainty, and the sigma-y correlation disturbance evaluates to 2
// at its stated maximizer); they are asserted as stated and left to fail
// rather than weakened, with the computed values printed alongside.

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qmet/report.hpp"

using namespace qmet;

namespace {

struct Criterion {
  int index;
  std::string title;
  int failed = 0;
  int total = 0;

  Criterion(int i, std::string t) : index(i), title(std::move(t)) {}
  ~Criterion() {
    std::printf("[CRITERION %d] %s — %s (%d/%d checks)\n", index,
                failed == 0 ? "PASS" : "FAIL", title.c_str(), total - failed,
                total);
    std::fflush(stdout);
  }
  void check(const std::string& name, bool ok) {
    ++total;
    if (!ok) ++failed;
    EXPECT_TRUE(ok) << name;
  }
  void check_le(const std::string& name, double value, double bound) {
    check(name + " (" + format_double(value) + " <= " + format_double(bound) +
              ")",
          value <= bound);
  }
  void check_near(const std::string& name, double value, double want,
                  double tolerance) {
    check(name + " (" + format_double(value) + " ~ " + format_double(want) +
              " +- " + format_double(tolerance) + ")",
          std::abs(value - want) <= tolerance);
  }
};

RunSettings default_settings() {
  RunSettings s;
  s.dim = 60;
  s.seed = 7;
  return s;
}

const Assertion& find_assertion(const ScenarioResult& r,
                                const std::string& claim) {
  for (const auto& a : r.assertions)
    if (a.claim_ref == claim) return a;
  throw std::runtime_error("missing assertion " + claim);
}

double quantity(const ScenarioResult& r, const std::string& name) {
  for (const auto& q : r.quantities)
    if (q.name == name) return q.value;
  throw std::runtime_error("missing quantity " + name);
}

}  // namespace

TEST(Acceptance, Criterion1RotationCounterexample) {
  Criterion c(1, "rotation counterexample at dim 40");
  OscillatorRep rep(40, 1, 1, 1);
  MeasurementModel rot = rotation_model(rep);
  JointMeasurementModel joint = idle_joint_model(rep);
  Ensemble ground{{1.0, ground_state(rep)}};
  c.check_le("ground-pair error", o_error(rot, ground).value, 1e-6);
  c.check_near("ground-pair disturbance", o_disturbance(rot, ground).value,
               1.0, 1e-5);
  StateFamily family(rep, DensityOperator::pure(ground_state(rep)),
                     RegionSpec(4.0, 4.0, 5, 5), false);
  auto members = enumerate_family(family);
  c.check("family has 25 members", members.size() == 25);
  for (const auto& mem : members) {
    const double ex = o_error(rot, mem.state).value;
    const double ep = o_error(joint.p_branch, mem.state).value;
    c.check_le("member " + mem.id + " error", ex, 1e-6);
    c.check_le("member " + mem.id + " error-error product", ex * ep,
               0.5 - 1e-12);
  }
}

TEST(Acceptance, Criterion2SharpOscillatorMeasurement) {
  Criterion c(2, "sharp shifted-oscillator measurement at dim 60");
  RunSettings s = default_settings();
  ScenarioResult r = run_example7(s);
  c.check_le("zero operator error", quantity(r, "o_error_ground"), 1e-8);
  c.check("pointer support at half-integers",
          find_assertion(r, "pointer-support-half-integers").pass);
  c.check("pointer weights follow the Poisson(1/2) law",
          find_assertion(r, "pointer-weights-poisson-half").pass);
  c.check_near("pointer mean", quantity(r, "pointer_mean"), 0.0, 1e-8);
  c.check_near("position mean", quantity(r, "position_mean"), 0.0, 1e-8);
  c.check_near("pointer variance", quantity(r, "pointer_variance"), 0.5, 1e-6);
  c.check_near("position variance", quantity(r, "position_variance"), 0.5,
               1e-6);
  const double w2_60 = quantity(r, "wasserstein2");
  c.check("transport distance strictly positive", w2_60 > 1e-3);
  RunSettings s80 = s;
  s80.dim = 80;
  ScenarioResult r80 = run_example7(s80);
  c.check_near("transport distance stable from dim 60 to 80", w2_60,
               quantity(r80, "wasserstein2"), 1e-3);
}

TEST(Acceptance, Criterion3SpinSuite) {
  Criterion c(3, "spin suite");
  RunSettings s = default_settings();
  ScenarioResult r = run_spin_suite(s);
  // criterion text pins these values; two of them are not attainable from
  // the faithful definitions (see the scenario notes and the suite header)
  c.check_near("identity-coupling operator error at |+x> equals 1",
               quantity(r, "plusx_o_error"), 1.0, 1e-12);
  c.check_near("identity-coupling deviation error at |+x> is 0",
               quantity(r, "plusx_d_error"), 0.0, 1e-12);
  c.check_near("identity-coupling correlation error at |+x> is 0",
               quantity(r, "plusx_c_error"), 0.0, 1e-12);
  c.check("maximally mixed correlation error sqrt(2) at the maximizer",
          find_assertion(r, "mixed-c-error-sqrt2-at-maximizer").pass);
  c.check("maximally mixed optimizer reaches sqrt(2) - 1e-6",
          find_assertion(r, "mixed-c-error-optimizer-reaches-sqrt2").pass);
  c.check_near("maximally mixed deviation error is 0",
               quantity(r, "mixed_d_error"), 0.0, 1e-12);
  c.check("sigma-y correlation disturbance sqrt(2) at the maximizer",
          find_assertion(r, "sigy-c-disturbance-sqrt2-at-maximizer").pass);
  c.check("sigma-y optimizer reaches sqrt(2) - 1e-6",
          find_assertion(r, "sigy-c-disturbance-optimizer-reaches-sqrt2").pass);
  c.check_near("sigma-y deviation disturbance is 0",
               quantity(r, "sigy_d_disturbance"), 0.0, 1e-12);
  c.check("projective-readout operator disturbance positive",
          quantity(r, "korzekwa_o_disturbance") > 0.0);
  c.check_near("projective-readout deviation disturbance is 0",
               quantity(r, "korzekwa_d_disturbance"), 0.0, 1e-12);
  c.check_near("projective-readout correlation disturbance is 0",
               quantity(r, "korzekwa_c_disturbance"), 0.0, 1e-12);
  c.check_le("chained-pointer identity over 20 random pure states",
             quantity(r, "double_measurement_identity_max_dev"), 1e-12);
  std::printf(
      "  computed values: plusx_o_error = %s (sqrt(2) * Delta sigma_z), "
      "sigy_c_disturbance = %s (= O disturbance, chain tight)\n",
      format_double(quantity(r, "plusx_o_error")).c_str(),
      format_double(quantity(r, "sigy_c_disturbance")).c_str());
}

TEST(Acceptance, Criterion4InequalitySweeps) {
  Criterion c(4, "state-dependent and restricted relations over seeded populations");
  RunSettings s = default_settings();
  SweepCounts counts;  // 1000 ED + 1000 EE pairs, 50 closure families
  ScenarioResult r = run_inequality_sweeps(s, counts);
  c.check("error-disturbance relation min slack >= -1e-9",
          find_assertion(r, "ozawa-error-disturbance-universal").pass);
  c.check("error-error relation min slack >= -1e-9",
          find_assertion(r, "ozawa-error-error-universal").pass);
  c.check("restricted relations hold on 50 closure families",
          find_assertion(r, "restricted-relations-hold-on-closure-families")
              .pass);
  c.check("supremum form weaker on the large box",
          find_assertion(r, "sup-form-weaker-on-large-box").pass);
  c.check("supremum form stronger on the small box",
          find_assertion(r, "sup-form-stronger-on-small-box").pass);
}

TEST(Acceptance, Criterion5BoundChains) {
  Criterion c(5, "deviation/correlation bound chains");
  Rng rng(7);
  ExtensionSearchConfig opt;
  opt.restarts = 2;
  opt.max_iters = 40;
  // spin population: exact deviation chains plus the certified correlation
  // directions on every member
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 1000; ++trial) {
    Rng child = rng.child(trial);
    MeasurementModel m = sweeps::random_spin_model(child);
    DensityOperator rho(child.density(2, child.uniform() < 0.5 ? 1 : 2));
    const Ensemble e = ensemble_of(rho);
    const double o = o_error(m, e).value;
    const double d = d_error(m, e).value;
    const double od = o_disturbance(m, e).value;
    const double dd = d_disturbance(m, e).value;
    const double dx = ensemble_uncertainty(e, m.measured.matrix());
    const double dp = ensemble_uncertainty(e, m.conjugate.matrix());
    worst = std::min({worst, o - d, d + 2 * dx - o, od - dd, dd + 2 * dp - od});
    opt.seed = 900000 + trial;
    const double ce = c_error(m, rho, opt).value;
    const double cd = c_disturbance(m, rho, opt).value;
    worst = std::min({worst, o - ce, 2 * dx - (ce - d), od - cd,
                      2 * dp - (cd - dd)});
  }
  c.check("1000 spin models: chains hold within 1e-9", worst >= -1e-9);
  // oscillator population
  OscillatorRep rep(10, 1, 1, 1);
  double worst_osc = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 200; ++trial) {
    Rng child = rng.child(700000 + trial);
    MeasurementModel m = sweeps::random_quadratic_model(rep, child);
    ComplexVector psi = sweeps::random_low_state(rep, child);
    const Ensemble e{{1.0, psi}};
    const double o = o_error(m, e).value;
    const double d = d_error(m, e).value;
    const double od = o_disturbance(m, e).value;
    const double dd = d_disturbance(m, e).value;
    const double dx = ensemble_uncertainty(e, m.measured.matrix());
    const double dp = ensemble_uncertainty(e, m.conjugate.matrix());
    worst_osc =
        std::min({worst_osc, o - d, d + 2 * dx - o, od - dd, dd + 2 * dp - od});
    opt.seed = 910000 + trial;
    const double ce = c_error(m, DensityOperator::pure(psi), opt).value;
    worst_osc = std::min({worst_osc, o - ce, 2 * dx - (ce - d)});
  }
  c.check("200 oscillator models: chains hold within 1e-9", worst_osc >= -1e-9);
  // two-sided correlation chains at the exactly-evaluated maximizers
  {
    ComplexVector phi_plus = ComplexVector::Zero(4);
    phi_plus(0) = phi_plus(3) = 1.0 / std::sqrt(2.0);
    DensityOperator mixed(0.5 * id(2));
    MeasurementModel busch = spin_model(SpinModelKind::IdentityCoupling, mixed);
    busch.ready = mixed;
    const double o = o_error(busch, mixed).value;
    const double d = d_error(busch, mixed).value;
    const double dx = 1.0;
    const double ce = c_value_at_pure_extension(
        busch, mixed, Observable::Pointer, busch.measured.matrix(), phi_plus, 2);
    c.check("maximizer chain: c <= o", ce <= o + 1e-9);
    c.check("maximizer chain: o <= c + 2 dx", o <= ce + 2 * dx + 1e-9);
    c.check("maximizer chain: |c - d| <= 2 dx",
            std::abs(ce - d) <= 2 * dx + 1e-9);
    MeasurementModel sigy = spin_model(SpinModelKind::SigmaYEvolution, mixed);
    const double od = o_disturbance(sigy, mixed).value;
    const double dd = d_disturbance(sigy, mixed).value;
    const double dp = 1.0;
    const double cd = c_value_at_pure_extension(
        sigy, mixed, Observable::Conjugate, sigy.conjugate.matrix(), phi_plus,
        2);
    c.check("maximizer chain: c_dist <= o_dist", cd <= od + 1e-9);
    c.check("maximizer chain: o_dist <= c_dist + 2 dp", od <= cd + 2 * dp + 1e-9);
    c.check("maximizer chain: |c_dist - d_dist| <= 2 dp",
            std::abs(cd - dd) <= 2 * dp + 1e-9);
  }
}

TEST(Acceptance, Criterion6ClassicalBridge) {
  Criterion c(6, "classical transition-kernel bridge, 200 kernels on 21x21 grids");
  RunSettings s = default_settings();
  ScenarioResult r = run_classical_bridge(s, 200);
  c.check_le("variational and pointwise definitions agree",
             quantity(r, "max_definition_gap"), 1e-9);
  c.check("supremum attained at a point mass",
          find_assertion(r, "supremum-attained-at-point-mass").pass);
}

TEST(Acceptance, Criterion7AnalyticMachinery) {
  Criterion c(7, "derivative identities, commutator identity, divergence theorem");
  OscillatorRep rep(40, 1, 1, 1);
  Ensemble fid{{1.0, ground_state(rep)}};
  {
    MeasurementModel dm = decoupled_model(rep);
    const ComplexMatrix x1 = heisenberg_initial(dm, Observable::Measured);
    const ComplexMatrix x3 = x1 * x1 * x1;
    std::vector<double> errs;
    for (double h : {2e-2, 1e-2, 5e-3}) {
      DerivativeCheck d = derivative_identity_check(dm, fid, x3, 0.7, -0.3, h);
      errs.push_back(std::abs(d.fd_x - d.analytic_x));
    }
    const double r1 = errs[0] / errs[1];
    const double r2 = errs[1] / errs[2];
    c.check("derivative identity halving ratio in [3.5, 4.5] (first halving)",
            r1 >= 3.5 && r1 <= 4.5);
    c.check("derivative identity halving ratio in [3.5, 4.5] (second halving)",
            r2 >= 3.5 && r2 <= 4.5);
  }
  {
    MeasurementModel m = rotation_model(rep);
    DivergenceCheck d = divergence_check(m, fid, RegionSpec(6.0, 6.0, 33, 33));
    c.check_le("commutator identity residual on interior grid points",
               d.interior_identity_residual, 1e-6);
    c.check_le("volume/boundary agreement on the 6x6 box",
               d.relative_error, 1e-4);
    c.check("restricted chain reproduced line by line", d.chain_ordered);
  }
}

TEST(Acceptance, Criterion8Determinism) {
  Criterion c(8, "verify with seed 7 produces byte-identical bundles");
  namespace fs = std::filesystem;
  RunConfig cfg;
  cfg.seed = 7;
  auto run_bundle = [&](const std::string& dir) {
    fs::remove_all(dir);
    auto results = run_all_scenarios(cfg.settings());
    return write_bundle(results, cfg, dir);
  };
  const std::string d1 = (fs::temp_directory_path() / "qmet_verify_a").string();
  const std::string d2 = (fs::temp_directory_path() / "qmet_verify_b").string();
  ReportBundle b1 = run_bundle(d1);
  ReportBundle b2 = run_bundle(d2);
  c.check("content hashes equal", b1.content_hash == b2.content_hash);
  c.check("file lists equal", b1.files == b2.files);
  bool all_equal = true;
  for (const auto& f : b1.files) {
    std::ifstream in1(fs::path(d1) / f, std::ios::binary);
    std::ifstream in2(fs::path(d2) / f, std::ios::binary);
    std::ostringstream s1, s2;
    s1 << in1.rdbuf();
    s2 << in2.rdbuf();
    all_equal = all_equal && s1.str() == s2.str();
  }
  c.check("every emitted file byte-identical", all_equal);
}
