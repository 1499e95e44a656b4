// Decay fits, superposition and the verdict rules.

#include <doctest.h>

#include <cmath>

#include "platemem/stability_lab.hpp"
#include "support/cells.hpp"
#include "support/oracles.hpp"

using namespace platemem;

namespace {

SimulationTrace trace_of(const oracle::Samples& s) {
  SimulationTrace t;
  t.times = s.t;
  t.energy = s.e;
  for (double e : s.e) t.state_norm.push_back(std::sqrt(2.0 * e));
  t.dt = s.t.size() > 1 ? s.t[1] - s.t[0] : 0.0;
  return t;
}

RegimeReport report(RegimeLabel label) {
  RegimeReport r;
  r.predicted = label;
  r.complete = true;
  r.sweep.coarse.global = -0.5;
  r.sweep.fine.global = -0.5;
  r.sweep.coarse.global_resolved = -0.5;
  r.sweep.fine.global_resolved = -0.5;
  r.scan.sup_coarse = 2.0;
  r.scan.sup_fine = 2.05;
  ProfileResult pr;
  pr.profile = "plate_bump";
  pr.fits_ok = true;
  pr.exponential.rate = 0.51;
  pr.polynomial.rate = 0.8;
  pr.polynomial.r_squared = 0.99;
  pr.modes.push_back(ModeDecay{});
  r.profiles.push_back(pr);
  return r;
}

Verdict verdict_of(RegimeReport r) {
  apply_verdict(r);
  return r.verdict;
}

}  // namespace

TEST_CASE("exponential fit recovers an exact rate") {
  const auto t = trace_of(oracle::exponential_energy(3.0, 0.8, 0.0, 10.0, 100));
  const auto fit = fit_exponential_rate(t, 0.5);
  CHECK(fit.model == DecayModel::exponential);
  CHECK(fit.rate == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(fit.prefactor == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit.r_squared >= 1.0 - 1e-9);
  CHECK(fit.window.second == doctest::Approx(10.0));
}

TEST_CASE("constant energy has rate zero") {
  oracle::Samples s;
  for (int k = 0; k < 20; ++k) s.t.push_back(k), s.e.push_back(0.5);
  const auto fit = fit_exponential_rate(trace_of(s), 1.0);
  CHECK(std::abs(fit.rate) < 1e-15);
}

TEST_CASE("polynomial fit recovers an exact power") {
  const auto t = trace_of(oracle::power_energy(5.0, 4.0, 10.0, 1000.0, 400));
  const auto fit = fit_polynomial_rate(t);
  CHECK(fit.model == DecayModel::polynomial);
  CHECK(fit.rate == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.r_squared >= 1.0 - 1e-9);
  CHECK(fit.window.first >= 100.0 * (1.0 - 1e-12));
}

TEST_CASE("model selection by r^2") {
  const auto t = trace_of(oracle::exponential_energy(1.0, 0.05, 1.0, 200.0, 400));
  const auto e = fit_exponential_rate(t, 0.9);
  const auto p = fit_polynomial_rate(t);
  CHECK(e.r_squared > p.r_squared);
}

TEST_CASE("fits are scale-equivariant") {
  auto a = trace_of(oracle::exponential_energy(2.0, 0.3, 1.0, 50.0, 200));
  auto b = a;
  for (double& e : b.energy) e *= 7.0;
  const auto ea = fit_exponential_rate(a), eb = fit_exponential_rate(b);
  CHECK(ea.rate == doctest::Approx(eb.rate).epsilon(1e-12));
  CHECK(eb.prefactor == doctest::Approx(7.0 * ea.prefactor).epsilon(1e-10));
  const auto pa = fit_polynomial_rate(a), pb = fit_polynomial_rate(b);
  CHECK(pa.rate == doctest::Approx(pb.rate).epsilon(1e-12));
  CHECK(pb.prefactor == doctest::Approx(std::sqrt(7.0) * pa.prefactor).epsilon(1e-10));
}

TEST_CASE("fit errors") {
  CHECK_THROWS_AS(fit_exponential_rate(trace_of(oracle::exponential_energy(1, 1, 0, 1, 10)), 0.5),
                  std::invalid_argument);
  auto t = trace_of(oracle::exponential_energy(1, 1, 0, 1, 100));
  t.energy.back() = 0.0;
  CHECK_THROWS_AS(fit_exponential_rate(t), std::invalid_argument);
  // Less than one decade.
  CHECK_THROWS_AS(fit_polynomial_rate(trace_of(oracle::power_energy(1, 2, 50, 100, 100))), std::invalid_argument);
}

TEST_CASE("superposition adds energies and graph norms in quadrature") {
  auto a = trace_of(oracle::exponential_energy(1.0, 1.0, 0.0, 1.0, 11));
  auto b = trace_of(oracle::exponential_energy(2.0, 3.0, 0.0, 1.0, 11));
  a.initial_norm = 3.0, a.initial_generator_norm = 1.0;
  b.initial_norm = 4.0, b.initial_generator_norm = 1.0;
  const auto s = superpose({a, b});
  for (std::size_t k = 0; k < s.energy.size(); ++k)
    CHECK(s.energy[k] == doctest::Approx(a.energy[k] + b.energy[k]).epsilon(1e-15));
  CHECK(s.initial_norm == doctest::Approx(5.0));
  CHECK(s.graph_norm_initial == doctest::Approx(5.0 + std::sqrt(2.0)));
  auto c = trace_of(oracle::exponential_energy(1.0, 1.0, 0.0, 2.0, 11));
  CHECK_THROWS_AS(superpose({a, c}), std::invalid_argument);
}

TEST_CASE("dissipativity check reads the identity residual") {
  auto t = trace_of(oracle::exponential_energy(1.0, 1.0, 0.0, 1.0, 11));
  t.residual.assign(11, 0.0);
  CHECK(check_dissipativity(t).ok);
  t.residual[4] = 1e-6;
  CHECK_FALSE(check_dissipativity(t).ok);
  t.residual[4] = 0.0;
  t.energy[5] = t.energy[4] * 1.01;
  CHECK_FALSE(check_dissipativity(t).ok);
}

TEST_CASE("verdict contract") {
  CHECK(exit_code(Verdict::consistent) == 0);
  CHECK(exit_code(Verdict::inconsistent) == 2);
  CHECK(exit_code(Verdict::inconclusive) == 3);
  CHECK(default_t_end(RegimeLabel::ExponentialRhoDamped) == 50.0);
  CHECK(default_t_end(RegimeLabel::NotExponentialPolynomial) == 500.0);
}

TEST_CASE("exponential verdicts") {
  const auto base = report(RegimeLabel::ExponentialRhoDamped);
  CHECK(verdict_of(base) == Verdict::consistent);

  auto slow = base;
  slow.profiles[0].exponential.rate = 0.2;
  CHECK(verdict_of(slow) == Verdict::inconsistent);

  auto fast = base;
  fast.profiles[0].exponential.rate = 3.0;
  CHECK(verdict_of(fast) == Verdict::inconclusive);

  auto unbounded = base;
  unbounded.scan.sup_fine = 3.0;
  CHECK(verdict_of(unbounded) == Verdict::inconsistent);

  auto unstable = base;
  unstable.sweep.fine.global = 0.0;
  CHECK(verdict_of(unstable) == Verdict::inconsistent);

  auto partial = base;
  partial.complete = false;
  CHECK(verdict_of(partial) == Verdict::inconclusive);

  auto leaky = base;
  leaky.profiles[0].modes[0].dissipativity.ok = false;
  CHECK(verdict_of(leaky) == Verdict::inconsistent);
}

TEST_CASE("non-exponential verdicts") {
  auto r = report(RegimeLabel::NotExponentialPolynomial);
  r.sweep.coarse.global_resolved = -0.01;
  r.sweep.fine.global_resolved = -0.004;
  CHECK(verdict_of(r) == Verdict::consistent);

  auto no_shrink = r;
  no_shrink.sweep.fine.global_resolved = -0.008;
  CHECK(verdict_of(no_shrink) == Verdict::inconsistent);

  auto poor = r;
  poor.profiles[0].polynomial.r_squared = 0.9;
  CHECK(verdict_of(poor) == Verdict::inconsistent);

  auto rough_only = r;
  rough_only.profiles[0].smooth = false;
  CHECK(verdict_of(rough_only) == Verdict::inconclusive);

  // No polynomial claim without the geometric condition.
  auto geo = r;
  geo.predicted = RegimeLabel::NotExponentialGeometryFails;
  geo.profiles[0].polynomial.r_squared = 0.1;
  CHECK(verdict_of(geo) == Verdict::consistent);
}

TEST_CASE("strong-only cell is never refuted by stability evidence") {
  auto r = report(RegimeLabel::StrongOnlyUnproven);
  r.sweep.fine.global = 0.0;
  r.scan.sup_fine = 1e9;
  r.profiles[0].exponential.rate = 0.0;
  CHECK(verdict_of(r) == Verdict::consistent);
}

TEST_CASE("small exponential experiment end to end") {
  LabSettings s;
  s.resolution = {16, 16};
  s.mode_max = 2;
  s.threads = 2;
  const auto r = run_regime_experiment(cells::with(1, 1, 0), AnnulusGeometry{}, s);
  CHECK(r.complete);
  CHECK(r.predicted == RegimeLabel::ExponentialRhoDamped);
  CHECK(r.profiles.size() == 2);
  CHECK(r.profiles[0].modes.size() == 3);
  CHECK(r.t_end == 50.0);
  CHECK(r.verdict == Verdict::consistent);
}

TEST_CASE("experiment result does not depend on the thread count") {
  LabSettings s;
  s.resolution = {10, 10};
  s.mode_max = 2;
  s.t_end = 5.0;
  s.profiles = {InitialProfile{ProfileKind::rough, 4, 0}};
  s.threads = 1;
  const auto a = run_regime_experiment(cells::with(0, 1, 0), AnnulusGeometry{}, s);
  s.threads = 3;
  const auto b = run_regime_experiment(cells::with(0, 1, 0), AnnulusGeometry{}, s);
  CHECK(a.profiles[0].exponential.rate == b.profiles[0].exponential.rate);
  CHECK(a.profiles[0].polynomial.rate == b.profiles[0].polynomial.rate);
  CHECK(a.scan.sup_fine == b.scan.sup_fine);
  CHECK(a.verdict == b.verdict);
}
