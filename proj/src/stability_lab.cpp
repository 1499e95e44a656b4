// SPDX-License-Identifier: Apache-2.0

#include "platemem/stability_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>

#include "platemem/parallel.hpp"

namespace platemem {

namespace {

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[192];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool is_smooth(const InitialProfile& p) { return p.kind != ProfileKind::rough || p.smoothing > 0; }

// Keeps what the superposition and the fits read; the per-step components
// and channels of long runs would otherwise dominate memory.
SimulationTrace slim(SimulationTrace t) {
  t.energy_components.clear();
  t.energy_components.shrink_to_fit();
  t.dissipation.clear();
  t.dissipation.shrink_to_fit();
  t.residual.clear();
  t.residual.shrink_to_fit();
  return t;
}

}  // namespace

std::string_view to_string(DecayModel m) { return m == DecayModel::exponential ? "exponential" : "polynomial"; }

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::inconsistent: return "inconsistent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::consistent: return 0;
    case Verdict::inconsistent: return 2;
    case Verdict::inconclusive: return 3;
  }
  return 3;
}

double default_t_end(RegimeLabel label) { return is_exponential(label) ? 50.0 : 500.0; }

DecayFit fit_exponential_rate(const SimulationTrace& trace, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw std::invalid_argument("fit_exponential_rate: tail_fraction must lie in (0, 1]");
  const std::size_t n = trace.times.size();
  if (trace.energy.size() != n) throw std::invalid_argument("fit_exponential_rate: ragged trace");
  const auto count = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
  if (count < kMinFitSamples) throw std::invalid_argument("fit_exponential_rate: fewer than 8 samples in the window");
  const std::size_t first = n - count;
  std::vector<double> x, y;
  x.reserve(count);
  y.reserve(count);
  for (std::size_t k = first; k < n; ++k) {
    if (!(trace.energy[k] > 0.0))
      throw std::invalid_argument("fit_exponential_rate: nonpositive energy in the window");
    x.push_back(trace.times[k]);
    y.push_back(std::log(trace.energy[k]));
  }
  const LineFit line = least_squares_line(x, y);
  DecayFit fit;
  fit.model = DecayModel::exponential;
  fit.rate = -0.5 * line.slope;
  fit.prefactor = std::exp(line.intercept);
  fit.r_squared = line.r_squared;
  fit.window = {x.front(), x.back()};
  return fit;
}

DecayFit fit_polynomial_rate(const SimulationTrace& trace) {
  const std::size_t n = trace.times.size();
  if (trace.energy.size() != n || n == 0) throw std::invalid_argument("fit_polynomial_rate: empty or ragged trace");
  const double t_end = trace.times.back();
  const double t_lo = t_end / 10.0;
  if (!(t_end > 0.0) || trace.times.front() > t_lo * (1.0 + 1e-12))
    throw std::invalid_argument("fit_polynomial_rate: window shorter than one decade");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < n; ++k) {
    if (trace.times[k] < t_lo * (1.0 - 1e-12)) continue;
    if (!(trace.energy[k] > 0.0)) throw std::invalid_argument("fit_polynomial_rate: nonpositive energy in the window");
    x.push_back(std::log(trace.times[k]));
    y.push_back(0.5 * std::log(2.0 * trace.energy[k]));
  }
  if (x.size() < kMinFitSamples) throw std::invalid_argument("fit_polynomial_rate: fewer than 8 samples in the window");
  const LineFit line = least_squares_line(x, y);
  DecayFit fit;
  fit.model = DecayModel::polynomial;
  fit.rate = -line.slope;
  fit.prefactor = std::exp(line.intercept);
  fit.r_squared = line.r_squared;
  fit.window = {std::exp(x.front()), std::exp(x.back())};
  fit.graph_norm = trace.graph_norm_initial;
  fit.normalized_prefactor = fit.graph_norm > 0.0 ? fit.prefactor / fit.graph_norm : 0.0;
  return fit;
}

SimulationTrace superpose(const std::vector<SimulationTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("superpose: no traces");
  const SimulationTrace& first = traces.front();
  const std::size_t n = first.times.size();
  for (const auto& t : traces) {
    if (t.times.size() != n || t.energy.size() != n) throw std::invalid_argument("superpose: time grids differ");
    for (std::size_t k = 0; k < n; ++k)
      if (t.times[k] != first.times[k]) throw std::invalid_argument("superpose: time grids differ");
  }
  auto all_sized = [&](auto member) {
    return std::all_of(traces.begin(), traces.end(), [&](const SimulationTrace& t) { return (t.*member).size() == n; });
  };

  SimulationTrace out;
  out.mode = first.mode;
  out.dt = first.dt;
  out.times = first.times;
  out.energy.assign(n, 0.0);
  const bool comps = all_sized(&SimulationTrace::energy_components);
  const bool chans = all_sized(&SimulationTrace::dissipation);
  const bool resid = all_sized(&SimulationTrace::residual);
  if (comps) out.energy_components.assign(n, {});
  if (chans) out.dissipation.assign(n, {});
  if (resid) out.residual.assign(n, 0.0);
  double g0 = 0.0, g1 = 0.0;
  for (const auto& t : traces) {
    for (std::size_t k = 0; k < n; ++k) {
      out.energy[k] += t.energy[k];
      if (comps)
        for (std::size_t c = 0; c < 6; ++c) out.energy_components[k][c] += t.energy_components[k][c];
      if (chans)
        for (std::size_t c = 0; c < 4; ++c) out.dissipation[k][c] += t.dissipation[k][c];
      if (resid) out.residual[k] += t.residual[k];
    }
    g0 += t.initial_norm * t.initial_norm;
    g1 += t.initial_generator_norm * t.initial_generator_norm;
    out.initial_energy += t.initial_energy;
  }
  out.state_norm.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.state_norm[k] = std::sqrt(2.0 * std::max(0.0, out.energy[k]));
  out.initial_norm = std::sqrt(g0);
  out.initial_generator_norm = std::sqrt(g1);
  out.graph_norm_initial = out.initial_norm + out.initial_generator_norm;
  return out;
}

DissipativityCheck check_dissipativity(const SimulationTrace& trace) {
  DissipativityCheck check;
  if (trace.energy.empty()) return check;
  const double e0 = trace.energy.front();
  if (!(e0 > 0.0)) return check;
  for (std::size_t k = 1; k < trace.residual.size(); ++k)
    check.max_residual = std::max(check.max_residual, std::abs(trace.residual[k]) * trace.dt / e0);
  for (std::size_t k = 1; k < trace.energy.size(); ++k)
    check.max_increase = std::max(check.max_increase, (trace.energy[k] - trace.energy[k - 1]) / e0);
  check.ok = check.max_residual <= kEnergyIdentityTol && check.max_increase <= kEnergyIdentityTol;
  return check;
}

void apply_verdict(RegimeReport& r) {
  auto& why = r.explanation;
  if (!r.complete) {
    r.verdict = Verdict::inconclusive;
    why.push_back("report incomplete: verdict withheld");
    return;
  }
  for (const auto& prof : r.profiles)
    for (const auto& m : prof.modes)
      if (!m.dissipativity.ok) {
        r.verdict = Verdict::inconsistent;
        why.push_back(fmt("energy identity or monotonicity violated (residual %.3g, increase %.3g)",
                          m.dissipativity.max_residual, m.dissipativity.max_increase));
        return;
      }
  why.push_back("energy identity and monotonicity hold for every simulated mode");

  const double a_coarse = r.sweep.coarse.global;
  const double a_fine = r.sweep.fine.global;

  if (r.predicted == RegimeLabel::StrongOnlyUnproven) {
    r.verdict = Verdict::consistent;
    why.push_back(fmt("no decay rate is predicted; abscissa %.6g (coarse), %.6g (fine) reported only", a_coarse, a_fine));
    return;
  }

  if (is_exponential(r.predicted)) {
    if (!(a_coarse < 0.0 && a_fine < 0.0)) {
      r.verdict = Verdict::inconsistent;
      why.push_back(fmt("spectral abscissa not negative: %.6g (coarse), %.6g (fine)", a_coarse, a_fine));
      return;
    }
    why.push_back(fmt("spectral abscissa %.6g (coarse), %.6g (fine)", a_coarse, a_fine));
    const double s0 = r.scan.sup_coarse, s1 = r.scan.sup_fine;
    if (!(std::abs(s1 - s0) <= kRelativeAgreement * s0)) {
      r.verdict = Verdict::inconsistent;
      why.push_back(fmt("resolvent sup changes under refinement: %.6g -> %.6g", s0, s1));
      return;
    }
    why.push_back(fmt("resolvent sup bounded under refinement: %.6g -> %.6g", s0, s1));

    const double target = std::abs(a_coarse);
    double slowest = std::numeric_limits<double>::infinity();
    std::string slowest_name;
    for (const auto& prof : r.profiles) {
      if (!prof.fits_ok) {
        r.verdict = Verdict::inconclusive;
        why.push_back("exponential fit failed for profile " + prof.profile);
        return;
      }
      const double rate = prof.exponential.rate;
      why.push_back(fmt("fitted energy decay rate %.6g (r^2 %.6g) for ", rate, prof.exponential.r_squared) + prof.profile);
      // Decay slower than the abscissa allows contradicts the spectrum.
      if (rate < (1.0 - kRelativeAgreement) * target) {
        r.verdict = Verdict::inconsistent;
        why.push_back(fmt("profile decays slower than |abscissa| = %.6g permits", target));
        return;
      }
      if (rate < slowest) {
        slowest = rate;
        slowest_name = prof.profile;
      }
    }
    if (r.profiles.empty()) {
      r.verdict = Verdict::inconclusive;
      why.push_back("no profiles simulated");
      return;
    }
    if (slowest > (1.0 + kRelativeAgreement) * target) {
      r.verdict = Verdict::inconclusive;
      why.push_back(fmt("slowest rate %.6g exceeds |abscissa| %.6g: no profile excites the slowest mode", slowest, target));
      return;
    }
    r.verdict = Verdict::consistent;
    why.push_back(fmt("slowest rate %.6g within 10%% of |abscissa| %.6g", slowest, target) + " (" + slowest_name + ")");
    return;
  }

  // Not exponentially stable.
  const double c = r.sweep.coarse.global_resolved, f = r.sweep.fine.global_resolved;
  const double shrink = r.sweep.shrink_ratio();
  if (!(shrink >= kShrinkFactor)) {
    r.verdict = Verdict::inconsistent;
    why.push_back(fmt("resolved abscissa does not approach 0: %.6g -> %.6g (ratio %.3g)", c, f, shrink));
    return;
  }
  why.push_back(fmt("resolved abscissa approaches 0: %.6g -> %.6g (ratio %.3g)", c, f, shrink));
  why.push_back(fmt("resolvent growth exponent %.4g (coarse), %.4g (fine)", r.scan.growth_coarse, r.scan.growth_fine));

  if (r.predicted == RegimeLabel::NotExponentialPolynomial) {
    int smooth = 0;
    for (const auto& prof : r.profiles) {
      if (!prof.smooth) continue;
      ++smooth;
      if (!prof.fits_ok) {
        r.verdict = Verdict::inconclusive;
        why.push_back("polynomial fit failed for profile " + prof.profile);
        return;
      }
      const auto& pf = prof.polynomial;
      why.push_back(fmt("polynomial rate %.6g (r^2 %.6g) for ", pf.rate, pf.r_squared) + prof.profile);
      if (!(pf.rate > 0.0 && pf.r_squared >= kMinPolynomialRSquared)) {
        r.verdict = Verdict::inconsistent;
        why.push_back("smooth data does not decay polynomially");
        return;
      }
    }
    if (smooth == 0) {
      r.verdict = Verdict::inconclusive;
      why.push_back("no smooth profile simulated: polynomial decay not tested");
      return;
    }
  }
  r.verdict = Verdict::consistent;
}

RegimeReport run_regime_experiment(const PhysicalParams& p, const AnnulusGeometry& g, const LabSettings& s) {
  validate_params(p, g);
  if (s.mode_min < 0 || s.mode_max < s.mode_min) throw std::invalid_argument("run_regime_experiment: bad mode range");
  if (s.profiles.empty()) throw std::invalid_argument("run_regime_experiment: no profiles");

  RegimeReport r;
  r.predicted = classify_regime(p, g);
  r.geometry = check_geometric_condition(g);
  r.dt = s.dt > 0.0 ? s.dt : default_time_step(p, g, s.resolution.n_plate, s.resolution.n_mem);
  r.t_end = s.t_end > 0.0 ? s.t_end : default_t_end(r.predicted);
  const unsigned threads = s.threads > 0 ? s.threads : worker_count();

  try {
    r.sweep = spectral_abscissa_sweep(p, g, s.resolution, s.mode_max, s.mode_min);

    const int n_coarse = s.mode_max - s.mode_min + 1;
    std::vector<ModePencil> pencils(static_cast<std::size_t>(n_coarse));
    std::vector<int> coarse_modes(pencils.size());
    parallel_for(pencils.size(), threads, [&](std::size_t i) {
      const int mode = s.mode_min + static_cast<int>(i);
      coarse_modes[i] = mode;
      pencils[i] = assemble_mode_pencil(p, build_radial_grid(g, s.resolution.n_plate, s.resolution.n_mem, mode));
    });

    // Resolvent scans at both levels of the sweep.
    {
      std::vector<ResolventEvaluator> evals;
      evals.reserve(pencils.size());
      for (const auto& pc : pencils) evals.emplace_back(pc);
      r.scan.lambda_max_coarse = mode_truncation_frequency(p, g, s.mode_max);
      const auto scan = resolvent_scan(evals, coarse_modes, 0.0, r.scan.lambda_max_coarse, s.scan_samples);
      r.scan.sup_coarse = scan.sup_norm;
      r.scan.growth_coarse = scan.growth_exponent;
      r.scan.graph_growth_coarse = scan.graph_growth_exponent;
    }
    {
      const int fine_max = 2 * s.mode_max;
      const std::size_t n_fine = static_cast<std::size_t>(fine_max - s.mode_min + 1);
      std::vector<std::unique_ptr<ResolventEvaluator>> built(n_fine);
      parallel_for(n_fine, threads, [&](std::size_t i) {
        const int mode = s.mode_min + static_cast<int>(i);
        const ModePencil pc = assemble_mode_pencil(
            p, build_radial_grid(g, 2 * s.resolution.n_plate, 2 * s.resolution.n_mem, mode));
        built[i] = std::make_unique<ResolventEvaluator>(pc);
      });
      std::vector<ResolventEvaluator> evals;
      std::vector<int> modes;
      for (std::size_t i = 0; i < n_fine; ++i) {
        evals.push_back(std::move(*built[i]));
        modes.push_back(s.mode_min + static_cast<int>(i));
      }
      r.scan.lambda_max_fine = mode_truncation_frequency(p, g, fine_max);
      const auto scan = resolvent_scan(evals, modes, 0.0, r.scan.lambda_max_fine, s.scan_samples);
      r.scan.sup_fine = scan.sup_norm;
      r.scan.growth_fine = scan.growth_exponent;
      r.scan.graph_growth_fine = scan.graph_growth_exponent;
    }

    // Simulations: every (profile, mode) pair, reduced in task order.
    const std::size_t n_prof = s.profiles.size();
    const std::size_t n_tasks = n_prof * pencils.size();
    std::vector<ModeDecay> decays(n_tasks);
    std::vector<SimulationTrace> slims(n_tasks);
    parallel_for(n_tasks, threads, [&](std::size_t t) {
      const std::size_t pi = t / pencils.size(), mi = t % pencils.size();
      const StateVector w0 = make_initial_data(pencils[mi], s.profiles[pi]);
      SimulationTrace trace = simulate(pencils[mi], w0, r.dt, r.t_end);
      ModeDecay& d = decays[t];
      d.mode = pencils[mi].mode;
      d.dissipativity = check_dissipativity(trace);
      d.final_energy = trace.energy.back();
      try {
        d.exponential = fit_exponential_rate(trace, s.tail_fraction);
      } catch (const std::invalid_argument&) {
        // Energy underflow in the tail; the superposed fit decides.
        d.exponential.rate = std::numeric_limits<double>::quiet_NaN();
      }
      slims[t] = slim(std::move(trace));
    });

    for (std::size_t pi = 0; pi < n_prof; ++pi) {
      ProfileResult pr;
      pr.profile = profile_name(s.profiles[pi]);
      pr.smooth = is_smooth(s.profiles[pi]);
      std::vector<SimulationTrace> parts;
      for (std::size_t mi = 0; mi < pencils.size(); ++mi) {
        const std::size_t t = pi * pencils.size() + mi;
        pr.modes.push_back(decays[t]);
        parts.push_back(std::move(slims[t]));
      }
      const SimulationTrace total = superpose(parts);
      parts.clear();
      try {
        pr.exponential = fit_exponential_rate(total, s.tail_fraction);
        pr.polynomial = fit_polynomial_rate(total);
        pr.fits_ok = true;
      } catch (const std::invalid_argument& e) {
        r.explanation.push_back("fit failed for " + pr.profile + ": " + e.what());
      }
      r.profiles.push_back(std::move(pr));
    }
    r.complete = true;
  } catch (const std::exception& e) {
    r.explanation.push_back(std::string("experiment aborted: ") + e.what());
    r.complete = false;
  }
  apply_verdict(r);
  return r;
}

}  // namespace platemem
