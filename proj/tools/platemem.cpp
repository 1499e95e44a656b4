// SPDX-License-Identifier: Apache-2.0
//
// platemem: command-line front end for the plate / membrane transmission lab.

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "platemem/discretization.hpp"
#include "platemem/model.hpp"
#include "platemem/parallel.hpp"
#include "platemem/run_config.hpp"
#include "platemem/semigroup.hpp"
#include "platemem/spectral.hpp"
#include "platemem/stability_lab.hpp"

namespace fs = std::filesystem;
using namespace platemem;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
    out_ << header << '\n';
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) out_ << ',';
      out_ << num(v);
      first = false;
    }
    out_ << '\n';
  }
  std::ofstream& stream() { return out_; }

 private:
  std::ofstream out_;
};

struct Context {
  RunConfig config;
  fs::path out;
  unsigned threads = 1;
  std::vector<int> modes;

  ModePencil pencil(int mode) const {
    return assemble_mode_pencil(
        config.params, build_radial_grid(config.geometry, config.resolution.n_plate, config.resolution.n_mem, mode));
  }
  double dt() const {
    return config.dt > 0.0 ? config.dt
                           : default_time_step(config.params, config.geometry, config.resolution.n_plate,
                                               config.resolution.n_mem);
  }
  double t_end() const {
    return config.t_end > 0.0 ? config.t_end : default_t_end(classify_regime(config.params, config.geometry));
  }
};

Context load(const std::string& path) {
  Context c;
  c.config = load_config(path);
  validate_config(c.config);
  c.out = c.config.output_dir;
  fs::create_directories(c.out);
  c.threads = worker_count();
  for (int n = c.config.mode_min; n <= c.config.mode_max; ++n) c.modes.push_back(n);
  return c;
}

std::string mode_file(const char* stem, int mode) { return std::string(stem) + std::to_string(mode) + ".csv"; }

int cmd_simulate(const std::string& path, int stride) {
  const Context c = load(path);
  if (stride < 1) throw std::invalid_argument("--stride must be positive");
  const InitialProfile profile = c.config.initial_profiles().front();
  const double dt = c.dt(), t_end = c.t_end();
  std::vector<DissipativityCheck> checks(c.modes.size());
  std::vector<double> final_energy(c.modes.size());
  parallel_for(c.modes.size(), c.threads, [&](std::size_t i) {
    const ModePencil pc = c.pencil(c.modes[i]);
    const SimulationTrace tr = simulate(pc, make_initial_data(pc, profile), dt, t_end);
    checks[i] = check_dissipativity(tr);
    final_energy[i] = tr.energy.back();
    std::string header = "t,energy";
    for (auto n : kEnergyComponentNames) header += "," + std::string(n);
    for (auto n : kDissipationChannelNames) header += "," + std::string(n);
    header += ",residual";
    Csv csv(c.out / mode_file("trace_mode", c.modes[i]), header);
    for (std::size_t k = 0; k < tr.times.size(); k += static_cast<std::size_t>(stride)) {
      const auto& e = tr.energy_components[k];
      const auto& d = tr.dissipation[k];
      csv.row({tr.times[k], tr.energy[k], e[0], e[1], e[2], e[3], e[4], e[5], d[0], d[1], d[2], d[3], tr.residual[k]});
    }
  });
  std::cout << "profile " << profile_name(profile) << ", dt " << num(dt) << ", t_end " << num(t_end) << '\n';
  for (std::size_t i = 0; i < c.modes.size(); ++i)
    std::cout << "mode " << c.modes[i] << ": final energy " << num(final_energy[i]) << ", max residual "
              << num(checks[i].max_residual) << (checks[i].ok ? ", dissipative" : ", NOT dissipative") << '\n';
  return 0;
}

int cmd_spectrum(const std::string& path) {
  const Context c = load(path);
  std::vector<SpectrumResult> spectra(c.modes.size());
  parallel_for(c.modes.size(), c.threads, [&](std::size_t i) {
    spectra[i] = eigenvalues(c.pencil(c.modes[i]));
    Csv csv(c.out / mode_file("spectrum_mode", c.modes[i]), "re,im");
    for (const auto& z : spectra[i].eigenvalues) csv.row({z.real(), z.imag()});
  });
  Csv summary(c.out / "spectrum_summary.csv", "mode,abscissa,imag_axis_gap,zero_ok");
  for (std::size_t i = 0; i < c.modes.size(); ++i) {
    const auto& s = spectra[i];
    summary.stream() << s.mode << ',' << num(s.spectral_abscissa) << ',' << num(s.imag_axis_gap) << ','
                     << (s.zero_in_resolvent ? 1 : 0) << '\n';
    std::cout << "mode " << s.mode << ": abscissa " << num(s.spectral_abscissa) << ", imag_axis_gap "
              << num(s.imag_axis_gap) << '\n';
  }
  return 0;
}

int cmd_scan(const std::string& path, double lmin, double lmax, int n) {
  const Context c = load(path);
  if (std::isnan(lmax)) lmax = mode_truncation_frequency(c.config.params, c.config.geometry, c.config.mode_max);
  if (!(lmax > lmin) || n < 2) throw std::invalid_argument("scan needs lmax > lmin and n >= 2");
  std::vector<std::optional<ResolventEvaluator>> built(c.modes.size());
  std::vector<ResolventScan> scans(c.modes.size());
  parallel_for(c.modes.size(), c.threads, [&](std::size_t i) {
    std::vector<ResolventEvaluator> one{ResolventEvaluator(c.pencil(c.modes[i]))};
    scans[i] = resolvent_scan(one, {c.modes[i]}, lmin, lmax, n);
    built[i].emplace(std::move(one.front()));
    Csv csv(c.out / mode_file("resolvent_mode", c.modes[i]), "lambda,norm");
    for (std::size_t k = 0; k < scans[i].lambdas.size(); ++k) csv.row({scans[i].lambdas[k], scans[i].norms[k]});
  });
  std::vector<ResolventEvaluator> evals;
  for (auto& e : built) evals.push_back(std::move(*e));
  for (std::size_t i = 0; i < c.modes.size(); ++i)
    std::cout << "mode " << c.modes[i] << ": sup " << num(scans[i].sup_norm) << ", growth exponent "
              << num(scans[i].growth_exponent) << '\n';
  const ResolventScan all = resolvent_scan(evals, c.modes, lmin, lmax, n);
  std::cout << "all modes: sup " << num(all.sup_norm) << " at lambda " << num(all.sup_lambda) << " (mode "
            << all.sup_mode << "), growth exponent " << num(all.growth_exponent) << " (r^2 "
            << num(all.growth_r_squared) << "), graph-normalized growth exponent " << num(all.graph_growth_exponent)
            << '\n';
  return 0;
}

void write_fit(std::ostream& os, const char* name, const DecayFit& f) {
  os << "  " << name << " rate " << num(f.rate) << ", prefactor " << num(f.prefactor) << ", r^2 "
     << num(f.r_squared) << ", window [" << num(f.window.first) << ", " << num(f.window.second) << "]";
  if (f.model == DecayModel::polynomial)
    os << ", graph norm " << num(f.graph_norm) << ", normalized prefactor " << num(f.normalized_prefactor);
  os << '\n';
}

int cmd_regimes(const std::string& path) {
  const Context c = load(path);
  LabSettings s;
  s.resolution = c.config.resolution;
  s.mode_min = c.config.mode_min;
  s.mode_max = c.config.mode_max;
  s.profiles = c.config.initial_profiles();
  s.dt = c.config.dt;
  s.t_end = c.config.t_end;
  s.threads = c.threads;
  const RegimeReport r = run_regime_experiment(c.config.params, c.config.geometry, s);

  std::ofstream os(c.out / "regime_report.txt", std::ios::binary);
  if (!os) throw std::runtime_error("cannot write regime_report.txt");
  os << "predicted: " << to_string(r.predicted) << '\n';
  os << "geometry: " << (r.geometry.satisfied ? "satisfied" : "violated") << ", max q.nu = "
     << num(r.geometry.max_q_dot_nu) << '\n';
  os << "resolution: n_plate " << s.resolution.n_plate << ", n_mem " << s.resolution.n_mem << ", modes "
     << s.mode_min << ".." << s.mode_max << '\n';
  os << "time: dt " << num(r.dt) << ", t_end " << num(r.t_end) << '\n';
  os << "measured:\n";
  for (const AbscissaLevel* lv : {&r.sweep.coarse, &r.sweep.fine}) {
    os << "  abscissa at n_plate " << lv->resolution.n_plate << ", modes " << lv->mode_min << ".." << lv->mode_max
       << ": global " << num(lv->global) << ", resolved " << num(lv->global_resolved) << " (|Im| <= "
       << num(lv->resolved_cutoff) << ", mode " << lv->argmax_mode << ")\n";
  }
  if (r.complete) os << "  resolved abscissa shrink ratio " << num(r.sweep.shrink_ratio()) << '\n';
  os << "  resolvent sup " << num(r.scan.sup_coarse) << " on [0, " << num(r.scan.lambda_max_coarse) << "], "
     << num(r.scan.sup_fine) << " on [0, " << num(r.scan.lambda_max_fine) << "]\n";
  os << "  resolvent growth exponent " << num(r.scan.growth_coarse) << ", " << num(r.scan.growth_fine)
     << "; graph-normalized " << num(r.scan.graph_growth_coarse) << ", " << num(r.scan.graph_growth_fine) << '\n';
  for (const auto& p : r.profiles) {
    os << "profile " << p.profile << (p.smooth ? " (smooth)" : " (rough)") << '\n';
    if (p.fits_ok) {
      write_fit(os, "exponential", p.exponential);
      write_fit(os, "polynomial", p.polynomial);
    }
    for (const auto& m : p.modes)
      os << "  mode " << m.mode << ": rate " << num(m.exponential.rate) << ", final energy " << num(m.final_energy)
         << ", max residual " << num(m.dissipativity.max_residual) << '\n';
  }
  os << "verdict: " << to_string(r.verdict) << '\n';
  for (const auto& line : r.explanation) os << "  " << line << '\n';

  std::cout << to_string(r.predicted) << ": " << to_string(r.verdict) << '\n';
  for (const auto& line : r.explanation) std::cout << "  " << line << '\n';
  return exit_code(r.verdict);
}

int cmd_check_geometry(const std::string& path) {
  const Context c = load(path);
  const auto res = check_geometric_condition(c.config.geometry);
  std::cout << (res.satisfied ? "satisfied" : "violated") << ", max q·nu = " << num(res.max_q_dot_nu) << '\n';
  return 0;
}

int cmd_render(const std::string& path, double t, int n_theta) {
  const Context c = load(path);
  if (!(t >= 0.0)) throw std::invalid_argument("--t must be nonnegative");
  if (n_theta < 1) throw std::invalid_argument("--ntheta must be positive");
  const InitialProfile profile = c.config.initial_profiles().front();
  const double dt = c.dt();
  std::vector<FullGridState> states(c.modes.size());
  std::vector<double> r_plate, r_mem;
  parallel_for(c.modes.size(), c.threads, [&](std::size_t i) {
    const ModePencil pc = c.pencil(c.modes[i]);
    Eigen::VectorXcd w = make_initial_data(pc, profile).coefficients;
    if (t > 0.0) {
      const auto steps = static_cast<long>(std::ceil(t / dt - 1e-9));
      const CrankNicolsonStepper stepper(pc, t / static_cast<double>(steps));
      for (long k = 0; k < steps; ++k) stepper.step_in_place(w);
    }
    states[i] = reconstruct_full_grid(pc, build_operators(*pc.grid, c.config.params), w);
    if (i == 0) {
      r_plate = pc.grid->plate_nodes;
      r_mem = pc.grid->membrane_nodes;
    }
  });

  auto write = [&](const char* name, const std::vector<double>& radii, auto member) {
    Csv csv(c.out / (std::string("field_") + name + ".csv"), "x,y,value");
    for (std::size_t j = 0; j < radii.size(); ++j) {
      for (int k = 0; k < n_theta; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / n_theta;
        double value = 0.0;
        for (std::size_t i = 0; i < c.modes.size(); ++i)
          value += ((states[i].*member)(static_cast<Eigen::Index>(j)) *
                    std::polar(1.0, static_cast<double>(c.modes[i]) * phi))
                       .real();
        csv.row({radii[j] * std::cos(phi), radii[j] * std::sin(phi), value});
      }
    }
  };
  write("u", r_plate, &FullGridState::u);
  write("theta", r_plate, &FullGridState::theta);
  write("v", r_mem, &FullGridState::v);
  std::cout << "rendered " << profile_name(profile) << " at t = " << num(t) << " over modes " << c.config.mode_min
            << ".." << c.config.mode_max << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plate / membrane transmission stability lab"};
  app.require_subcommand(1);
  std::string config;
  int stride = 1;
  double lmin = 0.0, lmax = std::nan(""), t = 0.0;
  int n = 200, n_theta = 64;

  auto* sim = app.add_subcommand("simulate", "Crank-Nicolson energy traces per mode");
  sim->add_option("config", config, "configuration file")->required();
  sim->add_option("--stride", stride, "write every k-th time step")->capture_default_str();
  auto* spec = app.add_subcommand("spectrum", "eigenvalues and spectral summary per mode");
  spec->add_option("config", config, "configuration file")->required();
  auto* scan = app.add_subcommand("scan", "energy-norm resolvent along the imaginary axis");
  scan->add_option("config", config, "configuration file")->required();
  scan->add_option("--lmin", lmin, "smallest lambda")->capture_default_str();
  scan->add_option("--lmax", lmax, "largest lambda (default: mode truncation frequency)");
  scan->add_option("--n", n, "equispaced samples")->capture_default_str();
  auto* reg = app.add_subcommand("regimes", "regime experiment and verdict");
  reg->add_option("config", config, "configuration file")->required();
  auto* geo = app.add_subcommand("check-geometry", "geometric condition on the interface");
  geo->add_option("config", config, "configuration file")->required();
  auto* ren = app.add_subcommand("render", "2D fields u, theta, v at one time");
  ren->add_option("config", config, "configuration file")->required();
  ren->add_option("--t", t, "time")->required();
  ren->add_option("--ntheta", n_theta, "angular samples")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config, stride);
    if (spec->parsed()) return cmd_spectrum(config);
    if (scan->parsed()) return cmd_scan(config, lmin, lmax, n);
    if (reg->parsed()) return cmd_regimes(config);
    if (geo->parsed()) return cmd_check_geometry(config);
    if (ren->parsed()) return cmd_render(config, t, n_theta);
  } catch (const std::exception& e) {
    std::cerr << "platemem: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
