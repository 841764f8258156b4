#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pfwi/adjoint.hpp"
#include "pfwi/config.hpp"
#include "pfwi/errors.hpp"
#include "pfwi/forward.hpp"
#include "pfwi/inversion.hpp"
#include "pfwi/io.hpp"
#include "pfwi/kernel_fit.hpp"
#include "pfwi/memory.hpp"

namespace fs = std::filesystem;
using namespace pfwi;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned precision_bits = 0;
  int threads = 0;
  bool verbose = false;
};

struct Context {
  RunConfig cfg;
  fs::path out;
  bool verbose = false;

  std::string path(const std::string& name) const { return (out / name).string(); }
  OutputHeader header(double dt) const {
    OutputHeader h;
    h.nx = cfg.grid.nx;
    h.nz = cfg.grid.nz;
    h.dt = dt;
    h.seed = cfg.seed;
    return h;
  }
  void log(const std::string& msg) const {
    if (verbose) std::cerr << msg << '\n';
  }
};

Context prepare(const Options& o, const std::string& command) {
  Context c;
  c.cfg = load_config(o.config);
  if (o.seed_set) c.cfg.seed = o.seed;
  if (o.precision_bits != 0) {
    if (o.precision_bits < 64) throw ValidationError("--precision-bits must be at least 64");
    c.cfg.precision_bits = o.precision_bits;
  }
  if (o.threads > 0) c.cfg.threads = o.threads;
  if (c.cfg.threads > 0) omp_set_num_threads(c.cfg.threads);
  require_for_command(c.cfg, command);
  c.out = o.out.empty() ? fs::path(c.cfg.output_dir) : fs::path(o.out);
  c.verbose = o.verbose;
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw IoError("cannot create output directory " + c.out.string() + ": " + ec.message());

  const std::string echo = c.cfg.echo();
  std::ofstream f(c.path("config.echo.ini"));
  if (!f) throw IoError("cannot write " + c.path("config.echo.ini"));
  f << echo;
  std::cout << "# effective configuration (" << command << ")\n" << echo << '\n';
  return c;
}

void write_traces_with_sidecar(const Context& c, const std::string& name, const SeismogramSet& s,
                               std::size_t n1) {
  write_traces(c.path(name + ".pfwi"), s);
  write_sidecar(c.path(name + ".pfwi"), c.header(s.dt));
  write_traces_csv(c.path(name + ".csv"), s, c.header(s.dt), n1);
}

void write_grid_with_sidecar(const Context& c, const std::string& name, const GridFile& g, double dt) {
  write_grid(c.path(name), g);
  write_sidecar(c.path(name), c.header(dt));
}

int cmd_fit_kernel(const Options& o) {
  Context c = prepare(o, "fit-kernel");
  if (!c.cfg.kernel.enabled) throw ValidationError("fit-kernel: [kernel] enabled = false");
  const FrequencyGrid& fg = c.cfg.kernel.frequencies;
  fg.validate();
  FrequencyGrid held_out{200, Spacing::log, fg.omega_min * 1.0001, fg.omega_max * 0.9999};

  std::vector<PoleResidueSet> sets;
  for (Axis ax : kAxes) {
    KernelFit fit = fit_kernel(c.cfg.material, fg, ax, c.cfg.precision_bits);
    const double err = fit_error(fit.set, c.cfg.material, held_out, ax);
    std::printf("axis %d: N = %zu, alpha_inf = %.6g, a = %.6g, interpolation defect %.3e, held-out max rel err %.3e\n",
                static_cast<int>(ax), fit.set.size(), fit.set.alpha_inf, fit.set.a, fit.interpolation_defect, err);
    for (std::size_t k = 0; k < fit.set.size(); ++k)
      std::printf("  theta = %-14.6e r = %.6e\n", fit.set.poles[k], fit.set.residues[k]);
    sets.push_back(fit.set);
  }
  write_kernel_file(c.path("kernels.txt"), sets);
  std::printf("wrote %s\n", c.path("kernels.txt").c_str());
  return 0;
}

struct Model {
  MaterialField mf;
  KernelPair k;
};

Model load_model(const Context& c) {
  Model m{build_material(c.cfg), build_kernels(c.cfg)};
  c.log("kernels: N1 = " + std::to_string(m.k.x.size()) + ", N3 = " + std::to_string(m.k.z.size()));
  return m;
}

int cmd_simulate(const Options& o) {
  Context c = prepare(o, "simulate");
  Model m = load_model(c);
  const auto shots = c.cfg.shots();
  const std::size_t nc = 8 + m.k.x.size() + m.k.z.size();
  const Discretization disc = resolve_discretization(m.mf, c.cfg.grid, c.cfg.sim);
  std::printf("dt = %.6e s, %zu steps\n", disc.dt, disc.n_steps);
  for (std::size_t s = 0; s < shots.size(); ++s) {
    const ForwardProblem fp =
        build_problem(m.mf, c.cfg.grid, m.k, shots[s], c.cfg.receiver_specs(nc), c.cfg.sim, disc);
    const ForwardRun run = run_forward(fp);
    const std::string tag = "shot" + std::to_string(s);
    write_traces_with_sidecar(c, "traces_" + tag, run.traces, m.k.x.size());
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
      const std::size_t n = k * c.cfg.sim.snapshot_every;
      write_grid_with_sidecar(c, "snapshot_" + tag + "_" + std::to_string(n) + ".pfgd",
                              snapshot_to_grid(run.snapshots[k]), run.dt);
    }
    if (!run.ledger.samples.empty())
      write_energy_csv(c.path("energy_" + tag + ".csv"), run.ledger, c.header(run.dt));
    std::printf("shot %zu: %zu receivers, %zu samples, %zu snapshots\n", s, run.traces.n_receivers(),
                run.traces.n_samples, run.snapshots.size());
  }
  return 0;
}

int cmd_energy_report(const Options& o) {
  Context c = prepare(o, "energy-report");
  Model m = load_model(c);
  SimConfig sim = c.cfg.sim;
  if (sim.energy_every == 0) sim.energy_every = 1;
  const auto shots = c.cfg.shots();
  const std::size_t nc = 8 + m.k.x.size() + m.k.z.size();
  const Discretization disc = resolve_discretization(m.mf, c.cfg.grid, sim);
  bool ok = true;
  for (std::size_t s = 0; s < shots.size(); ++s) {
    const ForwardProblem fp = build_problem(m.mf, c.cfg.grid, m.k, shots[s], c.cfg.receiver_specs(nc), sim, disc);
    const ForwardRun run = run_forward(fp);
    const std::string name = "energy_shot" + std::to_string(s) + ".csv";
    write_energy_csv(c.path(name), run.ledger, c.header(run.dt));
    const DecayReport rep = check_decay(run.ledger, 1e-8, run.ledger.source_end, false);
    std::printf("shot %zu: source ends at %.4f s, peak E %.6e, %zu post-source samples, worst increase %.3e, "
                "worst balance residual %.3e -> %s\n",
                s, run.ledger.source_end, rep.peak_energy, rep.checked, rep.worst_increase, rep.worst_balance,
                rep.monotone ? "monotone" : "NOT monotone");
    ok = ok && rep.monotone;
  }
  if (!ok) throw DecayViolation("energy increased after the sources stopped");
  return 0;
}

int cmd_adjoint_test(const Options& o) {
  Context c = prepare(o, "adjoint-test");
  Model m = load_model(c);
  const auto shots = c.cfg.shots();
  const std::size_t nc = 8 + m.k.x.size() + m.k.z.size();
  const Discretization disc = resolve_discretization(m.mf, c.cfg.grid, c.cfg.sim);
  const ForwardProblem fp =
      build_problem(m.mf, c.cfg.grid, m.k, shots.front(), c.cfg.receiver_specs(nc), c.cfg.sim, disc);
  const DotProductResult r = dot_product_test(fp, c.cfg.seed);
  const double tol = 1e-12;
  std::printf("<F u, v> = %.17e\n<u, F* v> = %.17e\nrelative discrepancy = %.3e (tolerance %.0e) -> %s\n",
              r.forward_side, r.adjoint_side, r.discrepancy, tol, r.discrepancy <= tol ? "PASS" : "FAIL");
  return r.discrepancy <= tol ? 0 : kExitNumerical;
}

/// Survey with observed traces from files, or synthesized from the truth model.
Survey load_survey(const Context& c, const Model& m) {
  const std::size_t nc = 8 + m.k.x.size() + m.k.z.size();
  Survey sv = make_survey(m.mf, c.cfg.grid, m.k, c.cfg.sim, c.cfg.shots(), c.cfg.receiver_specs(nc));
  const auto& inv = c.cfg.inversion;
  if (!inv.observed.empty()) {
    for (std::size_t s = 0; s < sv.shots.size(); ++s) {
      SeismogramSet obs = read_traces(inv.observed[s]);
      require_same_sampling(obs, sv.disc.dt, sv.disc.n_steps + 1);
      sv.shots[s].observed = std::move(obs);
    }
  } else {
    const MaterialField truth = material_from_grid(read_grid(inv.truth_file), c.cfg.material);
    synthesize_observed(sv, truth);
    for (std::size_t s = 0; s < sv.shots.size(); ++s)
      write_traces_with_sidecar(c, "observed_shot" + std::to_string(s), sv.shots[s].observed, m.k.x.size());
  }
  return sv;
}

int cmd_gradient_check(const Options& o) {
  Context c = prepare(o, "gradient-check");
  Model m = load_model(c);
  const Survey sv = load_survey(c, m);
  const auto& inv = c.cfg.inversion;
  const Evaluation ev = evaluate(sv, m.mf, &inv.selection);
  write_grid_with_sidecar(c, "gradient.pfgd", gradient_to_grid(ev.gradient), sv.disc.dt);
  std::printf("chi = %.6e, max |grad| = %.6e\n", ev.chi, ev.gradient.max_abs());

  const GradientCheck gc = fd_gradient_check(sv, m.mf, inv.selection, inv.n_probes, c.cfg.seed, inv.fd_step);
  const double tol = 1e-4;
  for (const auto& p : gc.probes)
    std::printf("cell (%zu, %zu) %-12s adjoint %.9e  fd %.9e  rel %.2e\n", p.cell % c.cfg.grid.nx,
                p.cell / c.cfg.grid.nx, std::string(param_name(p.id)).c_str(), p.adjoint, p.finite_difference,
                p.rel_error);
  std::printf("max relative error %.3e (tolerance %.0e) -> %s\n", gc.max_rel_error, tol,
              gc.max_rel_error <= tol ? "PASS" : "FAIL");
  return gc.max_rel_error <= tol ? 0 : kExitNumerical;
}

int cmd_invert(const Options& o) {
  Context c = prepare(o, "invert");
  Model m = load_model(c);
  const Survey sv = load_survey(c, m);
  InversionOptions opt = c.cfg.inversion.options;
  const double dt = sv.disc.dt;
  opt.on_iterate = [&](const MaterialField& mf, const MisfitReport& r) {
    std::printf("iter %3zu  chi %.6e  |g| %.3e  step %.3e  evals %zu\n", r.iteration, r.chi, r.grad_norm, r.step,
                r.evaluations);
    std::fflush(stdout);
    write_grid_with_sidecar(c, "model_iter" + std::to_string(r.iteration) + ".pfgd",
                            material_to_grid(mf, c.cfg.grid), dt);
  };
  const InversionResult res = invert(sv, m.mf, c.cfg.inversion.selection, opt);
  write_history_csv(c.path("history.csv"), res.history, c.header(dt));
  write_grid_with_sidecar(c, "model_final.pfgd", material_to_grid(res.model, c.cfg.grid), dt);
  const double chi0 = res.history.front().chi, chi1 = res.history.back().chi;
  std::printf("status %s after %zu iterations; chi %.6e -> %.6e (%.2f%% reduction)\n",
              status_name(res.status).c_str(), res.history.size() - 1, chi0, chi1,
              chi0 > 0.0 ? 100.0 * (1.0 - chi1 / chi0) : 0.0);
  return 0;
}

/// 0-D checks of the memory variables against independent references.
int cmd_oracle(const Options& o) {
  Context c = prepare(o, "oracle");
  const PoroelasticParams& p = c.cfg.material;
  double f0 = 0.0;
  for (const auto& s : c.cfg.sources) f0 = std::max(f0, s.wavelet.f0);
  if (f0 == 0.0) {
    const auto& fg = c.cfg.kernel.frequencies;
    f0 = std::sqrt(fg.omega_min * fg.omega_max) / (2.0 * M_PI);
  }
  if (!(f0 > 0.0)) throw ValidationError("oracle: need a source or a kernel band to pick the test frequency");
  const KernelPair k = build_kernels(c.cfg);
  Ricker w;
  w.f0 = f0;
  std::ofstream csv(c.path("oracle.csv"));
  if (!csv) throw IoError("cannot write " + c.path("oracle.csv"));
  csv << c.header(0.0).csv_line() << "\ncheck,axis,value,tolerance,pass\n";
  bool ok = true;
  auto report = [&](const std::string& name, int axis, double v, double tol) {
    const bool pass = v <= tol;
    ok = ok && pass;
    std::printf("%-26s axis %d  %.3e  (tolerance %.0e) %s\n", name.c_str(), axis, v, tol, pass ? "PASS" : "FAIL");
    csv << name << ',' << axis << ',' << v << ',' << tol << ',' << (pass ? 1 : 0) << '\n';
  };

  for (Axis ax : kAxes) {
    const PoleResidueSet& set = k[axis_index(ax)];
    const int a = static_cast<int>(ax);
    if (set.size() == 0) {
      std::printf("axis %d: empty pole set, nothing to check\n", a);
      continue;
    }
    double pmax = 0.0;
    for (double th : set.poles) pmax = std::max(pmax, -th);
    const double dt = std::min(1e-6 / std::max(1.0, f0 / 30.0), 1.0 / pmax);
    const std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * w.end_time() / dt));
    std::vector<double> q(n + 1);
    for (std::size_t i = 0; i <= n; ++i) q[i] = w(static_cast<double>(i) * dt);
    double qmax = 0.0;
    for (double v : q) qmax = std::max(qmax, std::abs(v));

    // exact step vs direct convolution, each pole driven at its own rate
    {
      double worst = 0.0;
      for (double th : set.poles) {
        Ricker wp;
        wp.f0 = -th / (2.0 * M_PI);
        const double h = 1.0 / (200.0 * wp.f0);
        const auto m = static_cast<std::size_t>(std::ceil(1.5 * wp.end_time() / h));
        std::vector<double> qs(m);
        for (std::size_t i = 0; i < m; ++i) qs[i] = wp(static_cast<double>(i) * h);
        const auto ref = convolution_oracle(qs, th, h);
        double t = 0.0;
        for (std::size_t i = 1; i < m; ++i) {
          t = theta_step(t, qs[i - 1], qs[i], h, th);
          worst = std::max(worst, std::abs(t - ref[i]));
        }
      }
      report("theta_step_vs_convolution", a, worst, 1e-3);
    }
    // phi_k ODE vs q - Theta_k
    {
      const double t0 = w.delay(), b = M_PI * M_PI * f0 * f0;
      auto dq = [&](double t) {
        const double u = t - t0;
        return w.amplitude * std::exp(-b * u * u) * (-2.0 * b * u) * (3.0 - 2.0 * b * u * u);
      };
      double worst = 0.0;
      for (double th : set.poles) {
        const auto phi = integrate_phi_ode(dq, th, dt, n);
        double t = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
          t = theta_step(t, q[i - 1], q[i], dt, th);
          worst = std::max(worst, std::abs(phi[i] - phi_from_theta(q[i], t)));
        }
      }
      report("phi_identity", a, worst / qmax, 1e-8);
    }
    // pole-residue drag vs diffusive JKD drag
    {
      const double h = 1.0 / (100.0 * f0);
      const std::size_t nn = static_cast<std::size_t>(std::ceil(3.0 * w.end_time() / h));
      std::vector<double> qq(nn);
      for (std::size_t i = 0; i < nn; ++i) qq[i] = w(static_cast<double>(i) * h);
      qq[0] = 0.0;
      const auto a1 = pole_residue_drag(qq, set, p, h);
      const auto a2 = jkd_drag_oracle(qq, p, ax, h, 200);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < nn; ++i) {
        num += (a1[i] - a2[i]) * (a1[i] - a2[i]);
        den += a2[i] * a2[i];
      }
      report("drag_vs_diffusive_oracle", a, std::sqrt(num / den), 1e-3);
    }
  }
  return ok ? 0 : kExitNumerical;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Validation: return kExitValidation;
    case ErrorKind::Numerical: return kExitNumerical;
    case ErrorKind::Io: return kExitIo;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pfwi: poroelastic forward modelling, adjoint gradients and waveform inversion"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "run configuration file")->required();
    sub->add_option("--out", o.out, "output directory (default: [run] output)");
    sub->add_option("--seed", o.seed, "RNG seed, overrides [run] seed")->each([&o](const std::string&) {
      o.seed_set = true;
    });
    sub->add_option("--precision-bits", o.precision_bits, "working precision of the kernel fit");
    sub->add_option("--threads", o.threads, "OpenMP threads (0 = runtime default)");
    sub->add_flag("--verbose", o.verbose, "progress on stderr");
  };

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
  };
  const Command commands[] = {
      {"fit-kernel", "fit pole-residue memory kernels and write them as hex floats", cmd_fit_kernel},
      {"simulate", "forward run: traces, snapshots and (optionally) the energy ledger", cmd_simulate},
      {"energy-report", "energy ledger as CSV plus the post-source decay check", cmd_energy_report},
      {"adjoint-test", "dot-product test of the discrete adjoint", cmd_adjoint_test},
      {"gradient-check", "adjoint gradient against central differences of the misfit", cmd_gradient_check},
      {"invert", "projected-gradient waveform inversion", cmd_invert},
      {"oracle", "0-D checks of the memory variables and drag", cmd_oracle},
  };
  int (*selected)(const Options&) = nullptr;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(sub);
    sub->callback([&selected, fn = cmd.fn] { selected = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    return selected(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
