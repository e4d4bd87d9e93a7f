#include "boxheat/experiments.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "boxheat/error.hpp"

namespace boxheat {

namespace fs = std::filesystem;

namespace {

std::string g(double v) { return fmt::format("{:.12g}", v); }

class Csv {
 public:
  Csv(const ExperimentConfig& c, std::string_view name, std::string_view header) : path_(fs::path(c.out) / name) {
    out_.open(path_);
    if (!out_) throw ValidationError(fmt::format("run.out: cannot write '{}'", path_.string()));
    out_ << header << '\n';
  }

  template <typename... Args>
  void row(fmt::format_string<Args...> f, Args&&... args) {
    out_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

BoxOperator build_operator(const ExperimentConfig& c) { return assemble_box(c.weight(), c.grid()); }

DecayModel resolve_model(const ExperimentConfig& c, std::string_view setting) {
  if (setting == "power_law") return DecayModel::power_law;
  if (setting == "exponential") return DecayModel::exponential;
  const DeltaReport d = delta(c.weight(), c.delta_extent, c.delta_resolution, c.delta_refine);
  return model_for(d.classification);
}

}  // namespace

int cmd_delta(const ExperimentConfig& c, std::ostream& log) {
  const Weight w = c.weight();
  const DeltaReport r = delta(w, c.delta_extent, c.delta_resolution, c.delta_refine);
  Csv csv(c, "delta.csv",
          "weight,delta,classification,argmin_x,argmin_y,mu_at_argmin,final_cell,polynomial_lower_bound");
  csv.row("{},{},{},{},{},{},{},{}", w.name(), g(r.delta), to_string(r.classification), g(r.argmin.real()),
          g(r.argmin.imag()), g(r.mu_at_argmin), g(r.final_cell),
          r.polynomial_lower_bound ? g(*r.polynomial_lower_bound) : std::string("nan"));
  fmt::print(log, "delta({}) = {} ({}), argmin ({}, {})\n", w.name(), g(r.delta), to_string(r.classification),
             g(r.argmin.real()), g(r.argmin.imag()));
  return 0;
}

int cmd_audit(const ExperimentConfig& c, std::ostream& log) {
  const BoxOperator op = build_operator(c);
  const OperatorAuditReport r = operator_audit(op, c.trials, c.seed);
  Csv csv(c, "audit.csv", "quantity,value");
  csv.row("hermitian_defect,{}", g(r.hermitian_defect));
  csv.row("max_abs_entry,{}", g(r.max_abs_entry));
  csv.row("min_rayleigh,{}", g(r.min_rayleigh));
  csv.row("factorization_defect,{}", g(r.factorization_defect));
  csv.row("lambda_min,{}", g(r.lambda_min.value));
  csv.row("lambda_min_iterations,{}", r.lambda_min.iterations);
  fmt::print(log, "audit {} n={}: hermitian defect {}, min Rayleigh {}, lambda_min {}\n", op.weight().name(),
             c.points, g(r.hermitian_defect), g(r.min_rayleigh), g(r.lambda_min.value));
  if (r.hermitian_defect > 1e-12 * r.max_abs_entry || r.min_rayleigh < -1e-8) {
    throw BoundViolation("audit: operator is not Hermitian positive on the grid");
  }
  return 0;
}

int cmd_evolve(const ExperimentConfig& c, std::ostream& log) {
  const BoxOperator op = build_operator(c);
  const ComplexField u0 = c.initial(op.spec());
  const std::vector<double> schedule = c.schedule.build();
  Trajectory traj(op.spec());
  if (c.nonlinearity.kind == Nonlinearity::Kind::none) {
    traj = evolve_linear(op, u0, schedule, c.stepper);
  } else {
    ImexResult r = solve_imex(op, c.nonlinearity, u0, schedule, c.stepper.dt, 1e8, c.stepper.tolerance);
    if (r.blew_up) throw NumericalError(fmt::format("evolve: solution blew up at t = {}", g(r.blowup_time)));
    traj = std::move(r.trajectory);
  }
  Csv csv(c, "evolve.csv", "t,l2,linf,boundary_mass");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const ComplexField& u = traj.field(i);
    csv.row("{},{},{},{}", g(traj.time(i)), g(lp_norm(u, 2.0)), g(lp_norm(u, kInfNorm)), g(boundary_mass(u)));
  }
  std::ofstream final_field(fs::path(c.out) / "field_final.csv");
  write_field_csv(final_field, traj.back());
  fmt::print(log, "evolve {} to t = {}: ||u||_2 = {}\n", op.weight().name(), g(traj.times().back()),
             g(lp_norm(traj.back(), 2.0)));
  return 0;
}

int cmd_kernel(const ExperimentConfig& c, std::ostream& log) {
  const BoxOperator op = build_operator(c);
  const cplx source{c.source_x, c.source_y};
  const std::vector<KernelSlice> slices = heat_kernel(op, source, c.kernel_times, c.stepper);
  const GridSpec& grid = op.spec();

  Csv summary(c, "kernel_summary.csv",
              "t,peak_ratio,max_excess,worst_violation,violating_nodes,holds,free_rel_linf,mass");
  Csv profile(c, "kernel_profile.csv", "t,x,y,abs_h,envelope");
  bool all_hold = true;
  for (const KernelSlice& s : slices) {
    const GeneralBoundReport b = check_general_bound(s, c.slack);
    double err = 0.0, peak = 0.0;
    cplx mass{};
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const double e = general_envelope(s.t, grid.node(i), s.source);
      err = std::max(err, std::abs(std::abs(s.field[i]) - e));
      peak = std::max(peak, e);
      mass += s.field[i];
    }
    mass *= grid.spacing() * grid.spacing();
    summary.row("{},{},{},{},{},{},{},{}", g(s.t), g(b.peak_ratio), g(b.max_excess), g(b.worst_violation),
                b.violating_nodes, b.holds ? 1 : 0, g(err / peak), g(mass.real()));
    const int row = static_cast<int>(s.source_index / grid.points());
    for (int a = 0; a < grid.points(); ++a) {
      const cplx z = grid.node(a, row);
      profile.row("{},{},{},{},{}", g(s.t), g(z.real()), g(z.imag()), g(std::abs(s.field[grid.index(a, row)])),
                  g(general_envelope(s.t, z, s.source)));
    }
    all_hold = all_hold && b.holds;
    fmt::print(log, "t = {}: peak ratio {}, violating nodes {}, relative L-inf to free kernel {}\n", g(s.t),
               g(b.peak_ratio), b.violating_nodes, g(err / peak));
  }
  const PolynomialFitReport fit = fit_polynomial_bound(slices, op.weight());
  Csv fit_csv(c, "kernel_fit.csv", "c,c_prime,samples,all_below");
  fit_csv.row("{},{},{},{}", g(fit.c), g(fit.c_prime), fit.samples, fit.all_below ? 1 : 0);
  fmt::print(log, "polynomial envelope fit: C = {}, C' = {}\n", g(fit.c), g(fit.c_prime));
  if (!all_hold) throw BoundViolation("kernel: the general envelope is exceeded at some node");
  return 0;
}

int cmd_picard(const ExperimentConfig& c, std::ostream& log) {
  const BoxOperator op = build_operator(c);
  const ComplexField u0 = c.initial(op.spec());
  const PicardResult r = picard_solve(op, c.nonlinearity, u0, c.picard_ds, c.picard_t_final, c.stepper, c.picard);
  Csv csv(c, "picard.csv", "iter,d_k,ratio");
  for (std::size_t k = 0; k < r.report.differences.size(); ++k) {
    csv.row("{},{},{}", k + 1, g(r.report.differences[k]), k == 0 ? std::string("nan") : g(r.report.ratios[k - 1]));
  }
  Csv sol(c, "picard_solution.csv", "t,l2,linf");
  for (std::size_t i = 0; i < r.solution.size(); ++i) {
    sol.row("{},{},{}", g(r.solution.time(i)), g(lp_norm(r.solution.field(i), 2.0)),
            g(lp_norm(r.solution.field(i), kInfNorm)));
  }
  for (const std::string& w : r.report.warnings) fmt::print(log, "warning: {}\n", w);
  fmt::print(log, "picard: {} after {} iterations\n",
             r.report.converged ? "converged" : (r.report.diverged ? "diverged" : "not converged"),
             r.report.iterations);
  if (!r.report.converged) throw NumericalError("picard: iteration did not converge");
  return 0;
}

int cmd_perturb(const ExperimentConfig& c, std::ostream& log) {
  const BoxOperator op = build_operator(c);
  const ComplexField u0 = c.initial(op.spec());
  ComplexField u0_hat = u0;
  u0_hat *= 1.0 + c.perturbation;
  StabilityOptions opts;
  opts.model = resolve_model(c, c.model);
  opts.norm_exponent = opts.model == DecayModel::power_law ? c.q : c.n;
  opts.t_a = c.window_start;
  opts.t_b = c.window_end;
  opts.solver = c.solver;
  opts.picard = c.picard;
  opts.jobs = c.jobs;
  const StabilityReport r =
      stability_experiment(op, c.nonlinearity, u0, u0_hat, c.schedule.build(), c.stepper, opts);

  Csv csv(c, "perturb.csv", "t,value,model_value,residual");
  for (const auto& [t, v] : r.distance) {
    const double model = r.fit.points > 0 ? r.fit.model_value(t) : 0.0;
    csv.row("{},{},{},{}", g(t), g(v), g(model), g(v - model));
  }
  Csv summary(c, "perturb_summary.csv",
              "model,rate,target,deviation,r2,t_a,t_b,points,coefficient,constant,initial_distance");
  summary.row("{},{},{},{},{},{},{},{},{},{},{}", to_string(r.fit.model), g(r.fit.rate),
              r.fit.target ? g(*r.fit.target) : std::string("nan"),
              r.fit.deviation ? g(*r.fit.deviation) : std::string("nan"), g(r.fit.r2), g(r.fit.t_a), g(r.fit.t_b),
              r.fit.points, g(r.fit.coefficient), g(r.constant), g(r.initial_distance));
  for (const std::string& n : r.notes) fmt::print(log, "note: {}\n", n);
  fmt::print(log, "perturb {}: {} fit rate {} (R^2 {}) on [{}, {}]\n", op.weight().name(), to_string(r.fit.model),
             g(r.fit.rate), g(r.fit.r2), g(r.fit.t_a), g(r.fit.t_b));
  return 0;
}

int cmd_lplq(const ExperimentConfig& c, std::ostream& log) {
  const BoxOperator op = build_operator(c);
  const GridSpec& grid = op.spec();
  std::vector<ComplexField> probes;
  for (double w : c.probe_widths) probes.push_back(gaussian_bump(grid, cplx{c.center_x, c.center_y}, w));
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal;
  const ComplexField window = gaussian_bump(grid, cplx{}, 0.25 * grid.extent());
  for (int k = 0; k < c.random_probes; ++k) {
    ComplexField u(grid);
    for (Eigen::Index i = 0; i < grid.size(); ++i) u[i] = cplx{normal(rng), normal(rng)} * window[i];
    probes.push_back(std::move(u));
  }
  const DecayModel model = resolve_model(c, c.lp_model);
  const LpLqProbe r = lp_lq_probe(op, c.lp_p, c.lp_q, probes, c.schedule.build(), c.stepper, model,
                                  c.lp_window_start, c.lp_window_end, c.jobs);

  std::string header = "t,max_ratio,contaminated";
  for (std::size_t k = 0; k < probes.size(); ++k) header += fmt::format(",probe_{}", k);
  Csv csv(c, "lplq.csv", header);
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    std::string line = fmt::format("{},{},{}", g(r.times[i]), g(r.max_ratio[i]), r.contaminated[i] ? 1 : 0);
    for (const auto& probe : r.ratios) line += "," + g(probe[i]);
    csv.row("{}", line);
  }
  Csv summary(c, "lplq_summary.csv", "p,q,model,rate,coefficient,r2,t_a,t_b,predicted_exponent");
  summary.row("{},{},{},{},{},{},{},{},{}", g(r.p), g(r.q), to_string(r.fit.model), g(r.fit.rate),
              g(r.fit.coefficient), g(r.fit.r2), g(r.fit.t_a), g(r.fit.t_b), g(r.predicted_exponent));
  fmt::print(log, "lplq p={} q={}: {} rate {} (predicted exponent {}), R^2 {}\n", g(r.p), g(r.q),
             to_string(r.fit.model), g(r.fit.rate), g(r.predicted_exponent), g(r.fit.r2));
  return 0;
}

int cmd_beta_check(const ExperimentConfig& c, std::ostream& log) {
  Csv csv(c, "beta.csv", "k,l,t,quadrature,closed_form,abs_difference");
  double worst = 0.0;
  for (const auto& [k, l] : c.beta_pairs) {
    for (double t : c.beta_times) {
      const BetaCheck b = beta_identity_check(k, l, t);
      csv.row("{},{},{},{:.17g},{:.17g},{:.3g}", g(k), g(l), g(t), b.quadrature, b.closed_form, b.abs_difference);
      worst = std::max(worst, b.abs_difference);
    }
  }
  fmt::print(log, "beta identity: worst |quadrature - closed form| = {:.3g}\n", worst);
  if (worst > 1e-6) throw BoundViolation("beta-check: quadrature and closed form disagree beyond 1e-6");
  return 0;
}

int run_command(std::string_view name, const ExperimentConfig& c, std::ostream& log, std::ostream& err) {
  using Runner = int (*)(const ExperimentConfig&, std::ostream&);
  static const std::pair<std::string_view, Runner> table[] = {
      {"delta", cmd_delta},   {"audit", cmd_audit},     {"evolve", cmd_evolve}, {"kernel", cmd_kernel},
      {"picard", cmd_picard}, {"perturb", cmd_perturb}, {"lplq", cmd_lplq},     {"beta-check", cmd_beta_check},
  };
  Runner runner = nullptr;
  for (const auto& [n, r] : table) {
    if (n == name) runner = r;
  }
  if (runner == nullptr) {
    fmt::print(err, "error: unknown command '{}'\n", name);
    return 1;
  }

  const auto started = std::chrono::system_clock::now();
  const auto clock = std::chrono::steady_clock::now();
  int code = 0;
  std::string failure;
  try {
    fs::create_directories(c.out);
    code = runner(c, log);
  } catch (const ValidationError& e) {
    code = 1;
    failure = e.what();
  } catch (const NumericalError& e) {
    code = 2;
    failure = e.what();
  } catch (const BoundViolation& e) {
    code = 3;
    failure = e.what();
  } catch (const fs::filesystem_error& e) {
    code = 1;
    failure = e.what();
  }
  if (!failure.empty()) fmt::print(err, "error: {}\n", failure);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock).count();
  std::error_code ec;
  if (fs::is_directory(c.out, ec)) {
    std::ofstream manifest(fs::path(c.out) / "manifest.ini");
    const std::time_t stamp = std::chrono::system_clock::to_time_t(started);
    char when[32];
    std::strftime(when, sizeof when, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&stamp));
    fmt::print(manifest, "[manifest]\ncommand = {}\npreset = {}\nversion = {}\nstarted = {}\nwall_seconds = {:.3f}\n",
               name, c.preset, kVersion, when, wall);
    fmt::print(manifest, "exit_code = {}\n\n{}", code, c.to_ini());
  }
  return code;
}

}  // namespace boxheat
