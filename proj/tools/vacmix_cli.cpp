// vacmix: command-line front end for the vacuum-radiation spectrum library.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vacmix/vacmix.hpp"

namespace fs = std::filesystem;
using namespace vacmix;

namespace {

struct Globals {
  std::string config = "";
  std::string out = ".";
  unsigned threads = 0;
  std::string mixing_mode;
  bool include_subleading = false;
};

RunConfig resolve(const Globals &g) {
  RunConfig c = g.config.empty() ? parse_config(nlohmann::json()) : load_config(g.config);
  if (g.threads)
    c.flags.threads = g.threads;
  if (g.mixing_mode == "analytic")
    c.flags.mixing_mode = MixingMode::analytic;
  else if (g.mixing_mode == "quadrature")
    c.flags.mixing_mode = MixingMode::quadrature;
  if (g.include_subleading)
    c.flags.include_subleading = true;
  return c;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void emit(const fs::path &path, const std::string &text) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  std::cerr << "wrote " << path.string() << "\n";
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw std::invalid_argument("log grid needs 0 < k_min < k_max and at least 2 points");
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j)
    g[j] = lo * std::pow(hi / lo, static_cast<double>(j) / static_cast<double>(n - 1));
  return g;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Vacuum radiation from time-modulated dispersive media"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Run config (JSON, '-' for stdin)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_option("--mixing-mode", g.mixing_mode, "Mixing integral: analytic or quadrature")
      ->check(CLI::IsMember({"analytic", "quadrature"}));
  app.add_flag("--include-subleading", g.include_subleading,
               "Keep the subleading interbranch term");

  auto *branches = app.add_subcommand("branches", "Polariton branches and Hopfield weights (CSV)");
  double bk_min = 1e-3, bk_max = 100.0;
  std::size_t b_points = 400;
  branches->add_option("--k-min", bk_min, "Smallest k, rad/um");
  branches->add_option("--k-max", bk_max, "Largest k, rad/um");
  branches->add_option("--points", b_points, "Log-spaced k samples");

  auto *spec_cmd = app.add_subcommand("spectrum", "Emission spectrum CSV and peak report");
  bool dump_resolved = false;
  spec_cmd->add_flag("--dump-config", dump_resolved, "Also write the resolved config");

  auto *oracle = app.add_subcommand("oracle", "Exact vs perturbative Green's function (CSV)");
  double o_Omega = 1.0, o_eps = 1e-3, o_nu = 2.0, o_tau = 4.0, o_ti = -10.0, o_tf = 10.3,
         o_tp = 0.37;
  std::size_t o_points = 201;
  oracle->add_option("--omega0", o_Omega, "Static resonance frequency");
  oracle->add_option("--eps", o_eps, "Modulation amplitude");
  oracle->add_option("--nu", o_nu, "Modulation frequency");
  oracle->add_option("--tau", o_tau, "Envelope width");
  oracle->add_option("--t-i", o_ti, "Window start");
  oracle->add_option("--t-f", o_tf, "Window end");
  oracle->add_option("--t-prime", o_tp, "Source time t'");
  oracle->add_option("--points", o_points, "Samples of t");

  auto *fiber = app.add_subcommand("fiber", "Fiber polariton branches (CSV)");
  double f_delta = 1e-3, fk_min = 0.1, fk_max = 30.0;
  int f_nmax = 2;
  std::size_t f_points = 200;
  fiber->add_option("--delta", f_delta, "Transverse curvature of Omega^2");
  fiber->add_option("--max-order", f_nmax, "Largest n and m");
  fiber->add_option("--k-min", fk_min, "Smallest k, rad/um");
  fiber->add_option("--k-max", fk_max, "Largest k, rad/um");
  fiber->add_option("--points", f_points, "Log-spaced k samples");

  auto *states_cmd = app.add_subcommand("states", "Driven-oscillator state checks");
  states_cmd->require_subcommand(1);
  auto *self_test = states_cmd->add_subcommand("self-test", "Run the quadrature cross-checks");

  auto *rate = app.add_subcommand("rate", "Pair rate at the nu1+nu2 mixing peak");
  double a_spot = 250.0, rep_rate = 1e6;
  rate->add_option("--a-spot", a_spot, "Spot size A_spot, um");
  rate->add_option("--rep-rate", rep_rate, "Pulse repetition rate, Hz");

  for (auto *sub : {branches, spec_cmd, oracle, fiber, rate, self_test})
    sub->fallthrough();
  states_cmd->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out_dir(g.out);
    if (branches->parsed()) {
      const auto c = resolve(g);
      const auto table = build_branch_table(c.medium, log_grid(bk_min, bk_max, b_points),
                                            c.thread_count());
      std::ostringstream os;
      os << "k,alpha,omega,C\n";
      for (const auto &row : table.points)
        for (const auto &b : row)
          os << num(b.k) << "," << b.alpha << "," << num(b.omega) << "," << num(b.C) << "\n";
      emit(out_dir / "branches.csv", os.str());
    } else if (spec_cmd->parsed()) {
      const auto c = resolve(g);
      const auto run = run_spectrum(c, out_dir);
      for (const auto &w : run.spectrum.warnings)
        std::cerr << "warning: " << w << "\n";
      if (run.grid.refined)
        std::cerr << "note: grid refined from " << run.grid.requested_points << " to "
                  << run.grid.k_grid.size() << " points\n";
      std::cerr << "wrote " << (out_dir / c.outputs.csv).string() << "\n"
                << "wrote " << (out_dir / c.outputs.peaks).string() << "\n";
      for (const auto &p : run.peaks)
        std::cout << p.process << "  lambda = " << p.lambda << " um  " << condition_text(p)
                  << "  |G|^2 = " << p.prob_max << "\n";
      if (dump_resolved)
        emit(out_dir / "resolved_config.json", dump_config(c).dump(2) + "\n");
    } else if (oracle->parsed()) {
      const auto p = single_tone_problem(o_Omega, o_eps, o_nu, o_tau, o_ti, o_tf);
      std::vector<double> ts(o_points);
      for (std::size_t j = 0; j < o_points; ++j)
        ts[j] = o_ti + (o_tf - o_ti) * (j + 0.5) / static_cast<double>(o_points);
      const auto exact = exact_green_oracle(p, o_tp, ts);
      const auto series = green_series(p, o_tp, ts);
      std::ostringstream os;
      os << "t,t_prime,delta_exact,delta_series,residual\n";
      for (std::size_t j = 0; j < ts.size(); ++j) {
        const double resid = exact[j].deviation - (series[j].d1 + series[j].d2);
        os << num(ts[j]) << "," << num(o_tp) << "," << num(exact[j].exact) << ","
           << num(series[j].total()) << "," << num(resid) << "\n";
      }
      emit(out_dir / "oracle.csv", os.str());
    } else if (fiber->parsed()) {
      const auto c = resolve(g);
      const FiberSpec f{c.medium, f_delta};
      std::ostringstream os;
      os << "k,n,m,alpha,omega,alpha_k\n";
      std::size_t failed = 0;
      for (double k : log_grid(fk_min, fk_max, f_points))
        for (int n = 0; n <= f_nmax; ++n)
          for (int m = 0; m <= f_nmax; ++m)
            for (std::size_t a = 0; a < c.medium.branch_count(); ++a) {
              os << num(k) << "," << n << "," << m << "," << a << ",";
              try {
                const auto b = solve_fiber_branch(f, k, n, m, a);
                os << num(b.omega) << "," << num(b.alpha_k) << "\n";
              } catch (const BranchSolveError &) {
                os << "nan,nan\n";
                ++failed;
              }
            }
      emit(out_dir / "fiber.csv", os.str());
      if (failed)
        std::cerr << "note: " << failed
                  << " branch points left as nan where the transverse correction is not small\n";
    } else if (self_test->parsed()) {
      bool ok = true;
      for (const auto &r : states::run_self_test()) {
        std::printf("%-4s %-48s error %.3e (tol %.1e)\n", r.pass() ? "ok" : "FAIL",
                    r.name.c_str(), r.error, r.tolerance);
        ok = ok && r.pass();
      }
      return ok ? 0 : 3;
    } else if (rate->parsed()) {
      const auto c = resolve(g);
      const auto r = estimate_rate(c, a_spot, rep_rate);
      if (r.lambda_mix == 0.0) {
        std::cerr << "no intrabranch nu1+nu2 peak in the sweep window\n";
        return 3;
      }
      std::printf("lambda_mix     %.6g um\n|G|^2          %.6g\n"
                  "per pulse      %.6g pairs/rad\nper second     %.6g pairs/rad/s\n",
                  r.lambda_mix, r.prob, r.per_pulse, r.per_second);
    }
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError &e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
