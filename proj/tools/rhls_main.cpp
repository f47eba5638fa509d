// Command-line laboratory for the negative-power integral equation
// f^(q-1) = K_lambda f on bounded domains: sharp-constant evaluation,
// truncated-extremal sweeps, fixed-point and descent solves, solution
// verification, critical continuation and nonexistence probes. Every
// command echoes its fully resolved configuration into the output JSON and
// is byte-reproducible for a fixed seed.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rhls/diagnostics.hpp"
#include "rhls/serialize.hpp"
#include "rhls/sharp.hpp"
#include "rhls/solver.hpp"

namespace fs = std::filesystem;
using namespace rhls;

namespace {

struct GlobalOpts {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool strict = false;
  int threads = 0;
};

struct DomainOpts {
  std::string shape = "interval";
  double xa = 0.0, xb = 1.0;
  int cells = 256;
  int dim = 2;
  double radius = 1.0;
  int refinement = 3;
  std::vector<double> lows{0, 0};
  std::vector<double> highs{1, 1};
  std::vector<int> cells_per_axis{4, 4};
};

void add_domain_options(CLI::App* cmd, DomainOpts& d) {
  cmd->add_option("--shape", d.shape, "interval | ball | box")
      ->check(CLI::IsMember({"interval", "ball", "box"}))
      ->capture_default_str();
  cmd->add_option("--xa", d.xa, "interval left endpoint")->capture_default_str();
  cmd->add_option("--xb", d.xb, "interval right endpoint")->capture_default_str();
  cmd->add_option("--cells", d.cells, "interval cell count")->capture_default_str();
  cmd->add_option("--dim", d.dim, "ball/box dimension (2 or 3)")->capture_default_str();
  cmd->add_option("--radius", d.radius, "ball radius")->capture_default_str();
  cmd->add_option("--refinement", d.refinement, "ball refinement level")
      ->capture_default_str();
  cmd->add_option("--lows", d.lows, "box lower corner")->expected(2, 3);
  cmd->add_option("--highs", d.highs, "box upper corner")->expected(2, 3);
  cmd->add_option("--cells-per-axis", d.cells_per_axis, "box cells per axis")
      ->expected(2, 3);
}

MeshPtr build_domain(const DomainOpts& d) {
  if (d.shape == "interval") return build_interval_mesh(d.xa, d.xb, d.cells);
  if (d.shape == "ball") return build_ball_mesh(d.dim, d.radius, d.refinement);
  Point lo{}, hi{};
  std::array<int, 3> cpa{1, 1, 1};
  for (std::size_t i = 0; i < d.lows.size() && i < 3; ++i) lo[i] = d.lows[i];
  for (std::size_t i = 0; i < d.highs.size() && i < 3; ++i) hi[i] = d.highs[i];
  for (std::size_t i = 0; i < d.cells_per_axis.size() && i < 3; ++i)
    cpa[i] = d.cells_per_axis[i];
  return build_box_mesh(d.dim, lo, hi, cpa);
}

ojson domain_json(const DomainOpts& d) {
  ojson j;
  j["shape"] = d.shape;
  if (d.shape == "interval") {
    j["xa"] = d.xa;
    j["xb"] = d.xb;
    j["cells"] = d.cells;
  } else if (d.shape == "ball") {
    j["dim"] = d.dim;
    j["radius"] = d.radius;
    j["refinement"] = d.refinement;
  } else {
    j["dim"] = d.dim;
    j["lows"] = d.lows;
    j["highs"] = d.highs;
    j["cells_per_axis"] = d.cells_per_axis;
  }
  return j;
}

ojson global_json(const GlobalOpts& g) {
  return ojson{{"out_dir", g.out_dir},
               {"seed", g.seed},
               {"strict", g.strict},
               {"threads", g.threads}};
}

void emit(const GlobalOpts& g, const std::string& name, const ojson& j) {
  fs::create_directories(g.out_dir);
  write_text_file((fs::path(g.out_dir) / name).string(), j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
}

struct SolverOpts {
  int max_iters = 20000;
  double tol_rel = 1e-9;
  double theta = 0.5;
  double floor = 1e-8;
  std::string mode = "fixed_point";
};

void add_solver_options(CLI::App* cmd, SolverOpts& s) {
  cmd->add_option("--max-iters", s.max_iters)->capture_default_str();
  cmd->add_option("--tol-rel", s.tol_rel)->capture_default_str();
  cmd->add_option("--theta", s.theta, "geometric damping weight in (0,1]")
      ->capture_default_str();
  cmd->add_option("--floor", s.floor, "positivity floor")->capture_default_str();
  cmd->add_option("--mode", s.mode)
      ->check(CLI::IsMember({"fixed_point", "quotient_descent"}))
      ->capture_default_str();
}

SolverConfig make_config(const SolverOpts& s, const GlobalOpts& g) {
  SolverConfig cfg;
  cfg.max_iters = s.max_iters;
  cfg.tol_rel = s.tol_rel;
  cfg.damping_theta = s.theta;
  cfg.positivity_floor = s.floor;
  cfg.mode = s.mode == "fixed_point" ? SolverMode::fixed_point
                                     : SolverMode::quotient_descent;
  cfg.seed = g.seed;
  return cfg;
}

ojson solver_json(const SolverOpts& s) {
  return ojson{{"mode", s.mode},
               {"max_iters", s.max_iters},
               {"tol_rel", s.tol_rel},
               {"theta", s.theta},
               {"floor", s.floor}};
}

int run_cli(int argc, char** argv) {
  CLI::App app{"numerical laboratory for the reversed-regime integral equation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file; flags override");

  GlobalOpts g;
  app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "seed for randomized restarts")->capture_default_str();
  app.add_flag("--strict", g.strict, "exit 4 on solver non-convergence");
  app.add_option("--threads", g.threads, "assembly threads (0 = auto)")
      ->capture_default_str();

  // constant
  auto* c_const = app.add_subcommand("constant", "sharp constant N_alpha");
  int cn = 1;
  double calpha = 3.0;
  c_const->add_option("--n", cn)->required();
  c_const->add_option("--alpha", calpha)->required();

  // sweep-eps
  auto* c_sweep = app.add_subcommand(
      "sweep-eps", "energy quotients of truncated concentration profiles");
  DomainOpts sw_dom;
  add_domain_options(c_sweep, sw_dom);
  double sw_alpha = 3.0, sw_lambda = 0.0, sw_R = 0.0;
  std::vector<double> sw_center;
  std::vector<double> sw_eps;
  c_sweep->add_option("--alpha", sw_alpha)->capture_default_str();
  c_sweep->add_option("--lambda", sw_lambda)->capture_default_str();
  c_sweep->add_option("--R", sw_R, "truncation radius (default diameter/4)");
  c_sweep->add_option("--center", sw_center, "ball center (default domain center)")
      ->expected(1, 3);
  c_sweep->add_option("--epsilons", sw_eps,
                      "epsilon grid (default dyadic R/8 .. R/256)");

  // solve
  auto* c_solve = app.add_subcommand("solve", "solve f^(q-1) = K f");
  DomainOpts so_dom;
  add_domain_options(c_solve, so_dom);
  SolverOpts so_opts;
  add_solver_options(c_solve, so_opts);
  double so_alpha = 3.0, so_lambda = 0.0, so_q = 0.25;
  bool so_iters_csv = false;
  std::string so_dump_kernel;
  c_solve->add_option("--alpha", so_alpha)->capture_default_str();
  c_solve->add_option("--lambda", so_lambda)->capture_default_str();
  c_solve->add_option("--q", so_q)->capture_default_str();
  c_solve->add_flag("--iters-csv", so_iters_csv, "also write per-iteration CSV");
  c_solve->add_option("--dump-kernel", so_dump_kernel,
                      "binary dump of the assembled kernel matrix");

  // verify
  auto* c_verify = app.add_subcommand("verify", "diagnostics on a solution file");
  std::string vf_solution;
  std::string vf_checks = "pohozaev,symmetry,moving-plane";
  int vf_bins = 8, vf_samples = 32;
  double vf_sym_tol = 1e-3, vf_mono_tol = 1e-9, vf_pohozaev_tol = 2e-2;
  double vf_slack_tol = 1e-3;
  std::vector<double> vf_planes{-0.75, -0.5, -0.25};
  std::string vf_volume = "derived";
  c_verify->add_option("--solution", vf_solution)->required();
  c_verify->add_option("--checks", vf_checks)->capture_default_str();
  c_verify->add_option("--bins", vf_bins)->capture_default_str();
  c_verify->add_option("--samples", vf_samples)->capture_default_str();
  c_verify->add_option("--sym-tol", vf_sym_tol)->capture_default_str();
  c_verify->add_option("--mono-tol", vf_mono_tol)->capture_default_str();
  c_verify->add_option("--pohozaev-tol", vf_pohozaev_tol)->capture_default_str();
  c_verify->add_option("--slack-tol", vf_slack_tol)->capture_default_str();
  c_verify->add_option("--plane-lambdas", vf_planes)->expected(1, 8);
  c_verify->add_option("--pohozaev-volume", vf_volume)
      ->check(CLI::IsMember({"derived", "statement"}))
      ->capture_default_str();

  // continuation
  auto* c_cont = app.add_subcommand("continuation", "subcritical family q -> q_alpha");
  DomainOpts co_dom;
  add_domain_options(c_cont, co_dom);
  SolverOpts co_opts;
  add_solver_options(c_cont, co_opts);
  double co_alpha = 3.0, co_lambda = -0.5;
  std::vector<double> co_grid;
  c_cont->add_option("--alpha", co_alpha)->capture_default_str();
  c_cont->add_option("--lambda", co_lambda)->capture_default_str();
  c_cont->add_option("--q-grid", co_grid, "explicit q grid (default auto)");

  // nonexistence
  auto* c_nonex = app.add_subcommand("nonexistence", "multi-start probe with boundary-sign audit");
  DomainOpts ne_dom;
  ne_dom.shape = "ball";
  add_domain_options(c_nonex, ne_dom);
  SolverOpts ne_opts;
  ne_opts.max_iters = 4000;
  add_solver_options(c_nonex, ne_opts);
  double ne_alpha = 3.0, ne_lambda = 0.0, ne_q = 0.0;
  int ne_restarts = 5;
  c_nonex->add_option("--alpha", ne_alpha)->capture_default_str();
  c_nonex->add_option("--lambda", ne_lambda)->capture_default_str();
  c_nonex->add_option("--q", ne_q, "exponent (default q_alpha)");
  c_nonex->add_option("--restarts", ne_restarts)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // 2 = invalid parameters; --help stays 0
  }

  if (c_const->parsed()) {
    SharpConstant c = sharp_constant(cn, calpha);
    ojson j;
    j["config"] = ojson{{"command", "constant"}, {"n", cn}, {"alpha", calpha},
                        {"global", global_json(g)}};
    j["n"] = c.n;
    j["alpha"] = c.alpha;
    j["value"] = c.value;
    emit(g, "constant.json", j);
    return 0;
  }

  if (c_sweep->parsed()) {
    MeshPtr mesh = build_domain(sw_dom);
    const double d = diameter(*mesh);
    const double R = sw_R > 0 ? sw_R : d / 4;
    Point center{};
    if (!sw_center.empty()) {
      for (std::size_t i = 0; i < sw_center.size() && i < 3; ++i)
        center[i] = sw_center[i];
    } else if (mesh->shape_tag == ShapeTag::ball) {
      center = mesh->center;
    } else {
      for (int i = 0; i < mesh->dim; ++i)
        center[i] = 0.5 * (mesh->lows[i] + mesh->highs[i]);
    }
    std::vector<double> eps = sw_eps;
    if (eps.empty())
      for (int k = 3; k <= 8; ++k) eps.push_back(R / (1 << k));
    SweepReport rep =
        test_function_sweep(*mesh, mesh->dim, sw_alpha, sw_lambda, R, eps, center);
    ojson j;
    j["config"] = ojson{{"command", "sweep-eps"},
                        {"domain", domain_json(sw_dom)},
                        {"alpha", sw_alpha},
                        {"lambda", sw_lambda},
                        {"R", R},
                        {"epsilons", eps},
                        {"global", global_json(g)}};
    j["report"] = to_json(rep);
    fs::create_directories(g.out_dir);
    write_text_file((fs::path(g.out_dir) / "sweep.csv").string(), sweep_csv(rep));
    emit(g, "sweep.json", j);
    return 0;
  }

  if (c_solve->parsed()) {
    MeshPtr mesh = build_domain(so_dom);
    KernelOperator op = assemble(mesh, KernelParams{so_alpha, so_lambda, mesh->dim},
                                 SelfCellRule::subdivide(16), g.threads);
    if (!so_dump_kernel.empty()) {
      std::ofstream out(so_dump_kernel, std::ios::binary);
      dump_matrix(op, out);
    }
    SolverConfig cfg = make_config(so_opts, g);
    ojson config = ojson{{"command", "solve"},
                         {"domain", domain_json(so_dom)},
                         {"alpha", so_alpha},
                         {"lambda", so_lambda},
                         {"q", so_q},
                         {"solver", solver_json(so_opts)},
                         {"global", global_json(g)}};
    SolveTrace trace;
    if (cfg.mode == SolverMode::fixed_point) {
      trace = solve_fixed_point(op, so_q, cfg);
    } else {
      auto [rep, field] = minimize_subcritical(op, so_q, cfg);
      // package the minimizer in trace form for uniform reporting
      trace.q = so_q;
      trace.lambda = so_lambda;
      trace.alpha = so_alpha;
      trace.status = SolveStatus::converged;
      trace.final_field = field;
      trace.multiplier = rep.quotient;
      trace.raw_scale = std::pow(rep.quotient, 1.0 / (so_q - 2.0));
      DensityField kf = apply(op, field);
      double num = 0, den = 0;
      for (std::size_t i = 0; i < field.values.size(); ++i) {
        const double lhs = rep.quotient * std::pow(field.values[i], so_q - 1.0);
        num = std::max(num, std::abs(lhs - kf.values[i]));
        den = std::max(den, std::abs(lhs));
      }
      trace.residual = num / den;
      trace.iterations = 0;
    }
    fs::create_directories(g.out_dir);
    write_text_file((fs::path(g.out_dir) / "solution.csv").string(),
                    solution_csv(*mesh, trace.final_field.values, trace.raw_scale));
    if (so_iters_csv)
      write_text_file((fs::path(g.out_dir) / "iterations.csv").string(),
                      iterations_csv(trace));
    emit(g, "solve.json", solution_to_json(trace, config));
    if (g.strict && trace.status != SolveStatus::converged) return 4;
    return 0;
  }

  if (c_verify->parsed()) {
    const ojson doc = ojson::parse(read_text_file(vf_solution), nullptr, true);
    LoadedSolution sol = solution_from_json(doc);
    KernelOperator op =
        assemble(sol.mesh, KernelParams{sol.alpha, sol.lambda, sol.mesh->dim},
                 SelfCellRule::subdivide(16), g.threads);
    // u-form of the raw-scaled solution
    std::vector<double> u(sol.field.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      u[i] = std::pow(sol.raw_scale * sol.field[i], sol.q - 1.0);
    DensityField uf(sol.mesh, u);
    const double p = sol.q / (sol.q - 1.0);

    ojson j;
    j["config"] = ojson{{"command", "verify"},
                        {"solution", vf_solution},
                        {"checks", vf_checks},
                        {"tolerances",
                         ojson{{"pohozaev", vf_pohozaev_tol},
                               {"symmetry_spread", vf_sym_tol},
                               {"monotone", vf_mono_tol},
                               {"slack", vf_slack_tol}}},
                        {"global", global_json(g)}};
    bool all_pass = true;
    if (vf_checks.find("pohozaev") != std::string::npos) {
      PohozaevReport rep = pohozaev_residual(
          op, uf, p,
          vf_volume == "derived" ? PohozaevVolumeKernel::derived
                                 : PohozaevVolumeKernel::statement);
      const bool pass = std::abs(rep.relative_residual) < vf_pohozaev_tol;
      all_pass = all_pass && pass;
      ojson jr = to_json(rep);
      jr["pass"] = pass;
      j["pohozaev"] = jr;
    }
    if (vf_checks.find("symmetry") != std::string::npos) {
      if (sol.mesh->shape_tag == ShapeTag::ball) {
        SymmetryReport rep = symmetry_report(*sol.mesh, uf, vf_bins, vf_mono_tol);
        const bool pass =
            rep.radial_spread < vf_sym_tol && rep.monotone_violations == 0;
        all_pass = all_pass && pass;
        ojson jr = to_json(rep);
        jr["pass"] = pass;
        j["symmetry"] = jr;
      } else {
        j["symmetry"] = ojson{{"skipped", "mesh is not a ball"}};
      }
    }
    if (vf_checks.find("moving-plane") != std::string::npos) {
      if (sol.mesh->shape_tag == ShapeTag::ball && sol.lambda == 0 &&
          std::abs(sol.mesh->radius - 1.0) <= 1e-12) {
        ojson arr = ojson::array();
        for (double pl : vf_planes) {
          MovingPlaneResult mp = moving_plane_check(op, uf, p, pl, vf_samples);
          const bool pass = mp.min_slack >= -vf_slack_tol;
          all_pass = all_pass && pass;
          ojson jr = to_json(mp);
          jr["pass"] = pass;
          arr.push_back(jr);
        }
        j["moving_plane"] = arr;
      } else {
        j["moving_plane"] =
            ojson{{"skipped", "requires the unit ball with lambda = 0"}};
      }
    }
    j["all_pass"] = all_pass;
    emit(g, "verify.json", j);
    return 0;
  }

  if (c_cont->parsed()) {
    MeshPtr mesh = build_domain(co_dom);
    KernelOperator op = assemble(mesh, KernelParams{co_alpha, co_lambda, mesh->dim},
                                 SelfCellRule::subdivide(16), g.threads);
    std::vector<double> grid =
        co_grid.empty() ? default_continuation_grid(mesh->dim, co_alpha) : co_grid;
    SolverConfig cfg = make_config(co_opts, g);
    ContinuationResult res = critical_continuation(op, grid, cfg);
    ojson j;
    j["config"] = ojson{{"command", "continuation"},
                        {"domain", domain_json(co_dom)},
                        {"alpha", co_alpha},
                        {"lambda", co_lambda},
                        {"q_grid", grid},
                        {"solver", solver_json(co_opts)},
                        {"global", global_json(g)}};
    ojson jr = to_json(res);
    ojson envs = ojson::array();
    for (const auto& pt : res.points)
      envs.push_back(to_json(blowup_rescale(pt.field, pt.q, co_alpha)));
    jr["blowup"] = envs;
    j["report"] = jr;
    fs::create_directories(g.out_dir);
    write_text_file((fs::path(g.out_dir) / "continuation.csv").string(),
                    continuation_csv(res));
    emit(g, "continuation.json", j);
    return 0;
  }

  if (c_nonex->parsed()) {
    MeshPtr mesh = build_domain(ne_dom);
    KernelOperator op = assemble(mesh, KernelParams{ne_alpha, ne_lambda, mesh->dim},
                                 SelfCellRule::subdivide(16), g.threads);
    const double q = ne_q > 0 ? ne_q : q_alpha(mesh->dim, ne_alpha);
    SolverConfig cfg = make_config(ne_opts, g);
    NonexistenceReport rep = nonexistence_probe(op, q, cfg, ne_restarts);
    ojson j;
    j["config"] = ojson{{"command", "nonexistence"},
                        {"domain", domain_json(ne_dom)},
                        {"alpha", ne_alpha},
                        {"lambda", ne_lambda},
                        {"q", q},
                        {"restarts", ne_restarts},
                        {"solver", solver_json(ne_opts)},
                        {"global", global_json(g)}};
    j["report"] = to_json(rep);
    emit(g, "nonexistence.json", j);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ConsistencyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
