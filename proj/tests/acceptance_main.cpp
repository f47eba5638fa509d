// Acceptance suite: one function per criterion, each returning a pass flag,
// a human-readable detail line and a deterministic JSON report. Criterion 10
// regenerates the reports of criteria 3-9 and compares bytes. Run with
// --criterion k for a single criterion, or no arguments for the full set.

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rhls/diagnostics.hpp"
#include "rhls/rng.hpp"
#include "rhls/serialize.hpp"
#include "rhls/sharp.hpp"
#include "rhls/solver.hpp"

using namespace rhls;

namespace {

struct CriterionResult {
  bool pass = false;
  std::string detail;
  ojson report;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

DensityField u_form(const SolveTrace& t) {
  std::vector<double> u(t.final_field.values.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = std::pow(t.raw_scale * t.final_field.values[i], t.q - 1.0);
  return DensityField(t.final_field.mesh, std::move(u));
}

// C1: closed-form sharp constants to 1e-12 relative.
CriterionResult criterion1() {
  CriterionResult res;
  const double v13 = sharp_constant(1, 3.0).value;
  const double v24 = sharp_constant(2, 4.0).value;
  const double e13 = std::abs(v13 - 1.0 / (2 * M_PI * M_PI)) / (1.0 / (2 * M_PI * M_PI));
  const double e24 = std::abs(v24 - 1.0 / (2 * M_PI)) / (1.0 / (2 * M_PI));
  res.pass = e13 <= 1e-12 && e24 <= 1e-12;
  res.detail = "rel errors " + fmt(e13) + ", " + fmt(e24);
  res.report = ojson{{"N_1_3", v13}, {"N_2_4", v24},
                     {"rel_err_1_3", e13}, {"rel_err_2_4", e24}};
  return res;
}

// C2: discrete lower bound for 100 random nonnegative fields on the
// 256-cell interval and the refinement-3 disk.
CriterionResult criterion2() {
  CriterionResult res;
  ojson rep;
  double worst_overall = 1e18;
  const struct {
    const char* name;
    MeshPtr mesh;
    int n;
  } cases[] = {{"interval_256", build_interval_mesh(0, 1, 256), 1},
               {"disk_ref3", build_ball_mesh(2, 1.0, 3), 2}};
  for (const auto& c : cases) {
    auto op = assemble(c.mesh, KernelParams{3.0, 0.0, c.n});
    const double na = sharp_constant(c.n, 3.0).value;
    const double qa = q_alpha(c.n, 3.0);
    Rng rng(1234);
    double worst = 1e18;
    for (int t = 0; t < 100; ++t) {
      std::vector<double> v(c.mesh->nodes.size());
      for (double& x : v) x = rng.uniform();
      DensityField f(c.mesh, v);
      worst = std::min(worst, energy_quotient(op, f, qa).quotient / na);
    }
    rep[c.name] = ojson{{"min_quotient_over_N", worst}};
    worst_overall = std::min(worst_overall, worst);
  }
  res.pass = worst_overall >= 1.0 - 0.02;
  res.detail = "min quotient/N = " + fmt(worst_overall) + " (need >= 0.98)";
  res.report = rep;
  return res;
}

SweepReport acceptance_sweep(double lambda) {
  auto mesh = build_interval_mesh(0, 1, 256);
  const double R = diameter(*mesh) / 4;
  std::vector<double> eps;
  for (int k = 3; k <= 8; ++k) eps.push_back(R / (1 << k));
  return test_function_sweep(*mesh, 1, 3.0, lambda, R, eps, Point{0.5, 0, 0});
}

// C3: non-attainment signature of the lambda = 0 sweep.
CriterionResult criterion3() {
  CriterionResult res;
  SweepReport rep = acceptance_sweep(0.0);
  const double na = sharp_constant(1, 3.0).value;
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < rep.points.size(); ++i)
    decreasing = decreasing && rep.points[i].quotient > rep.points[i + 1].quotient;
  const bool above = std::all_of(rep.points.begin(), rep.points.end(),
                                 [](const SweepPoint& p) { return p.gap > 0; });
  const double final_gap = rep.points.back().gap;
  const double slope = rep.fitted_slope.value_or(-1e9);
  res.pass = decreasing && above && final_gap < 0.05 * na &&
             std::abs(slope - 1.0) <= 0.3;
  res.detail = "decreasing=" + std::string(decreasing ? "yes" : "no") +
               ", final gap/N = " + fmt(final_gap / na) +
               ", slope = " + fmt(slope);
  res.report = to_json(rep);
  return res;
}

// C4: the same sweep with lambda = -0.5 is required to dip at least one
// percent below the constant. In one dimension at R = diameter/4 both gap
// terms scale linearly in eps and the truncation term dominates on this
// grid, so the honest quotient never dips; the criterion is reported as
// it stands. See README "Known limits".
CriterionResult criterion4() {
  CriterionResult res;
  SweepReport rep = acceptance_sweep(-0.5);
  const double na = sharp_constant(1, 3.0).value;
  double min_q = 1e18;
  for (const auto& p : rep.points) min_q = std::min(min_q, p.quotient);
  res.pass = min_q < na - 0.01 * na;
  res.detail = "min quotient/N = " + fmt(min_q / na) +
               " (need < 0.99); regime: " + rep.regime;
  res.report = to_json(rep);
  return res;
}

// C5: subcritical solve quality and agreement with the brute-force
// coordinate-descent minimizer.
CriterionResult criterion5() {
  CriterionResult res;
  ojson rep;
  bool pass = true;
  for (double lambda : {0.0, -0.5}) {
    auto mesh = build_interval_mesh(0, 1, 256);
    auto op = assemble(mesh, KernelParams{3.0, lambda, 1});
    SolveTrace t = solve_fixed_point(op, 0.25, SolverConfig{});
    const bool ok = t.status == SolveStatus::converged && t.residual < 1e-8;
    pass = pass && ok;
    rep["solve_lambda_" + fmt(lambda)] =
        ojson{{"status", solve_status_name(t.status)},
              {"residual", t.residual},
              {"iterations", t.iterations}};
  }
  {
    auto mesh = build_interval_mesh(0, 1, 40);
    auto op = assemble(mesh, KernelParams{3.0, 0.0, 1});
    SolverConfig cfg;
    cfg.tol_rel = 1e-11;
    SolveTrace t = solve_fixed_point(op, 0.25, cfg);
    auto oracle = oracles::coordinate_descent_minimizer(op, 0.25);
    double supdiff = 0;
    for (std::size_t i = 0; i < oracle.size(); ++i)
      supdiff = std::max(supdiff, std::abs(oracle[i] - t.final_field.values[i]));
    pass = pass && t.status == SolveStatus::converged && supdiff < 1e-4;
    rep["oracle_supdiff_40_cells"] = supdiff;
    res.detail = "oracle sup-diff = " + fmt(supdiff);
  }
  res.pass = pass;
  res.report = rep;
  return res;
}

// C6: radial symmetry, monotone increase of the u-form, and the
// reflection-comparison slack on the disk.
CriterionResult criterion6() {
  CriterionResult res;
  auto disk = build_ball_mesh(2, 1.0, 3);
  auto op = assemble(disk, KernelParams{3.0, 0.0, 2});
  const double q = 0.3 * q_alpha(2, 3.0);
  SolveTrace t = solve_fixed_point(op, q, SolverConfig{});
  if (t.status != SolveStatus::converged) {
    res.detail = "solve did not converge";
    return res;
  }
  DensityField u = u_form(t);
  SymmetryReport sym = symmetry_report(*disk, u, 8, 1e-9);
  bool pass = sym.radial_spread < 1e-3 && sym.monotone_violations == 0;
  ojson rep;
  rep["symmetry"] = to_json(sym);
  const double p = q / (q - 1.0);
  ojson planes = ojson::array();
  double worst_slack = 1e18;
  for (double pl : {-0.75, -0.5, -0.25}) {
    MovingPlaneResult mp = moving_plane_check(op, u, p, pl, 32);
    worst_slack = std::min(worst_slack, mp.min_slack);
    pass = pass && mp.min_slack >= -1e-3;
    planes.push_back(ojson{{"plane_lambda", pl}, {"min_slack", mp.min_slack}});
  }
  rep["moving_plane"] = planes;
  res.pass = pass;
  res.detail = "spread = " + fmt(sym.radial_spread) +
               ", violations = " + std::to_string(sym.monotone_violations) +
               ", min slack = " + fmt(worst_slack);
  res.report = rep;
  return res;
}

// C7: boundary/volume identity under refinement, plus the exact critical
// coefficient cancellation.
CriterionResult criterion7() {
  CriterionResult res;
  const double q = 0.4 * q_alpha(2, 3.0);
  const double p = q / (q - 1.0);
  std::vector<double> rels;
  ojson levels = ojson::array();
  for (int ref : {1, 2, 3}) {
    auto disk = build_ball_mesh(2, 1.0, ref);
    auto op = assemble(disk, KernelParams{3.0, -0.5, 2});
    SolveTrace t = solve_fixed_point(op, q, SolverConfig{});
    if (t.status != SolveStatus::converged) {
      res.detail = "solve did not converge at refinement " + std::to_string(ref);
      return res;
    }
    PohozaevReport prep = pohozaev_residual(op, u_form(t), p);
    rels.push_back(std::abs(prep.relative_residual));
    levels.push_back(ojson{{"refinement", ref},
                           {"relative_residual", prep.relative_residual}});
  }
  const double o12 = std::log2(rels[0] / rels[1]);
  const double o23 = std::log2(rels[1] / rels[2]);
  const bool coeff_exact = pohozaev_coefficient(1, 3.0, p_alpha(1, 3.0)) == 0.0 &&
                           pohozaev_coefficient(2, 3.0, p_alpha(2, 3.0)) == 0.0;
  res.pass = rels[2] < 1e-2 && rels[0] > rels[1] && rels[1] > rels[2] &&
             o12 >= 1.0 && o23 >= 1.0 && coeff_exact;
  res.detail = "residuals " + fmt(rels[0]) + " > " + fmt(rels[1]) + " > " +
               fmt(rels[2]) + ", orders " + fmt(o12) + ", " + fmt(o23);
  res.report = ojson{{"levels", levels},
                     {"orders", {o12, o23}},
                     {"critical_coefficient_exact", coeff_exact}};
  return res;
}

// C8: the probe never reports a converged run passing the identity in the
// obstructed regime; the coupled control converges.
CriterionResult criterion8() {
  CriterionResult res;
  auto disk = build_ball_mesh(2, 1.0, 3);
  const double q = q_alpha(2, 3.0);
  SolverConfig cfg;
  cfg.max_iters = 4000;
  cfg.seed = 2026;
  ojson rep;
  bool pass = true;
  for (double lambda : {0.0, 0.2}) {
    auto op = assemble(disk, KernelParams{3.0, lambda, 2});
    NonexistenceReport r = nonexistence_probe(op, q, cfg, 5);
    pass = pass &&
           r.classification != ProbeClassification::converged_and_pohozaev_passed;
    rep["probe_lambda_" + fmt(lambda)] = to_json(r);
  }
  {
    auto op = assemble(disk, KernelParams{3.0, -0.5, 2});
    SolveTrace t = solve_fixed_point(op, q, cfg);
    pass = pass && t.status == SolveStatus::converged;
    rep["control_lambda_-0.5"] = ojson{{"status", solve_status_name(t.status)},
                                       {"residual", t.residual}};
    res.detail = std::string("obstructed runs never pass; control ") +
                 solve_status_name(t.status);
  }
  res.pass = pass;
  res.report = rep;
  return res;
}

// C9: critical continuation. The uniform two-sided band bound of 10^3 is
// evaluated as stated; near the critical exponent the minimizers
// concentrate (the limiting gap below the constant is ~2e-3 relative), so
// the observed band is orders of magnitude larger. See README "Known
// limits".
CriterionResult criterion9() {
  CriterionResult res;
  auto mesh = build_interval_mesh(0, 1, 1024);
  auto op = assemble(mesh, KernelParams{3.0, -0.5, 1});
  SolverConfig cfg;
  cfg.max_iters = 30000;
  cfg.damping_theta = 0.4;
  ContinuationResult r;
  try {
    r = critical_continuation(op, default_continuation_grid(1, 3.0), cfg);
  } catch (const std::exception& e) {
    res.detail = std::string("continuation failed: ") + e.what();
    return res;
  }
  const double na = sharp_constant(1, 3.0).value;
  double max_f = 0, min_f = 1e18, env_ratio = 0;
  ojson blowups = ojson::array();
  for (const auto& pt : r.points) {
    max_f = std::max(max_f, pt.max_f);
    min_f = std::min(min_f, pt.min_f);
    BlowupReport b = blowup_rescale(pt.field, pt.q, 3.0);
    env_ratio = std::max(env_ratio, b.fitted_C2 / b.fitted_C1);
    blowups.push_back(ojson{{"q", pt.q},
                            {"envelope_ratio", b.fitted_C2 / b.fitted_C1}});
  }
  const double band = max_f / min_f;
  const bool band_ok = band < 1e3;
  const bool extrap_ok = r.extrapolated_Q < na;
  const bool env_ok = env_ratio < 1e2;
  res.pass = band_ok && extrap_ok && env_ok;
  res.detail = "band = " + fmt(band) + (band_ok ? "" : " (>= 1e3)") +
               ", extrapolated Q/N = " + fmt(r.extrapolated_Q / na) +
               ", envelope ratio = " + fmt(env_ratio);
  ojson rep = to_json(r);
  rep["blowup"] = blowups;
  rep["band"] = band;
  rep["N_alpha"] = na;
  res.report = rep;
  return res;
}

// C10: byte determinism of the reports behind criteria 3-9.
CriterionResult criterion10() {
  CriterionResult res;
  using Gen = CriterionResult (*)();
  const std::pair<const char*, Gen> gens[] = {
      {"c3", &criterion3}, {"c4", &criterion4}, {"c5", &criterion5},
      {"c6", &criterion6}, {"c7", &criterion7}, {"c8", &criterion8},
      {"c9", &criterion9}};
  bool pass = true;
  ojson rep;
  for (const auto& [name, gen] : gens) {
    const std::string a = gen().report.dump();
    const std::string b = gen().report.dump();
    const bool same = a == b;
    pass = pass && same;
    rep[name] = same;
  }
  res.pass = pass;
  res.detail = pass ? "all reports byte-identical across reruns"
                    : "re-run produced different bytes";
  res.report = rep;
  return res;
}

struct Entry {
  const char* name;
  CriterionResult (*fn)();
};

const Entry kCriteria[] = {
    {"sharp constant closed forms", &criterion1},
    {"discrete reversed lower bound on random fields", &criterion2},
    {"non-attainment sweep, lambda = 0", &criterion3},
    {"coupled sweep dip, lambda = -0.5", &criterion4},
    {"subcritical existence and oracle agreement", &criterion5},
    {"radial symmetry and reflection comparison", &criterion6},
    {"boundary/volume identity under refinement", &criterion7},
    {"nonexistence probe classifications", &criterion8},
    {"critical continuation", &criterion9},
    {"byte determinism of reports", &criterion10},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  int failures = 0;
  for (int k = 1; k <= 10; ++k) {
    if (only != 0 && only != k) continue;
    const CriterionResult r = kCriteria[k - 1].fn();
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "C" << k << ": "
              << kCriteria[k - 1].name;
    if (!r.detail.empty()) std::cout << " — " << r.detail;
    std::cout << "\n";
    if (!r.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
