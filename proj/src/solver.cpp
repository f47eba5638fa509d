#include "rhls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rhls/diagnostics.hpp"
#include "rhls/rng.hpp"
#include "rhls/sharp.hpp"

namespace rhls {

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::diverged_unbounded: return "diverged_unbounded";
    case SolveStatus::collapsed_to_zero: return "collapsed_to_zero";
    case SolveStatus::max_iters: return "max_iters";
  }
  return "unknown";
}

const char* probe_classification_name(ProbeClassification c) {
  switch (c) {
    case ProbeClassification::no_convergence_observed:
      return "no_convergence_observed";
    case ProbeClassification::converged_but_pohozaev_violated:
      return "converged_but_pohozaev_violated";
    case ProbeClassification::converged_and_pohozaev_passed:
      return "converged_and_pohozaev_passed";
  }
  return "unknown";
}

namespace {

void normalize_q(const Mesh& mesh, std::vector<double>& f, double q) {
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += mesh.weights[i] * std::pow(f[i], q);
  const double qn = std::pow(s, 1.0 / q);
  for (double& v : f) v /= qn;
}

double quotient_normalized(const KernelOperator& op,
                           const std::vector<double>& f,
                           const std::vector<double>& kf) {
  // f' S f with |f|_q = 1 equals sum_i w_i f_i (K f)_i.
  const auto& w = op.mesh()->weights;
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * kf[i];
  return s;
}

}  // namespace

SolveTrace solve_fixed_point(const KernelOperator& op, double q,
                             const SolverConfig& config,
                             const DensityField* f0) {
  if (!(q > 0) || !(q < 1))
    throw std::invalid_argument("solve_fixed_point: q must lie in (0, 1)");
  if (!(config.damping_theta > 0) || !(config.damping_theta <= 1))
    throw std::invalid_argument("solve_fixed_point: damping_theta must lie in (0, 1]");
  if (!(config.tol_rel > 0) || !(config.tol_rel < 1))
    throw std::invalid_argument("solve_fixed_point: tol_rel must lie in (0, 1)");

  const Mesh& mesh = *op.mesh();
  const auto n = static_cast<Eigen::Index>(mesh.nodes.size());
  std::vector<double> f;
  if (f0) {
    if (f0->values.size() != mesh.nodes.size())
      throw std::invalid_argument("solve_fixed_point: f0 size mismatch");
    for (double v : f0->values)
      if (!(v > 0))
        throw std::invalid_argument("solve_fixed_point: f0 must be strictly positive");
    f = f0->values;
  } else {
    f.assign(mesh.nodes.size(), 1.0);
  }
  normalize_q(mesh, f, q);

  SolveTrace trace;
  trace.q = q;
  trace.lambda = op.params().lambda;
  trace.alpha = op.params().alpha;

  const double theta = config.damping_theta;
  const double inv_qm1 = 1.0 / (q - 1.0);
  const double floor = config.positivity_floor;
  Eigen::VectorXd kf(n);
  double change = std::numeric_limits<double>::infinity();
  int bad_streak = 0;
  bool bad_is_unbounded = false;
  double quotient = 0, residual = std::numeric_limits<double>::infinity();

  for (int it = 0; it < config.max_iters; ++it) {
    Eigen::Map<const Eigen::VectorXd> fv(f.data(), n);
    kf.noalias() = op.apply_matrix() * fv;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!(kf[i] > 0))
        throw std::runtime_error(
            "solve_fixed_point: K f is non-positive at a node (inadmissible lambda?)");

    quotient = quotient_normalized(op, f, {kf.data(), kf.data() + n});
    double res_num = 0, res_den = 0, minf = f[0], maxf = f[0];
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lhs = quotient * std::pow(f[i], q - 1.0);
      res_num = std::max(res_num, std::abs(lhs - kf[i]));
      res_den = std::max(res_den, std::abs(lhs));
      minf = std::min(minf, f[i]);
      maxf = std::max(maxf, f[i]);
    }
    residual = res_num / res_den;
    trace.iterates.push_back({residual, minf, maxf, quotient});
    trace.iterations = it + 1;

    if (change < config.tol_rel && residual < 10 * config.tol_rel) {
      trace.status = SolveStatus::converged;
      break;
    }

    double max_new = 0;
    bool clamped = false;
    std::vector<double> fn(f.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = std::pow(f[i], 1.0 - theta) * std::pow(kf[i], theta * inv_qm1);
      if (v < floor) {
        v = floor;
        clamped = true;
        ++trace.floor_activations;
      }
      fn[i] = v;
    }
    // Escape upward shows as a normalized spike; pointwise collapse shows
    // as the positivity floor staying engaged.
    if (maxf > 1.0 / floor || clamped) {
      bad_is_unbounded = maxf > 1.0 / floor;
      if (++bad_streak >= 10) {
        trace.status = bad_is_unbounded ? SolveStatus::diverged_unbounded
                                        : SolveStatus::collapsed_to_zero;
        trace.final_field = DensityField(op.mesh(), std::move(f));
        trace.multiplier = quotient;
        trace.raw_scale = std::pow(quotient, 1.0 / (q - 2.0));
        trace.residual = residual;
        return trace;
      }
    } else {
      bad_streak = 0;
    }
    normalize_q(mesh, fn, q);
    change = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      change = std::max(change, std::abs(fn[i] - f[i]));
      max_new = std::max(max_new, std::abs(fn[i]));
    }
    change /= max_new;
    f.swap(fn);
  }

  trace.final_field = DensityField(op.mesh(), std::move(f));
  trace.multiplier = quotient;
  trace.raw_scale = std::pow(quotient, 1.0 / (q - 2.0));
  trace.residual = residual;
  return trace;
}

namespace {

// One multiplicative-descent run from a given start; returns the
// normalized iterate and its quotient.
std::pair<std::vector<double>, double> descend_quotient(
    const KernelOperator& op, double q, std::vector<double> f, int max_iters) {
  const Mesh& mesh = *op.mesh();
  const auto nn = static_cast<Eigen::Index>(mesh.nodes.size());
  normalize_q(mesh, f, q);

  Eigen::VectorXd kf(nn);
  auto eval_quotient = [&](const std::vector<double>& g) {
    Eigen::Map<const Eigen::VectorXd> gv(g.data(), nn);
    kf.noalias() = op.apply_matrix() * gv;
    return quotient_normalized(op, g, {kf.data(), kf.data() + nn});
  };

  double quotient = eval_quotient(f);
  double eta = 0.1;
  int flat_streak = 0;
  for (int it = 0; it < max_iters; ++it) {
    // kf holds K f for the current iterate (descent direction source).
    double scale = 0;
    std::vector<double> dir(f.size());
    for (Eigen::Index i = 0; i < nn; ++i) {
      dir[i] = kf[i] - quotient * std::pow(f[i], q - 1.0);
      scale = std::max(scale, std::abs(dir[i]));
    }
    if (scale == 0) break;
    for (double& v : dir) v /= scale;

    bool accepted = false;
    std::vector<double> fn(f.size());
    for (int bt = 0; bt < 50; ++bt) {
      for (Eigen::Index i = 0; i < nn; ++i)
        fn[i] = f[i] * std::exp(-eta * dir[i]);
      normalize_q(mesh, fn, q);
      const double qn = eval_quotient(fn);
      if (qn < quotient) {
        const double drop = (quotient - qn) / std::abs(quotient);
        f.swap(fn);
        quotient = qn;
        eta *= 1.25;
        accepted = true;
        flat_streak = drop < 1e-14 ? flat_streak + 1 : 0;
        break;
      }
      eta *= 0.5;
      if (eta < 1e-14) break;
    }
    if (!accepted || flat_streak >= 5) break;
  }
  return {std::move(f), quotient};
}

double el_residual(const KernelOperator& op, const std::vector<double>& f,
                   double q, double quotient) {
  Eigen::Map<const Eigen::VectorXd> fv(f.data(),
                                       static_cast<Eigen::Index>(f.size()));
  Eigen::VectorXd kf = op.apply_matrix() * fv;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double lhs = quotient * std::pow(f[i], q - 1.0);
    num = std::max(num, std::abs(lhs - kf[static_cast<Eigen::Index>(i)]));
    den = std::max(den, std::abs(lhs));
  }
  return num / den;
}

}  // namespace

std::pair<EnergyReport, DensityField> minimize_subcritical(
    const KernelOperator& op, double q, const SolverConfig& config) {
  const Mesh& mesh = *op.mesh();
  const int n = mesh.dim;
  const double qa = q_alpha(n, op.params().alpha);
  if (!(q > 0) || !(q < qa))
    throw std::invalid_argument(
        "minimize_subcritical: q must lie in (0, q_alpha)");
  const double d = diameter(mesh);
  if (!(op.params().lambda > -1.0 / d))
    throw std::invalid_argument(
        "minimize_subcritical: lambda must exceed -1/diameter");

  // The first start is flat (seeded when the caller asks for it); later
  // restarts perturb. The descent stops at a stationary point, which is
  // accepted only if it solves the normalized equation to a loose
  // tolerance; otherwise non-convergence is surfaced.
  constexpr int kRestarts = 3;
  constexpr double kResidualGate = 1e-2;
  std::vector<double> best;
  double best_q = std::numeric_limits<double>::infinity();
  double best_res = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < kRestarts; ++attempt) {
    std::vector<double> start(mesh.nodes.size(), 1.0);
    if (attempt > 0 || config.seed != 0) {
      Rng rng(config.seed + static_cast<std::uint64_t>(attempt));
      for (double& v : start) v = std::exp(0.2 * rng.normal());
    }
    auto [f, quotient] = descend_quotient(op, q, std::move(start),
                                          std::max(config.max_iters, 2000));
    const double res = el_residual(op, f, q, quotient);
    if (quotient < best_q) {
      best = std::move(f);
      best_q = quotient;
      best_res = res;
    }
    if (best_res < kResidualGate) break;
  }
  if (!(best_res < kResidualGate))
    throw std::runtime_error(
        "minimize_subcritical: descent stalled away from a solution after " +
        std::to_string(kRestarts) + " restarts (residual " +
        std::to_string(best_res) + ")");

  DensityField field(op.mesh(), std::move(best));
  return {energy_quotient(op, field, q), std::move(field)};
}

std::vector<double> default_continuation_grid(int n, double alpha) {
  const double qa = q_alpha(n, alpha);
  std::vector<double> grid;
  for (int k = 1; k <= 9; ++k) grid.push_back(qa * k / 10);
  for (double d : {8e-3, 4e-3, 2e-3, 1e-3}) {
    const double q = qa - d;
    if (q > grid.back()) grid.push_back(q);
  }
  return grid;
}

namespace {

// Fit Q = Q0 + c d^p through three (d_i, Q_i), d strictly decreasing,
// by bisecting the exponent on the slope-ratio equation.
bool power_law_extrapolate(const double d[3], const double Q[3], double& out) {
  const double dq1 = Q[0] - Q[1];
  const double dq2 = Q[1] - Q[2];
  if (dq1 == 0 || dq2 == 0 || (dq1 > 0) != (dq2 > 0)) return false;
  const double ratio = dq1 / dq2;
  if (!(ratio > 1.0)) return false;  // not contracting toward the limit
  auto h = [&](double p) {
    const double a = std::pow(d[0], p), b = std::pow(d[1], p),
                 c = std::pow(d[2], p);
    return (a - b) / (b - c) - ratio;
  };
  double lo = 0.05, hi = 5.0;
  double hlo = h(lo), hhi = h(hi);
  if ((hlo > 0) == (hhi > 0)) return false;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if ((hm > 0) == (hlo > 0)) {
      lo = mid;
      hlo = hm;
    } else {
      hi = mid;
    }
  }
  const double p = 0.5 * (lo + hi);
  const double c = dq2 / (std::pow(d[1], p) - std::pow(d[2], p));
  out = Q[2] - c * std::pow(d[2], p);
  return true;
}

}  // namespace

ContinuationResult critical_continuation(const KernelOperator& op,
                                         std::vector<double> q_grid,
                                         const SolverConfig& config) {
  const Mesh& mesh = *op.mesh();
  const double d = diameter(mesh);
  const double lambda = op.params().lambda;
  if (!(lambda > -1.0 / d) || !(lambda < 0))
    throw std::invalid_argument(
        "critical_continuation: lambda must lie in (-1/diameter, 0)");
  const double qa = q_alpha(mesh.dim, op.params().alpha);
  if (q_grid.size() < 3)
    throw std::invalid_argument("critical_continuation: need >= 3 grid points");
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    if (!(q_grid[i] > 0) || !(q_grid[i] < qa))
      throw std::invalid_argument(
          "critical_continuation: grid must lie in (0, q_alpha)");
    if (i > 0 && !(q_grid[i] > q_grid[i - 1]))
      throw std::invalid_argument(
          "critical_continuation: grid must be strictly increasing");
  }

  ContinuationResult result;
  DensityField warm = DensityField::constant(op.mesh(), 1.0);
  for (double q : q_grid) {
    SolveTrace trace = solve_fixed_point(op, q, config, &warm);
    if (trace.status != SolveStatus::converged)
      throw std::runtime_error("critical_continuation: solve at q = " +
                               std::to_string(q) + " did not converge (" +
                               solve_status_name(trace.status) + ")");
    warm = trace.final_field;
    ContinuationPoint pt;
    pt.q = q;
    pt.Q = trace.multiplier;
    const auto [mn, mx] = std::minmax_element(warm.values.begin(), warm.values.end());
    pt.min_f = *mn;
    pt.max_f = *mx;
    pt.residual = trace.residual;
    pt.field = warm;
    result.points.push_back(std::move(pt));
  }

  const std::size_t m = result.points.size();
  const double dd[3] = {qa - result.points[m - 3].q, qa - result.points[m - 2].q,
                        qa - result.points[m - 1].q};
  const double QQ[3] = {result.points[m - 3].Q, result.points[m - 2].Q,
                        result.points[m - 1].Q};
  if (power_law_extrapolate(dd, QQ, result.extrapolated_Q)) {
    result.extrapolation_method = "power_law";
  } else {
    // Quadratic through the last three points, evaluated at q_alpha.
    const double x0 = result.points[m - 3].q, x1 = result.points[m - 2].q,
                 x2 = result.points[m - 1].q;
    const double l0 = (qa - x1) * (qa - x2) / ((x0 - x1) * (x0 - x2));
    const double l1 = (qa - x0) * (qa - x2) / ((x1 - x0) * (x1 - x2));
    const double l2 = (qa - x0) * (qa - x1) / ((x2 - x0) * (x2 - x1));
    result.extrapolated_Q = l0 * QQ[0] + l1 * QQ[1] + l2 * QQ[2];
    result.extrapolation_method = "quadratic";
  }
  return result;
}

NonexistenceReport nonexistence_probe(const KernelOperator& op, double q,
                                      const SolverConfig& config,
                                      int restarts) {
  if (restarts < 1)
    throw std::invalid_argument("nonexistence_probe: restarts must be >= 1");
  const StarCheckResult star = star_check(*op.mesh());
  if (!star.star_shaped)
    throw std::invalid_argument(
        "nonexistence_probe: domain is not star-shaped about the origin");

  constexpr double kPassTol = 0.02;
  NonexistenceReport report;
  report.pohozaev_pass_tol = kPassTol;
  bool any_converged = false;
  bool any_passed = false;

  for (int r = 0; r < restarts; ++r) {
    DensityField f0 = DensityField::constant(op.mesh(), 1.0);
    if (r > 0) {
      Rng rng(config.seed + static_cast<std::uint64_t>(r));
      for (double& v : f0.values) v = std::exp(0.3 * rng.normal());
    }
    ProbeRunRecord rec{};
    rec.restart = r;
    rec.pohozaev_rel = std::numeric_limits<double>::quiet_NaN();
    SolveTrace trace = solve_fixed_point(op, q, config, &f0);
    rec.status = trace.status;
    rec.residual = trace.residual;
    if (trace.status == SolveStatus::converged) {
      any_converged = true;
      std::vector<double> u(trace.final_field.values.size());
      for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = std::pow(trace.raw_scale * trace.final_field.values[i], q - 1.0);
      const double p = q / (q - 1.0);
      PohozaevReport prep = pohozaev_residual(
          op, DensityField(op.mesh(), std::move(u)), p);
      rec.pohozaev_rel = std::abs(prep.relative_residual);
      if (rec.pohozaev_rel < kPassTol) any_passed = true;
    }
    report.runs.push_back(rec);
  }

  report.classification =
      any_passed ? ProbeClassification::converged_and_pohozaev_passed
      : any_converged ? ProbeClassification::converged_but_pohozaev_violated
                      : ProbeClassification::no_convergence_observed;
  report.anomaly =
      any_passed && op.params().lambda >= 0 &&
      q >= q_alpha(op.mesh()->dim, op.params().alpha) - 1e-12;
  return report;
}

}  // namespace rhls
