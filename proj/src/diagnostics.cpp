#include "rhls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rhls {

double pohozaev_coefficient(int n, double alpha, double p) {
  return n / p + (alpha - n) / 2.0;
}

PohozaevReport pohozaev_residual(const KernelOperator& op,
                                 const DensityField& u, double p,
                                 PohozaevVolumeKernel variant) {
  if (p == 0) throw std::invalid_argument("pohozaev_residual: p must be nonzero");
  const Mesh& mesh = *op.mesh();
  if (u.values.size() != mesh.nodes.size())
    throw std::invalid_argument("pohozaev_residual: field size mismatch");
  for (double v : u.values)
    if (!(v > 0))
      throw std::invalid_argument(
          "pohozaev_residual: u must be strictly positive (u^(p-1) with p < 1)");

  const int n = mesh.dim;
  const double alpha = op.params().alpha;
  const double lambda = op.params().lambda;

  PohozaevReport rep{};
  rep.p = p;
  rep.variant = variant;

  double int_up = 0;
  std::vector<double> v(u.values.size());
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    int_up += mesh.weights[i] * std::pow(u.values[i], p);
    v[i] = std::pow(u.values[i], p - 1.0);
  }
  rep.lhs = pohozaev_coefficient(n, alpha, p) * int_up;

  if (lambda != 0) {
    const double beta =
        variant == PohozaevVolumeKernel::derived ? alpha - n + 1 : alpha - n;
    rep.volume_term = -0.5 * lambda * pairwise_form(mesh, beta, v);
  }

  DensityField vf(op.mesh(), v);
  double bnd = 0;
  for (std::size_t b = 0; b < mesh.boundary_nodes.size(); ++b) {
    const double ub = evaluate_at(op, vf, mesh.boundary_nodes[b]);
    if (!(ub > 0))
      throw std::runtime_error(
          "pohozaev_residual: boundary extension of u is non-positive");
    bnd += mesh.boundary_weights[b] *
           dot(mesh.boundary_nodes[b], mesh.boundary_normals[b], n) *
           std::pow(ub, p);
  }
  rep.boundary_term = bnd / p;

  rep.residual = rep.lhs - rep.volume_term - rep.boundary_term;
  rep.relative_residual =
      rep.residual / (std::abs(rep.lhs) + std::abs(rep.volume_term) +
                      std::abs(rep.boundary_term) + 1e-300);
  return rep;
}

SymmetryReport symmetry_report(const Mesh& mesh, const DensityField& u,
                               int bins, double tol) {
  if (mesh.shape_tag != ShapeTag::ball)
    throw std::invalid_argument("symmetry_report: requires a ball mesh");
  if (bins < 4) throw std::invalid_argument("symmetry_report: bins must be >= 4");
  if (u.values.size() != mesh.nodes.size())
    throw std::invalid_argument("symmetry_report: field size mismatch");

  std::vector<std::vector<double>> groups(bins);
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const double r = dist(mesh.nodes[i], mesh.center, mesh.dim);
    int k = static_cast<int>(r / mesh.radius * bins);
    k = std::clamp(k, 0, bins - 1);
    groups[k].push_back(u.values[i]);
  }
  // Merge bins with fewer than 5 nodes into their inner neighbor.
  for (int k = static_cast<int>(groups.size()) - 1; k > 0; --k) {
    if (groups[k].size() < 5) {
      groups[k - 1].insert(groups[k - 1].end(), groups[k].begin(),
                           groups[k].end());
      groups.erase(groups.begin() + k);
    }
  }
  groups.erase(std::remove_if(groups.begin(), groups.end(),
                              [](const auto& g) { return g.empty(); }),
               groups.end());

  SymmetryReport rep{};
  rep.bins = static_cast<int>(groups.size());
  double spread = 0;
  for (const auto& g : groups) {
    const auto [mn, mx] = std::minmax_element(g.begin(), g.end());
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / g.size();
    rep.bin_means.push_back(mean);
    rep.bin_counts.push_back(static_cast<int>(g.size()));
    if (mean != 0) spread = std::max(spread, (*mx - *mn) / std::abs(mean));
  }
  rep.radial_spread = spread;
  rep.monotone_violations = 0;
  for (std::size_t k = 0; k + 1 < rep.bin_means.size(); ++k)
    if (rep.bin_means[k + 1] <= rep.bin_means[k] - tol)
      ++rep.monotone_violations;
  return rep;
}

MovingPlaneResult moving_plane_check(const KernelOperator& op,
                                     const DensityField& u, double p,
                                     double plane_lambda, int sample_count,
                                     const PointEvaluator* evaluator) {
  const Mesh& mesh = *op.mesh();
  if (mesh.shape_tag != ShapeTag::ball || std::abs(mesh.radius - 1.0) > 1e-12)
    throw std::invalid_argument("moving_plane_check: requires the unit ball");
  if (op.params().lambda != 0)
    throw std::invalid_argument("moving_plane_check: requires lambda = 0");
  if (!(plane_lambda > -1.0) || !(plane_lambda < 0.0))
    throw std::invalid_argument(
        "moving_plane_check: plane_lambda must lie in (-1, 0)");
  if (sample_count < 1)
    throw std::invalid_argument("moving_plane_check: sample_count must be >= 1");
  if (u.values.size() != mesh.nodes.size())
    throw std::invalid_argument("moving_plane_check: field size mismatch");

  std::vector<double> v(u.values.size());
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (!(u.values[i] > 0))
      throw std::invalid_argument("moving_plane_check: u must be positive");
    v[i] = std::pow(u.values[i], p - 1.0);
  }
  DensityField vf(op.mesh(), v);
  auto eval_u = [&](const Point& x) {
    return evaluator ? (*evaluator)(x) : evaluate_at(op, vf, x);
  };
  auto reflect = [plane_lambda](Point x) {
    x[0] = 2 * plane_lambda - x[0];
    return x;
  };

  std::vector<std::size_t> cap;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    if (mesh.nodes[i][0] < plane_lambda) cap.push_back(i);
  if (cap.empty())
    throw std::invalid_argument(
        "moving_plane_check: no mesh nodes in the reflection cap");

  // Reflected values u(y^l)^(p-1) for all cap nodes, computed once.
  std::vector<double> v_refl(cap.size());
  for (std::size_t c = 0; c < cap.size(); ++c)
    v_refl[c] = std::pow(eval_u(reflect(mesh.nodes[cap[c]])), p - 1.0);

  MovingPlaneResult result;
  result.plane_lambda = plane_lambda;
  const std::size_t nsamples =
      std::min<std::size_t>(sample_count, cap.size());
  const double beta = op.params().alpha - mesh.dim;
  result.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < nsamples; ++s) {
    const std::size_t i = cap[s * cap.size() / nsamples];
    const Point& x = mesh.nodes[i];
    const Point xl = reflect(x);
    const double lhs = eval_u(x) - eval_u(xl);
    double rhs = 0;
    for (std::size_t c = 0; c < cap.size(); ++c) {
      const std::size_t j = cap[c];
      const double kd = kernel_power(dist(x, mesh.nodes[j], mesh.dim), beta) -
                        kernel_power(dist(xl, mesh.nodes[j], mesh.dim), beta);
      rhs += mesh.weights[j] * kd * (v[j] - v_refl[c]);
    }
    const double slack = lhs - rhs;
    result.sample_nodes.push_back(i);
    result.slacks.push_back(slack);
    result.min_slack = std::min(result.min_slack, slack);
  }
  return result;
}

BlowupReport blowup_rescale(const DensityField& f_q, double q, double alpha) {
  if (!f_q.mesh) throw std::invalid_argument("blowup_rescale: field has no mesh");
  const Mesh& mesh = *f_q.mesh;
  if (f_q.values.empty())
    throw std::invalid_argument("blowup_rescale: empty field");
  for (double v : f_q.values)
    if (!(v > 0))
      throw std::invalid_argument("blowup_rescale: field must be positive");

  BlowupReport rep{};
  std::size_t imax = 0;
  for (std::size_t i = 1; i < f_q.values.size(); ++i)
    if (f_q.values[i] > f_q.values[imax]) imax = i;
  rep.argmax_tie_broken = false;
  for (std::size_t i = 0; i < f_q.values.size(); ++i)
    if (i != imax && f_q.values[i] == f_q.values[imax]) {
      rep.argmax_tie_broken = true;
      break;
    }
  rep.argmax_index = imax;
  const double fmax = f_q.values[imax];
  rep.mu_q = std::pow(fmax, -(2.0 - q) / alpha);

  const double beta = alpha - mesh.dim;
  rep.fitted_C1 = std::numeric_limits<double>::infinity();
  rep.fitted_C2 = 0;
  for (std::size_t i = 0; i < f_q.values.size(); ++i) {
    Point z{};
    for (int d = 0; d < mesh.dim; ++d)
      z[d] = (mesh.nodes[i][d] - mesh.nodes[imax][d]) / rep.mu_q;
    rep.rescaled_nodes.push_back(z);
    const double h = std::pow(f_q.values[i] / fmax, q - 1.0);
    rep.h_values.push_back(h);
    const double env = h / (1 + kernel_power(norm(z, mesh.dim), beta));
    rep.fitted_C1 = std::min(rep.fitted_C1, env);
    rep.fitted_C2 = std::max(rep.fitted_C2, env);
  }
  return rep;
}

std::vector<double> concentration_metric(const DensityField& f, double q,
                                         const std::vector<double>& radius_fracs) {
  if (!f.mesh || f.values.empty())
    throw std::invalid_argument("concentration_metric: empty field");
  if (!(q > 0)) throw std::invalid_argument("concentration_metric: q must be positive");
  const Mesh& mesh = *f.mesh;
  double total = 0;
  std::vector<double> mass(f.values.size());
  std::size_t imax = 0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (f.values[i] < 0)
      throw std::invalid_argument("concentration_metric: negative entry");
    mass[i] = mesh.weights[i] * std::pow(f.values[i], q);
    total += mass[i];
    if (f.values[i] > f.values[imax]) imax = i;
  }
  if (!(total > 0))
    throw std::invalid_argument("concentration_metric: zero field");
  const double d = diameter(mesh);
  std::vector<double> fractions;
  for (double rho : radius_fracs) {
    double s = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
      if (dist(mesh.nodes[i], mesh.nodes[imax], mesh.dim) <= rho * d)
        s += mass[i];
    fractions.push_back(s / total);
  }
  return fractions;
}

}  // namespace rhls
