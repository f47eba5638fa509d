#ifndef RHLS_DIAGNOSTICS_HPP
#define RHLS_DIAGNOSTICS_HPP

#include <functional>
#include <vector>

#include "rhls/energy.hpp"
#include "rhls/kernel.hpp"

namespace rhls {

/// Kernel exponent of the coupled volume term in the boundary/volume
/// identity. `derived` (alpha - n + 1) is what the identity's derivation
/// yields and is the default; `statement` (alpha - n) is kept selectable
/// because both forms circulate.
enum class PohozaevVolumeKernel { derived, statement };

struct PohozaevReport {
  double p;
  double lhs;            // (n/p + (alpha-n)/2) int u^p
  double volume_term;    // -(lambda/2) double integral of u^(p-1) pairs
  double boundary_term;  // (1/p) boundary integral of (x . nu) u^p
  double residual;       // lhs - volume_term - boundary_term
  double relative_residual;
  PohozaevVolumeKernel variant;
};

double pohozaev_coefficient(int n, double alpha, double p);

/// Evaluates the boundary/volume identity for a positive field u solving
/// u = K[u^(p-1)]. Boundary values of u come from the integral
/// representation (evaluate_at), never from interpolation.
PohozaevReport pohozaev_residual(
    const KernelOperator& op, const DensityField& u, double p,
    PohozaevVolumeKernel variant = PohozaevVolumeKernel::derived);

struct SymmetryReport {
  double radial_spread;    // max over bins of (max - min)/|mean|
  int monotone_violations; // adjacent bin means failing strict increase
  int bins;                // after sparse-bin merging
  std::vector<double> bin_means;
  std::vector<int> bin_counts;
};

/// Groups ball-mesh nodes into radial bins (>= 5 nodes per bin, sparse
/// outer bins merged inward) and reports spread and monotonicity of the
/// bin means. Depends only on node radii, so node relabeling is immaterial.
SymmetryReport symmetry_report(const Mesh& mesh, const DensityField& u,
                               int bins, double tol);

using PointEvaluator = std::function<double(const Point&)>;

struct MovingPlaneResult {
  double plane_lambda;
  double min_slack;
  std::vector<std::size_t> sample_nodes;
  std::vector<double> slacks;
};

/// Reflection comparison on the unit ball with lambda = 0: for sample
/// nodes x in the cap {x_1 < plane_lambda}, slack(x) =
/// [u(x) - u(x^l)] - int_cap [k(x,y) - k(x^l,y)] (u^(p-1) - u_l^(p-1)),
/// where reflected values come from the integral representation (or a
/// caller-supplied evaluator). Nonnegative up to quadrature for genuine
/// solutions.
MovingPlaneResult moving_plane_check(const KernelOperator& op,
                                     const DensityField& u, double p,
                                     double plane_lambda, int sample_count,
                                     const PointEvaluator* evaluator = nullptr);

struct BlowupReport {
  double mu_q;
  std::size_t argmax_index;
  bool argmax_tie_broken;
  std::vector<Point> rescaled_nodes;  // z = (x - x_q)/mu_q
  std::vector<double> h_values;       // g_q^(q-1), h(0) = 1 exactly
  double fitted_C1, fitted_C2;        // envelope of h/(1 + |z|^(alpha-n))
};

/// Concentration rescaling g_q(z) = mu^(alpha/(2-q)) f_q(mu z + x_q) with
/// mu = f_q(x_q)^(-(2-q)/alpha); argmax ties break to the lowest index.
BlowupReport blowup_rescale(const DensityField& f_q, double q, double alpha);

/// For each rho, the fraction of sum w f^q carried by nodes within
/// rho * diameter of the argmax of f.
std::vector<double> concentration_metric(const DensityField& f, double q,
                                         const std::vector<double>& radius_fracs);

}  // namespace rhls

#endif
