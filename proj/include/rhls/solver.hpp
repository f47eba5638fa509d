#ifndef RHLS_SOLVER_HPP
#define RHLS_SOLVER_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rhls/energy.hpp"
#include "rhls/kernel.hpp"

namespace rhls {

enum class SolveStatus { converged, diverged_unbounded, collapsed_to_zero, max_iters };
const char* solve_status_name(SolveStatus s);

enum class SolverMode { fixed_point, quotient_descent };

struct SolverConfig {
  int max_iters = 2000;
  double tol_rel = 1e-9;       // relative sup-norm stopping threshold
  double damping_theta = 0.5;  // geometric mixing weight in (0, 1]
  double positivity_floor = 1e-8;
  SolverMode mode = SolverMode::fixed_point;
  std::uint64_t seed = 0;
};

struct IterationRecord {
  double residual;
  double min_f;
  double max_f;
  double quotient;
};

/// Outcome of a damped fixed-point solve. The stored field is the
/// normalized scaling |f|_q = 1 with multiplier Q; the raw-equation
/// scaling is raw_scale * field with raw_scale = Q^(1/(q-2)).
struct SolveTrace {
  std::vector<IterationRecord> iterates;
  SolveStatus status = SolveStatus::max_iters;
  DensityField final_field;
  double q = 0, lambda = 0, alpha = 0;
  double multiplier = 0;  // Q_{lambda,q}
  double raw_scale = 0;
  double residual = 0;  // |Q f^(q-1) - K f|_inf / |Q f^(q-1)|_inf
  int iterations = 0;
  int floor_activations = 0;
};

/// Damped geometric fixed-point iteration for f^(q-1) = K f,
/// f_{k+1} ∝ f_k^(1-theta) (K f_k)^(theta/(q-1)), renormalized to
/// |f|_q = 1 each step. The map f -> (K f)^(1/(q-1)) is order-reversing
/// (negative exponent); geometric damping with theta <= 1/2 is the robust
/// default, and theta = 1 exposes the plain iteration. Converged means
/// relative sup-norm change < tol_rel and equation residual < 10 tol_rel.
SolveTrace solve_fixed_point(const KernelOperator& op, double q,
                             const SolverConfig& config,
                             const DensityField* f0 = nullptr);

/// Quotient minimization over positive fields by multiplicative updates
/// f <- f exp(-eta d), d the first variation, with backtracking on the
/// quotient value; requires 0 < q < q_alpha and lambda > -1/diameter.
std::pair<EnergyReport, DensityField> minimize_subcritical(
    const KernelOperator& op, double q, const SolverConfig& config);

struct ContinuationPoint {
  double q;
  double Q;  // Q_{lambda,q}
  double min_f, max_f;
  double residual;
  DensityField field;  // normalized
};

struct ContinuationResult {
  std::vector<ContinuationPoint> points;
  double extrapolated_Q = 0;
  std::string extrapolation_method;
};

/// Warm-started solves along an increasing q grid approaching q_alpha from
/// below; the limit is estimated from the last three grid points by a
/// power-law fit Q = Q0 + c (q_alpha - q)^p (quadratic fallback).
ContinuationResult critical_continuation(const KernelOperator& op,
                                         std::vector<double> q_grid,
                                         const SolverConfig& config);

/// Default grid: q_alpha * k/10 for k = 1..9 plus a dyadic tail
/// q_alpha - {8, 4, 2, 1}e-3.
std::vector<double> default_continuation_grid(int n, double alpha);

enum class ProbeClassification {
  no_convergence_observed,
  converged_but_pohozaev_violated,
  converged_and_pohozaev_passed
};
const char* probe_classification_name(ProbeClassification c);

struct ProbeRunRecord {
  int restart;
  SolveStatus status;
  double residual;
  double pohozaev_rel;  // NaN when the run did not converge
};

struct NonexistenceReport {
  ProbeClassification classification;
  bool anomaly;  // passed in the regime where no solution can exist;
                 // demands mesh refinement
  double pohozaev_pass_tol;
  std::vector<ProbeRunRecord> runs;
};

/// Multi-start fixed-point runs with a boundary-sign audit: every run that
/// claims convergence is checked against the boundary/volume identity.
/// Requires a domain that is star-shaped about the origin.
NonexistenceReport nonexistence_probe(const KernelOperator& op, double q,
                                      const SolverConfig& config, int restarts);

}  // namespace rhls

#endif
