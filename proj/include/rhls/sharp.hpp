#ifndef RHLS_SHARP_HPP
#define RHLS_SHARP_HPP

#include <optional>
#include <string>
#include <vector>

#include "rhls/energy.hpp"
#include "rhls/geometry.hpp"

namespace rhls {

class KernelOperator;

struct SharpConstant {
  int n;
  double alpha;
  double value;
};

/// pi^((n-alpha)/2) Gamma(alpha/2)/Gamma((n+alpha)/2)
/// * (Gamma(n/2)/Gamma(n))^(-alpha/n), the optimal constant bounding the
/// double-integral form below in the alpha > n regime.
SharpConstant sharp_constant(int n, double alpha);

struct ExtremalParams {
  double epsilon;  // concentration scale
  Point center;
  int n;
  double alpha;
};

/// (eps / (eps^2 + |x - center|^2))^((n+alpha)/2).
double extremal_density(const Point& x, const ExtremalParams& params);

/// Discrete lower-bound margin B(f,g)/(|f|_q |g|_q) - N_alpha at the
/// critical exponent; nonnegative up to the mesh's discretization
/// tolerance. Requires a lambda = 0 operator.
double reversed_hls_check(const KernelOperator& op, const DensityField& f,
                          const DensityField& g, const SharpConstant& n_alpha);

struct SweepPoint {
  double epsilon;
  double quotient;
  double gap;          // quotient - N_alpha
  double tail_gap;     // lambda = 0 part of the gap (truncation cost)
  double lambda_term;  // lambda * eps * J1 contribution to the quotient
  bool dip;            // quotient < N_alpha
};

struct SweepReport {
  int n;
  double alpha;
  double lambda;
  double R;
  Point center;
  std::vector<SweepPoint> points;  // epsilon strictly decreasing
  std::optional<double> fitted_slope;  // lambda = 0 branch
  bool dip_detected;
  std::string regime;  // lambda < 0: which gap term dominated at the
                       // smallest epsilon
  double calibration_epsilon;
  double calibration_margin;
  double tol_disc;
};

/// Energy quotients of the extremal family truncated to B_R(center),
/// computed semi-analytically in concentration coordinates: the
/// whole-space quasi-norm is a closed Gamma expression and truncation
/// corrections are radial quadratures, so no mesh error enters the sweep.
/// The mesh fixes the domain (containment, diameter) and calibrates
/// tol_disc via reversed_hls_check at eps = R/4.
SweepReport test_function_sweep(const Mesh& mesh, int n, double alpha,
                                double lambda, double R,
                                std::vector<double> epsilons,
                                const Point& center);

/// Whole-space integral of the extremal profile to the critical power,
/// int (1+|u|^2)^-n du  =  pi^(n/2) Gamma(n/2) / Gamma(n).
double extremal_qnorm_integral(int n);

namespace detail {
/// int int over |u|,|v| <= T of
/// (1+u^2)^-((n+a)/2) (1+v^2)^-((n+a)/2) |u-v|^(a-n+shift), n = 1, 2, 3.
double truncated_pair_integral(int n, double alpha, int shift, double T);
/// Surface measure of S^(n-1).
double sphere_measure(int n);
/// omega_(n-1) * int_T^inf (1+r^2)^-n r^(n-1) dr.
double qnorm_tail(int n, double T);
}  // namespace detail

}  // namespace rhls

#endif
