#ifndef RHLS_ENERGY_HPP
#define RHLS_ENERGY_HPP

#include <optional>
#include <vector>

#include "rhls/geometry.hpp"

namespace rhls {

class KernelOperator;

/// Nonnegative function sampled at mesh nodes. Operations that require
/// nonnegativity validate it at the point of use; raw kernel images may
/// carry negative entries when the coupling is inadmissible.
struct DensityField {
  MeshPtr mesh;
  std::vector<double> values;

  DensityField() = default;
  DensityField(MeshPtr m, std::vector<double> v)
      : mesh(std::move(m)), values(std::move(v)) {}
  static DensityField constant(MeshPtr m, double c);
};

/// Critical exponents of the alpha > n regime: q_alpha in (0,1) and its
/// negative conjugate p_alpha, 1/p + 1/q = 1.
double q_alpha(int n, double alpha);
double p_alpha(int n, double alpha);

/// Cross-multiplied comparison q*(n+alpha) == 2n to 1e-12 relative; exact
/// when q was formed from the same rationals.
bool is_critical_exponent(double q, int n, double alpha);

struct EnergyReport {
  double numerator;  // double-integral value f' S f
  double qnorm;
  double quotient;  // numerator / qnorm^2
  double q;
  double lambda;
  double N_alpha;
  std::optional<double> margin;  // quotient - N_alpha, filled when q == q_alpha
};

/// (sum_j w_j f_j^q)^(1/q); a quasi-norm for q < 1.
double quasi_norm(const DensityField& f, double q);

EnergyReport energy_quotient(const KernelOperator& op, const DensityField& f,
                             double q);

/// Explicit constant N_alpha * |Omega|^(-2(1/q - 1/q_alpha)) bounding the
/// lambda=0 bilinear form below by const * quasi_norm(f, q)^2 on 0 < q < q_alpha.
double subcritical_lower_bound_constant(const Mesh& mesh, int n, double alpha,
                                        double q);

}  // namespace rhls

#endif
