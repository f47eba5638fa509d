#include "rhls/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "rhls/kernel.hpp"
#include "rhls/sharp.hpp"

namespace rhls {

DensityField DensityField::constant(MeshPtr m, double c) {
  std::vector<double> v(m->nodes.size(), c);
  return DensityField(std::move(m), std::move(v));
}

double q_alpha(int n, double alpha) { return 2.0 * n / (n + alpha); }

double p_alpha(int n, double alpha) { return 2.0 * n / (n - alpha); }

bool is_critical_exponent(double q, int n, double alpha) {
  return std::abs(q * (n + alpha) - 2.0 * n) <= 1e-12 * (2.0 * n);
}

double quasi_norm(const DensityField& f, double q) {
  if (!(q > 0)) throw std::invalid_argument("quasi_norm: q must be positive");
  if (!f.mesh || f.values.size() != f.mesh->weights.size())
    throw std::invalid_argument("quasi_norm: field/mesh size mismatch");
  double s = 0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (f.values[i] < 0)
      throw std::invalid_argument("quasi_norm: negative entry");
    s += f.mesh->weights[i] * std::pow(f.values[i], q);
  }
  return std::pow(s, 1.0 / q);
}

EnergyReport energy_quotient(const KernelOperator& op, const DensityField& f,
                             double q) {
  const int n = op.mesh()->dim;
  const double qn = quasi_norm(f, q);  // validates q > 0 and f >= 0
  if (!(qn > 0)) throw std::invalid_argument("energy_quotient: zero field");
  EnergyReport rep{};
  rep.numerator = op.bilinear(f.values, f.values);
  rep.qnorm = qn;
  rep.quotient = rep.numerator / (qn * qn);
  rep.q = q;
  rep.lambda = op.params().lambda;
  rep.N_alpha = sharp_constant(n, op.params().alpha).value;
  if (is_critical_exponent(q, n, op.params().alpha))
    rep.margin = rep.quotient - rep.N_alpha;
  return rep;
}

double subcritical_lower_bound_constant(const Mesh& mesh, int n, double alpha,
                                        double q) {
  const double qa = q_alpha(n, alpha);
  if (!(q > 0) || !(q < qa))
    throw std::invalid_argument(
        "subcritical_lower_bound_constant: q must lie in (0, q_alpha)");
  double measure = 0;
  for (double w : mesh.weights) measure += w;
  const double na = sharp_constant(n, alpha).value;
  return na * std::pow(measure, -2.0 * (1.0 / q - 1.0 / qa));
}

}  // namespace rhls
