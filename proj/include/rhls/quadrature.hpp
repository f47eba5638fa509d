#ifndef RHLS_QUADRATURE_HPP
#define RHLS_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace rhls {

struct GaussRule {
  std::vector<double> x;  // nodes on (-1, 1)
  std::vector<double> w;
};

/// Gauss-Legendre rule of order k (cached; Newton on Legendre polynomials).
const GaussRule& gauss_legendre(int k);

double integrate_panel(const std::function<double(double)>& f, double a,
                       double b, int order = 32);

/// Breakpoints {0, min(1,T), 2, 4, ...} capped at T; resolves integrands
/// that vary on unit scale and decay polynomially.
std::vector<double> dyadic_breaks(double T);

double integrate_tensor_2d(const std::function<double(double, double)>& f,
                           double ax, double bx, double ay, double by,
                           int order = 24);

/// Square [a,b]^2 with recursive refinement toward the diagonal, for
/// integrands with a |u - v| kink.
double integrate_square_diag(const std::function<double(double, double)>& f,
                             double a, double b, int depth = 6, int order = 24);

}  // namespace rhls

#endif
