#include "rhls/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace rhls {

namespace {

GaussRule make_gauss_legendre(int k) {
  if (k < 1) throw std::invalid_argument("gauss order must be >= 1");
  GaussRule rule;
  rule.x.resize(k);
  rule.w.resize(k);
  for (int i = 0; i < (k + 1) / 2; ++i) {
    // Chebyshev initial guess, Newton on P_k.
    double x = std::cos(M_PI * (i + 0.75) / (k + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= k; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = k * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[k - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.w[i] = w;
    rule.w[k - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int k) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, make_gauss_legendre(k)).first;
  return it->second;
}

double integrate_panel(const std::function<double(double)>& f, double a,
                       double b, int order) {
  const GaussRule& g = gauss_legendre(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0;
  for (int i = 0; i < order; ++i) s += g.w[i] * f(mid + half * g.x[i]);
  return half * s;
}

std::vector<double> dyadic_breaks(double T) {
  std::vector<double> br{0.0, std::min(1.0, T)};
  while (br.back() < T) br.push_back(std::min(br.back() * 2, T));
  return br;
}

double integrate_tensor_2d(const std::function<double(double, double)>& f,
                           double ax, double bx, double ay, double by,
                           int order) {
  const GaussRule& g = gauss_legendre(order);
  const double mx = 0.5 * (ax + bx), hx = 0.5 * (bx - ax);
  const double my = 0.5 * (ay + by), hy = 0.5 * (by - ay);
  double s = 0;
  for (int i = 0; i < order; ++i) {
    const double u = mx + hx * g.x[i];
    double row = 0;
    for (int j = 0; j < order; ++j) row += g.w[j] * f(u, my + hy * g.x[j]);
    s += g.w[i] * row;
  }
  return hx * hy * s;
}

double integrate_square_diag(const std::function<double(double, double)>& f,
                             double a, double b, int depth, int order) {
  if (depth == 0 || (b - a) < 1e-13) return integrate_tensor_2d(f, a, b, a, b, order);
  const double m = 0.5 * (a + b);
  return integrate_tensor_2d(f, a, m, m, b, order) +
         integrate_tensor_2d(f, m, b, a, m, order) +
         integrate_square_diag(f, a, m, depth - 1, order) +
         integrate_square_diag(f, m, b, depth - 1, order);
}

}  // namespace rhls
