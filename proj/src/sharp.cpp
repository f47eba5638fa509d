#include "rhls/sharp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rhls/kernel.hpp"
#include "rhls/quadrature.hpp"

namespace rhls {

SharpConstant sharp_constant(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("sharp_constant: n must be >= 1");
  if (!(alpha > n))
    throw std::invalid_argument("sharp_constant: alpha must exceed n");
  const double log_value = 0.5 * (n - alpha) * std::log(M_PI) +
                           std::lgamma(alpha / 2) -
                           std::lgamma((n + alpha) / 2.0) -
                           (alpha / n) * (std::lgamma(n / 2.0) - std::lgamma(n));
  return {n, alpha, std::exp(log_value)};
}

double extremal_density(const Point& x, const ExtremalParams& params) {
  if (!(params.epsilon > 0))
    throw std::invalid_argument("extremal_density: epsilon must be positive");
  const double r = dist(x, params.center, params.n);
  const double base = params.epsilon / (params.epsilon * params.epsilon + r * r);
  return std::pow(base, 0.5 * (params.n + params.alpha));
}

double reversed_hls_check(const KernelOperator& op, const DensityField& f,
                          const DensityField& g,
                          const SharpConstant& n_alpha) {
  if (op.params().lambda != 0)
    throw std::invalid_argument("reversed_hls_check: operator must have lambda = 0");
  const double qa = q_alpha(op.mesh()->dim, op.params().alpha);
  const double qf = quasi_norm(f, qa);
  const double qg = quasi_norm(g, qa);
  if (!(qf > 0) || !(qg > 0))
    throw std::invalid_argument("reversed_hls_check: zero quasi-norm");
  return op.bilinear(f.values, g.values) / (qf * qg) - n_alpha.value;
}

double extremal_qnorm_integral(int n) {
  return std::pow(M_PI, n / 2.0) *
         std::exp(std::lgamma(n / 2.0) - std::lgamma(n));
}

namespace detail {

double sphere_measure(int n) {
  return 2.0 * std::pow(M_PI, n / 2.0) / std::exp(std::lgamma(n / 2.0));
}

double qnorm_tail(int n, double T) {
  // r = T/t maps (T, inf) to (0, 1]; integrand smooth there.
  auto f = [n, T](double t) {
    return std::pow(T, n) * std::pow(t, n - 1) *
           std::pow(t * t + T * T, -static_cast<double>(n));
  };
  return sphere_measure(n) * integrate_panel(f, 0.0, 1.0, 48);
}

namespace {

// Profile of the scaled extremal to the bilinear power.
struct Profile {
  double ex;  // (n + alpha) / 2
  double operator()(double r) const { return std::pow(1 + r * r, -ex); }
};

double pair_integral_1d(double alpha, int shift, double T) {
  const Profile phi{0.5 * (1 + alpha)};
  const double beta = alpha - 1 + shift;
  auto F = [&](double u, double v) {
    return phi(u) * phi(v) * kernel_power(std::abs(u - v), beta);
  };
  std::vector<double> br = dyadic_breaks(T);
  std::vector<std::pair<double, double>> panels;
  for (std::size_t i = br.size(); i-- > 1;) panels.emplace_back(-br[i], -br[i - 1]);
  for (std::size_t i = 0; i + 1 < br.size(); ++i) panels.emplace_back(br[i], br[i + 1]);
  double total = 0;
  for (std::size_t a = 0; a < panels.size(); ++a)
    for (std::size_t b = 0; b < panels.size(); ++b) {
      if (a == b)
        total += integrate_square_diag(F, panels[a].first, panels[a].second);
      else
        total += integrate_tensor_2d(F, panels[a].first, panels[a].second,
                                     panels[b].first, panels[b].second);
    }
  return total;
}

// Gauss nodes of a dyadically graded panel decomposition, flattened.
void graded_nodes(double lo, double hi_over_pow2, int levels, int order,
                  std::vector<double>& xs, std::vector<double>& ws) {
  std::vector<double> br{lo};
  for (int j = levels; j >= 0; --j) br.push_back(hi_over_pow2 / (1 << j));
  const GaussRule& g = gauss_legendre(order);
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double mid = 0.5 * (br[i] + br[i + 1]);
    const double half = 0.5 * (br[i + 1] - br[i]);
    for (int k = 0; k < order; ++k) {
      xs.push_back(mid + half * g.x[k]);
      ws.push_back(half * g.w[k]);
    }
  }
}

// int_0^{2 pi} d(r, s, theta)^beta dtheta with
// d^2 = (r-s)^2 + 4 r s sin^2(theta/2); graded toward theta = 0 where the
// integrand kinks for r near s.
double circle_average(double r, double s, double beta,
                      const std::vector<double>& th,
                      const std::vector<double>& wth) {
  const double dr2 = (r - s) * (r - s);
  double acc = 0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    const double sn = std::sin(0.5 * th[i]);
    const double d2 = dr2 + 4.0 * r * s * sn * sn;
    acc += wth[i] * std::pow(d2, 0.5 * beta);
  }
  return 2.0 * acc;  // symmetric about theta = pi
}

double pair_integral_2d(double alpha, int shift, double T) {
  const Profile phi{0.5 * (2 + alpha)};
  const double beta = alpha - 2 + shift;

  std::vector<double> rs, wr;
  {
    std::vector<double> br = dyadic_breaks(T);
    const GaussRule& g = gauss_legendre(20);
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const double mid = 0.5 * (br[i] + br[i + 1]);
      const double half = 0.5 * (br[i + 1] - br[i]);
      for (int k = 0; k < 20; ++k) {
        rs.push_back(mid + half * g.x[k]);
        wr.push_back(half * g.w[k]);
      }
    }
  }
  std::vector<double> th, wth;
  graded_nodes(0.0, M_PI, 12, 16, th, wth);

  double total = 0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double r = rs[i];
    const double fi = wr[i] * phi(r) * r;
    double row = 0;
    for (std::size_t j = 0; j < rs.size(); ++j) {
      const double s = rs[j];
      row += wr[j] * phi(s) * s * circle_average(r, s, beta, th, wth);
    }
    total += fi * row;
  }
  return 2.0 * M_PI * total;
}

double pair_integral_3d(double alpha, int shift, double T) {
  const Profile phi{0.5 * (3 + alpha)};
  const double beta = alpha - 3 + shift;
  // Sphere-pair average has the closed form
  // (8 pi^2 / (r s (beta+2))) [ (r+s)^(beta+2) - |r-s|^(beta+2) ].
  auto F = [&](double r, double s) {
    const double b2 = beta + 2;
    const double bracket =
        std::pow(r + s, b2) - std::pow(std::abs(r - s), b2);
    return phi(r) * phi(s) * r * s * bracket;
  };
  std::vector<double> br = dyadic_breaks(T);
  double total = 0;
  for (std::size_t a = 0; a + 1 < br.size(); ++a)
    for (std::size_t b = 0; b + 1 < br.size(); ++b) {
      if (a == b)
        total += integrate_square_diag(F, br[a], br[a + 1]);
      else
        total += integrate_tensor_2d(F, br[a], br[a + 1], br[b], br[b + 1]);
    }
  return 8.0 * M_PI * M_PI / (beta + 2) * total;
}

}  // namespace

double truncated_pair_integral(int n, double alpha, int shift, double T) {
  switch (n) {
    case 1: return pair_integral_1d(alpha, shift, T);
    case 2: return pair_integral_2d(alpha, shift, T);
    case 3: return pair_integral_3d(alpha, shift, T);
    default:
      throw std::invalid_argument("truncated_pair_integral: n must be 1, 2 or 3");
  }
}

}  // namespace detail

namespace {

bool ball_inside_domain(const Mesh& mesh, const Point& center, double R) {
  switch (mesh.shape_tag) {
    case ShapeTag::interval:
    case ShapeTag::box: {
      for (int d = 0; d < mesh.dim; ++d)
        if (center[d] - R < mesh.lows[d] - 1e-12 ||
            center[d] + R > mesh.highs[d] + 1e-12)
          return false;
      return true;
    }
    case ShapeTag::ball:
      return dist(center, mesh.center, mesh.dim) + R <= mesh.radius + 1e-12;
    case ShapeTag::polygon:
      return false;
  }
  return false;
}

double calibrate_margin(const Mesh& mesh, int n, double alpha, double R,
                        const Point& center, double eps) {
  auto shared = std::make_shared<Mesh>(mesh);
  KernelOperator op =
      assemble(shared, KernelParams{alpha, 0.0, n}, SelfCellRule::subdivide(16));
  ExtremalParams ep{eps, center, n, alpha};
  std::vector<double> vals(mesh.nodes.size(), 0.0);
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    if (dist(mesh.nodes[i], center, n) <= R)
      vals[i] = extremal_density(mesh.nodes[i], ep);
  DensityField g(shared, vals);
  return reversed_hls_check(op, g, g, sharp_constant(n, alpha));
}

}  // namespace

SweepReport test_function_sweep(const Mesh& mesh, int n, double alpha,
                                double lambda, double R,
                                std::vector<double> epsilons,
                                const Point& center) {
  if (n != mesh.dim)
    throw std::invalid_argument("test_function_sweep: n does not match mesh");
  if (!(alpha > n))
    throw std::invalid_argument("test_function_sweep: alpha must exceed n");
  if (!(R > 0) || !ball_inside_domain(mesh, center, R))
    throw std::invalid_argument(
        "test_function_sweep: B_R(center) is not contained in the domain");
  if (epsilons.empty())
    throw std::invalid_argument("test_function_sweep: empty epsilon grid");
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());
  epsilons.erase(std::unique(epsilons.begin(), epsilons.end()), epsilons.end());
  for (double e : epsilons)
    if (!(e > 0) || !(e < R / 2))
      throw std::invalid_argument(
          "test_function_sweep: epsilons must lie in (0, R/2)");
  if (lambda == 0 && epsilons.size() < 5)
    throw std::invalid_argument(
        "test_function_sweep: epsilon grid too coarse to fit a slope");

  const SharpConstant na = sharp_constant(n, alpha);
  const double qa = q_alpha(n, alpha);
  const double mn = extremal_qnorm_integral(n);

  SweepReport rep{};
  rep.n = n;
  rep.alpha = alpha;
  rep.lambda = lambda;
  rep.R = R;
  rep.center = center;

  for (double eps : epsilons) {
    const double T = R / eps;
    const double a0 = detail::truncated_pair_integral(n, alpha, 0, T);
    const double denom = std::pow(mn - detail::qnorm_tail(n, T), 2.0 / qa);
    SweepPoint pt{};
    pt.epsilon = eps;
    pt.tail_gap = a0 / denom - na.value;
    pt.lambda_term = 0;
    if (lambda != 0) {
      const double a1 = detail::truncated_pair_integral(n, alpha, 1, T);
      pt.lambda_term = lambda * eps * a1 / denom;
    }
    pt.quotient = na.value + pt.tail_gap + pt.lambda_term;
    pt.gap = pt.quotient - na.value;
    pt.dip = pt.quotient < na.value;
    rep.points.push_back(pt);
  }

  rep.dip_detected = std::any_of(rep.points.begin(), rep.points.end(),
                                 [](const SweepPoint& p) { return p.dip; });

  if (lambda == 0) {
    // Least squares on log(gap) vs log(eps) over the middle three fifths,
    // away from both the preasymptotic and the noise-floor ends.
    const std::size_t m = rep.points.size();
    const std::size_t lo = m / 5;
    const std::size_t hi = (4 * m + 4) / 5;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      if (!(rep.points[i].gap > 0)) continue;
      const double x = std::log(rep.points[i].epsilon);
      const double y = std::log(rep.points[i].gap);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      ++cnt;
    }
    if (cnt >= 2)
      rep.fitted_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  } else if (lambda < 0) {
    const SweepPoint& last = rep.points.back();
    rep.regime = std::abs(last.lambda_term) > last.tail_gap
                     ? "coupling_term_dominates"
                     : "truncation_term_dominates";
  }

  rep.calibration_epsilon = R / 4;
  rep.calibration_margin =
      calibrate_margin(mesh, n, alpha, R, center, rep.calibration_epsilon);
  rep.tol_disc = std::abs(rep.calibration_margin);
  return rep;
}

}  // namespace rhls
