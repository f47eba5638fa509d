#include "rhls/kernel.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace rhls {

double kernel_power(double t, double beta) {
  const int ib = static_cast<int>(beta);
  if (beta == ib && ib >= 0 && ib <= 8) {
    double r = 1;
    for (int i = 0; i < ib; ++i) r *= t;
    return r;
  }
  return std::pow(t, beta);
}

namespace {

double self_cell_integral(const Mesh& mesh, std::size_t i, double beta,
                          double lambda, SelfCellRule rule) {
  if (rule.kind == SelfCellRule::Kind::zero) return 0.0;
  std::vector<Point> ys;
  std::vector<double> ws;
  subdivide_cell(mesh, i, rule.subdivisions, ys, ws);
  double s = 0;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    const double d = dist(mesh.nodes[i], ys[j], mesh.dim);
    s += ws[j] * kernel_power(d, beta) * (1 + lambda * d);
  }
  return s;
}

void check_field(const KernelOperator& op, const DensityField& f) {
  if (!f.mesh) throw std::invalid_argument("field has no mesh");
  if (f.mesh.get() != op.mesh().get() &&
      mesh_hash(*f.mesh) != mesh_hash(*op.mesh()))
    throw std::invalid_argument("field/operator mesh mismatch");
  if (f.values.size() != op.mesh()->nodes.size())
    throw std::invalid_argument("field size does not match mesh");
}

}  // namespace

KernelOperator::KernelOperator(MeshPtr mesh, KernelParams params,
                               Eigen::MatrixXd apply_mat,
                               Eigen::MatrixXd sym_form,
                               double max_pair_distance)
    : mesh_(std::move(mesh)),
      params_(params),
      apply_(std::move(apply_mat)),
      sym_(std::move(sym_form)),
      max_pair_distance_(max_pair_distance) {}

bool KernelOperator::kernel_positive() const {
  return params_.lambda >= 0 || 1 + params_.lambda * max_pair_distance_ > 0;
}

double KernelOperator::bilinear(std::span<const double> f,
                                std::span<const double> g) const {
  Eigen::Map<const Eigen::VectorXd> fv(f.data(), f.size());
  Eigen::Map<const Eigen::VectorXd> gv(g.data(), g.size());
  return fv.dot(sym_ * gv);
}

KernelOperator assemble(MeshPtr mesh, KernelParams params,
                        SelfCellRule self_cell_rule, int threads) {
  if (!mesh) throw std::invalid_argument("assemble: null mesh");
  if (params.dim != mesh->dim)
    throw std::invalid_argument("assemble: params.dim does not match mesh");
  if (!(params.alpha > mesh->dim))
    throw std::invalid_argument("assemble: alpha must exceed the dimension");
  if (!std::isfinite(params.lambda))
    throw std::invalid_argument("assemble: lambda must be finite");

  const auto n = static_cast<Eigen::Index>(mesh->nodes.size());
  const double beta = params.alpha - mesh->dim;
  const double lambda = params.lambda;
  Eigen::MatrixXd values(n, n);

  int nthreads = threads > 0 ? threads
                             : static_cast<int>(std::max(
                                   1u, std::thread::hardware_concurrency()));
  nthreads = std::min<int>(nthreads, static_cast<int>(n));

  std::vector<double> row_maxd(n, 0.0);
  auto work = [&](Eigen::Index i0, Eigen::Index i1) {
    for (Eigen::Index i = i0; i < i1; ++i) {
      double maxd = 0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double d = dist(mesh->nodes[i], mesh->nodes[j], mesh->dim);
        maxd = std::max(maxd, d);
        const double v = kernel_power(d, beta) * (1 + lambda * d);
        values(i, j) = v;
        values(j, i) = v;
      }
      values(i, i) =
          self_cell_integral(*mesh, i, beta, lambda, self_cell_rule) /
          mesh->weights[i];
      row_maxd[i] = maxd;
    }
  };
  if (nthreads <= 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const Eigen::Index chunk = (n + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      const Eigen::Index i0 = t * chunk;
      const Eigen::Index i1 = std::min(n, i0 + chunk);
      if (i0 < i1) pool.emplace_back(work, i0, i1);
    }
    for (auto& th : pool) th.join();
  }
  double maxd = 0;
  for (double d : row_maxd) maxd = std::max(maxd, d);

  Eigen::MatrixXd apply_mat(n, n);
  Eigen::MatrixXd sym(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      apply_mat(i, j) = values(i, j) * mesh->weights[j];
      sym(i, j) = (mesh->weights[i] * mesh->weights[j]) * values(i, j);
    }
  return KernelOperator(std::move(mesh), params, std::move(apply_mat),
                        std::move(sym), maxd);
}

DensityField apply(const KernelOperator& op, const DensityField& f) {
  check_field(op, f);
  Eigen::Map<const Eigen::VectorXd> fv(f.values.data(),
                                       static_cast<Eigen::Index>(f.values.size()));
  Eigen::VectorXd out = op.apply_matrix() * fv;
  return DensityField(op.mesh(),
                      std::vector<double>(out.data(), out.data() + out.size()));
}

double evaluate_at(const KernelOperator& op, const DensityField& f,
                   const Point& x) {
  check_field(op, f);
  const Mesh& mesh = *op.mesh();
  const double tol = 1e-9 * (1 + mesh.analytic_diameter);
  if (!contains_point(mesh, x, tol))
    throw std::invalid_argument("evaluate_at: point outside the closed domain");
  const double beta = op.params().alpha - mesh.dim;
  const double lambda = op.params().lambda;
  double s = 0;
  for (std::size_t j = 0; j < mesh.nodes.size(); ++j) {
    const double d = dist(x, mesh.nodes[j], mesh.dim);
    s += mesh.weights[j] * kernel_power(d, beta) * (1 + lambda * d) *
         f.values[j];
  }
  return s;
}

double pairwise_form(const Mesh& mesh, double beta, std::span<const double> v,
                     SelfCellRule rule) {
  const std::size_t n = mesh.nodes.size();
  if (v.size() != n) throw std::invalid_argument("pairwise_form: size mismatch");
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = dist(mesh.nodes[i], mesh.nodes[j], mesh.dim);
      row += mesh.weights[j] * v[j] * kernel_power(d, beta);
    }
    s += 2.0 * mesh.weights[i] * v[i] * row;
    s += mesh.weights[i] * v[i] * v[i] *
         self_cell_integral(mesh, i, beta, 0.0, rule);
  }
  return s;
}

void dump_matrix(const KernelOperator& op, std::ostream& out) {
  static_assert(std::endian::native == std::endian::little,
                "matrix dump assumes a little-endian host");
  const char magic[8] = {'R', 'H', 'L', 'S', 'K', 'E', 'R', '1'};
  out.write(magic, 8);
  const std::uint64_t n = op.apply_matrix().rows();
  out.write(reinterpret_cast<const char*>(&n), 8);
  const auto& g = op.apply_matrix();
  std::vector<double> row(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j < n; ++j) row[j] = g(i, j);
    out.write(reinterpret_cast<const char*>(row.data()), 8 * n);
  }
}

}  // namespace rhls
