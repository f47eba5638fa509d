#ifndef RHLS_KERNEL_HPP
#define RHLS_KERNEL_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <span>

#include "rhls/energy.hpp"
#include "rhls/geometry.hpp"

namespace rhls {

struct KernelParams {
  double alpha;   // kernel order, alpha > dim
  double lambda;  // lower-order coupling, units 1/length
  int dim;
};

/// Diagonal treatment of the Nystrom matrix. The kernel vanishes at
/// coincidence (alpha > n), so `zero` is consistent but loses one order
/// near the diagonal; `subdivide` integrates the self cell by k-fold
/// uniform subdivision.
struct SelfCellRule {
  enum class Kind { zero, subdivide };
  Kind kind = Kind::subdivide;
  int subdivisions = 16;

  static SelfCellRule zero() { return {Kind::zero, 0}; }
  static SelfCellRule subdivide(int k) { return {Kind::subdivide, k}; }
};

/// t^beta with a repeated-multiplication fast path for small integer beta
/// (exact under power-of-two coordinate scalings).
double kernel_power(double t, double beta);

/// Dense discretization of f -> int_Omega (|x-y|^(alpha-n)
/// + lambda |x-y|^(alpha-n+1)) f(y) dy on a fixed mesh. The apply matrix G
/// carries quadrature weights (G_ij = w_j k(x_i, x_j)); S = w_i G_ij is the
/// bitwise-symmetric bilinear form.
class KernelOperator {
 public:
  KernelOperator(MeshPtr mesh, KernelParams params, Eigen::MatrixXd apply_mat,
                 Eigen::MatrixXd sym_form, double max_pair_distance);

  const KernelParams& params() const { return params_; }
  const MeshPtr& mesh() const { return mesh_; }
  const Eigen::MatrixXd& apply_matrix() const { return apply_; }
  const Eigen::MatrixXd& symmetric_form() const { return sym_; }
  double max_pair_distance() const { return max_pair_distance_; }

  /// Whether 1 + lambda |x_i - x_j| > 0 held on all node pairs.
  bool kernel_positive() const;

  /// Bilinear form B(f, g) = f' S g.
  double bilinear(std::span<const double> f, std::span<const double> g) const;

 private:
  MeshPtr mesh_;
  KernelParams params_;
  Eigen::MatrixXd apply_;  // G
  Eigen::MatrixXd sym_;    // S
  double max_pair_distance_;
};

/// Row-parallel dense assembly. Entries are independent of the thread
/// count; threads = 0 picks the hardware default.
KernelOperator assemble(MeshPtr mesh, KernelParams params,
                        SelfCellRule self_cell_rule = {}, int threads = 0);

/// (K f)(x_i) = sum_j G_ij f_j.
DensityField apply(const KernelOperator& op, const DensityField& f);

/// sum_j w_j k(|x - x_j|) f_j at an arbitrary point of the closed domain;
/// boundary values and reflections use this so no interpolation occurs.
double evaluate_at(const KernelOperator& op, const DensityField& f,
                   const Point& x);

/// Double quadrature sum_ij w_i w_j v_i v_j |x_i - x_j|^beta with the
/// diagonal handled by the given self-cell rule.
double pairwise_form(const Mesh& mesh, double beta, std::span<const double> v,
                     SelfCellRule rule = {});

/// Binary dump: magic "RHLSKER1", N as 64-bit little-endian, then the
/// row-major float64 apply matrix.
void dump_matrix(const KernelOperator& op, std::ostream& out);

}  // namespace rhls

#endif
