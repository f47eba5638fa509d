#include <doctest.h>

#include <cmath>

#include "rhls/energy.hpp"
#include "rhls/kernel.hpp"
#include "rhls/rng.hpp"
#include "rhls/sharp.hpp"

using namespace rhls;

TEST_CASE("critical exponents are conjugate") {
  for (auto [n, a] : {std::pair{1, 3.0}, {2, 3.0}, {2, 4.0}, {3, 4.5}}) {
    const double q = q_alpha(n, a);
    const double p = p_alpha(n, a);
    CHECK(1.0 / p + 1.0 / q == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q > 0);
    CHECK(q < 1);
    CHECK(p < 0);
    CHECK(is_critical_exponent(q, n, a));
    CHECK_FALSE(is_critical_exponent(q + 1e-9, n, a));
  }
}

TEST_CASE("quasi norm basics") {
  auto mesh = build_interval_mesh(0, 1, 256);
  DensityField ones(mesh, std::vector<double>(256, 1.0));
  CHECK(quasi_norm(ones, 0.5) == doctest::Approx(1.0).epsilon(1e-14));

  // homogeneity
  Rng rng(2);
  std::vector<double> v(256);
  for (double& x : v) x = rng.uniform();
  DensityField f(mesh, v);
  std::vector<double> v3 = v;
  for (double& x : v3) x *= 3.0;
  DensityField f3(mesh, v3);
  CHECK(quasi_norm(f3, 0.5) ==
        doctest::Approx(3.0 * quasi_norm(f, 0.5)).epsilon(1e-13));

  // indicator of half the interval at q = 1/2: (1/2)^2
  std::vector<double> ind(256, 0.0);
  for (int i = 0; i < 128; ++i) ind[i] = 1.0;
  CHECK(quasi_norm(DensityField(mesh, ind), 0.5) ==
        doctest::Approx(0.25).epsilon(1e-14));

  CHECK_THROWS_AS(quasi_norm(ones, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(quasi_norm(ones, -1.0), std::invalid_argument);
  std::vector<double> neg(256, 1.0);
  neg[7] = -1e-3;
  CHECK_THROWS_AS(quasi_norm(DensityField(mesh, neg), 0.5),
                  std::invalid_argument);
}

TEST_CASE("energy quotient of the uniform field on [0,1]") {
  auto mesh = build_interval_mesh(0, 1, 256);
  auto op = assemble(mesh, KernelParams{3.0, 0.0, 1});
  DensityField ones(mesh, std::vector<double>(256, 1.0));
  EnergyReport rep = energy_quotient(op, ones, q_alpha(1, 3.0));
  CHECK(rep.quotient == doctest::Approx(1.0 / 6.0).epsilon(1e-4));
  CHECK(rep.qnorm == doctest::Approx(1.0).epsilon(1e-13));
  REQUIRE(rep.margin.has_value());
  const double expected_margin = 1.0 / 6.0 - sharp_constant(1, 3.0).value;
  CHECK(*rep.margin == doctest::Approx(expected_margin).epsilon(1e-3));
  CHECK(rep.N_alpha == sharp_constant(1, 3.0).value);

  // off-critical q leaves the margin unfilled
  EnergyReport rep2 = energy_quotient(op, ones, 0.3);
  CHECK_FALSE(rep2.margin.has_value());
}

TEST_CASE("quotient is invariant under field scaling") {
  auto mesh = build_interval_mesh(0, 1, 64);
  auto op = assemble(mesh, KernelParams{3.0, -0.5, 1});
  Rng rng(4);
  std::vector<double> v(64);
  for (double& x : v) x = 0.1 + rng.uniform();
  DensityField f(mesh, v);
  for (double& x : v) x *= 37.5;
  DensityField g(mesh, v);
  const double qf = energy_quotient(op, f, 0.25).quotient;
  const double qg = energy_quotient(op, g, 0.25).quotient;
  CHECK(qf == doctest::Approx(qg).epsilon(1e-12));
}

TEST_CASE("numerator is monotone under pointwise domination") {
  auto mesh = build_interval_mesh(0, 1, 64);
  auto op = assemble(mesh, KernelParams{3.0, -0.9, 1});  // admissible, entries >= 0
  REQUIRE(op.kernel_positive());
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> fv(64), gv(64);
    for (int i = 0; i < 64; ++i) {
      fv[i] = rng.uniform();
      gv[i] = fv[i] + rng.uniform();
    }
    const double nf = op.bilinear(fv, fv);
    const double ng = op.bilinear(gv, gv);
    CHECK(nf <= ng + 1e-15);
  }
}

TEST_CASE("coupled numerator keeps the (1 - |lambda| d) fraction") {
  auto mesh = build_interval_mesh(0, 1, 64);
  auto op0 = assemble(mesh, KernelParams{3.0, 0.0, 1});
  Rng rng(8);
  for (double lambda : {-0.3, -0.6, -0.9}) {
    auto opl = assemble(mesh, KernelParams{3.0, lambda, 1});
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> v(64);
      for (double& x : v) x = rng.uniform();
      const double n0 = op0.bilinear(v, v);
      const double nl = opl.bilinear(v, v);
      CHECK(nl >= (1.0 - std::abs(lambda) * 1.0) * n0 - 1e-14);
      CHECK(nl >= 0.0);
    }
  }
}

TEST_CASE("discrete lower-bound margins at the critical exponent") {
  auto mesh = build_interval_mesh(0, 1, 256);
  auto op = assemble(mesh, KernelParams{3.0, 0.0, 1});
  const double na = sharp_constant(1, 3.0).value;
  Rng rng(123);
  double worst = 1e9;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(256);
    for (double& x : v) x = rng.uniform();
    DensityField f(mesh, v);
    EnergyReport rep = energy_quotient(op, f, 0.5);
    worst = std::min(worst, rep.quotient);
  }
  CHECK(worst >= na * (1.0 - 0.02));
}

TEST_CASE("subcritical lower bound constant") {
  auto unit = build_interval_mesh(0, 1, 64);
  const double na = sharp_constant(1, 3.0).value;
  for (double q : {0.1, 0.25, 0.4})
    CHECK(subcritical_lower_bound_constant(*unit, 1, 3.0, q) ==
          doctest::Approx(na).epsilon(1e-13));
  CHECK(subcritical_lower_bound_constant(*unit, 1, 3.0, 0.25) ==
        doctest::Approx(1.0 / (2 * M_PI * M_PI)).epsilon(1e-12));

  // Non-unit measure picks up the containment factor.
  auto wide = build_interval_mesh(0, 2, 64);
  const double q = 0.25;
  const double expected = na * std::pow(2.0, -2.0 * (1 / q - 2.0));
  CHECK(subcritical_lower_bound_constant(*wide, 1, 3.0, q) ==
        doctest::Approx(expected).epsilon(1e-13));

  CHECK_THROWS_AS(subcritical_lower_bound_constant(*unit, 1, 3.0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(subcritical_lower_bound_constant(*unit, 1, 3.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("lower-bound property campaign") {
  auto mesh = build_interval_mesh(0, 1, 128);
  auto op = assemble(mesh, KernelParams{3.0, 0.0, 1});
  const double q = 0.25;
  const double c = subcritical_lower_bound_constant(*mesh, 1, 3.0, q);
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(128);
    for (double& x : v) x = rng.uniform();
    DensityField f(mesh, v);
    const double num = op.bilinear(v, v);
    const double qn = quasi_norm(f, q);
    CHECK(num >= (c - 0.02 * c) * qn * qn);
  }
}

TEST_CASE("energy quotient rejects the zero field") {
  auto mesh = build_interval_mesh(0, 1, 16);
  auto op = assemble(mesh, KernelParams{3.0, 0.0, 1});
  DensityField zero(mesh, std::vector<double>(16, 0.0));
  CHECK_THROWS_AS(energy_quotient(op, zero, 0.5), std::invalid_argument);
}
