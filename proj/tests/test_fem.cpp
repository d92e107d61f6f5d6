#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stc/fem.hpp"

namespace stc {
namespace {

ProblemConfig config(double p, double q, double eps = -1.0) {
  ProblemConfig cfg;
  cfg.p = p;
  cfg.q = q;
  cfg.epsilon = eps;
  return cfg;
}

TEST(Config, CriticalExponent) {
  EXPECT_DOUBLE_EQ(critical_trace_exponent(1.5, 2), 3.0);
  EXPECT_TRUE(std::isinf(critical_trace_exponent(2.0, 2)));
  EXPECT_TRUE(std::isinf(critical_trace_exponent(3.0, 2)));
  EXPECT_DOUBLE_EQ(critical_trace_exponent(2.0, 3), 4.0);
}

TEST(Config, SubcriticalRule) {
  EXPECT_NO_THROW(validate(config(2.0, 7.0), 2));
  EXPECT_THROW(validate(config(1.5, 3.5), 2), ConfigError);
  EXPECT_THROW(validate(config(1.5, 3.0), 2), ConfigError);
  EXPECT_NO_THROW(validate(config(1.5, 2.9), 2));
  EXPECT_THROW(validate(config(1.0, 1.0), 2), ConfigError);
  EXPECT_THROW(validate(config(2.0, 0.5), 2), ConfigError);
  ProblemConfig bad = config(2.0, 2.0);
  bad.dof_tolerance = 0.0;
  EXPECT_THROW(validate(bad, 2), ConfigError);
  try {
    validate(config(1.5, 3.5), 2);
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("p_*"), std::string::npos);
  }
}

TEST(Config, DefaultRegularization) {
  EXPECT_DOUBLE_EQ(config(1.5, 2.0).effective_epsilon(), 1e-8);
  EXPECT_DOUBLE_EQ(config(2.0, 2.0).effective_epsilon(), 0.0);
  EXPECT_DOUBLE_EQ(config(1.5, 2.0, 0.1).effective_epsilon(), 0.1);
}

TEST(Energy, ZeroFieldGivesRegularizationVolume) {
  const Mesh m = generate_mesh(Rectangle{2.0, 1.0}, 0.25);
  const Field zero(m.num_vertices(), 0.0);
  EXPECT_EQ(energy(m, config(2.0, 2.0), zero), 0.0);
  EXPECT_NEAR(energy(m, config(1.5, 2.0, 0.1), zero), std::pow(0.1, 1.5) * 2.0, 1e-14);
}

TEST(Energy, ConstantFieldGivesVolume) {
  const Mesh m = generate_mesh(Disk{1.0}, 0.1);
  const Field one(m.num_vertices(), 1.0);
  EXPECT_NEAR(energy(m, config(3.0, 2.0, 0.0), one), m.total_volume(), 1e-12);
}

TEST(Energy, LinearFieldOnInterval) {
  const Mesh m = generate_mesh(Interval{0.0, 1.0}, 0.01);
  Field u(m.num_vertices());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = m.vertex(i).x;
  // Lumped mass is the trapezoid rule: error h^2/6 on x^2.
  const double h = 1.0 / m.num_cells();
  EXPECT_NEAR(energy(m, config(2.0, 2.0), u), 4.0 / 3.0 + h * h / 6.0, 1e-12);
}

TEST(Boundary, ConstantFields) {
  const Mesh m = generate_mesh(Rectangle{1.0, 1.0}, 0.25);
  EXPECT_NEAR(boundary_norm_q(m, config(2.0, 2.0), Field(m.num_vertices(), 1.0)), 4.0, 1e-14);
  EXPECT_EQ(boundary_norm_q(m, config(2.0, 2.0), Field(m.num_vertices(), 0.0)), 0.0);
  EXPECT_NEAR(boundary_norm_q(m, config(2.0, 3.0), Field(m.num_vertices(), -1.5)), std::pow(1.5, 3.0) * 4.0,
              1e-12);
}

TEST(Boundary, GaussRuleIsExactForQuadratics) {
  const Mesh m = generate_mesh(Rectangle{1.0, 1.0}, 0.5);
  Field u(m.num_vertices());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = m.vertex(i).x;
  // int x^2 over the square boundary: bottom and top 1/3 each, right edge 1.
  EXPECT_NEAR(boundary_norm_q(m, config(2.0, 2.0), u), 5.0 / 3.0, 1e-14);
}

TEST(Quotient, ConstantFieldOnDiskAndSquare) {
  const Mesh disk = generate_mesh(Disk{1.0}, 0.1);
  EXPECT_NEAR(rayleigh_quotient(disk, config(2.0, 2.0), Field(disk.num_vertices(), 1.0)), 0.5, 0.01);
  const Mesh square = generate_mesh(Rectangle{1.0, 1.0}, 0.25);
  EXPECT_NEAR(rayleigh_quotient(square, config(2.0, 2.0), Field(square.num_vertices(), 1.0)), 0.25, 1e-14);
}

TEST(Quotient, InteriorFieldIsNotAdmissible) {
  const Mesh m = generate_mesh(Disk{1.0}, 0.25);
  Field u(m.num_vertices(), 0.0);
  for (std::size_t v = 0; v < u.size(); ++v) {
    if (!m.is_boundary_vertex(v)) u[v] = 1.0;
  }
  EXPECT_THROW(rayleigh_quotient(m, config(2.0, 2.0), u), NotAdmissible);
  EXPECT_THROW(require_admissible(m, config(2.0, 2.0), u), NotAdmissible);
}

// 0-homogeneity over random fields, scalings and exponents.
TEST(QuotientProperty, ZeroHomogeneous) {
  testing::Generator gen(11);
  const Mesh m = generate_mesh(Disk{1.0}, 0.2);
  for (int trial = 0; trial < 40; ++trial) {
    const ProblemConfig cfg = config(gen.uniform(1.2, 4.0), gen.uniform(1.0, 4.0));
    const Field u = gen.field(m.num_vertices(), -1.0, 1.0);
    double c = gen.uniform(0.1, 10.0);
    if (trial % 2) c = -c;
    Field cu(u);
    for (double& x : cu) x *= c;
    const double a = rayleigh_quotient(m, cfg, u), b = rayleigh_quotient(m, cfg, cu);
    // eps > 0 for p < 2 breaks exact homogeneity at the 1e-16 level only.
    EXPECT_NEAR(b, a, 1e-12 * a) << "p=" << cfg.p << " q=" << cfg.q << " c=" << c;
  }
}

// Central differences of the quotient against the assembled gradient.
TEST(QuotientProperty, GradientMatchesFiniteDifferences) {
  testing::Generator gen(12);
  const Mesh m = generate_mesh(Rectangle{1.0, 1.0}, 0.25);
  for (int trial = 0; trial < 12; ++trial) {
    const ProblemConfig cfg = config(gen.uniform(1.5, 3.5), gen.uniform(1.5, 3.5));
    // Positive fields keep |u|^q smooth; unit scale as the step refers to it.
    const Field u = gen.field(m.num_vertices(), 0.5, 1.5);
    const Field g = quotient_gradient(m, cfg, u);
    double gmax = 0.0, err = 0.0;
    const double h = 1e-6;
    for (std::size_t i = 0; i < u.size(); ++i) {
      Field up(u), dn(u);
      up[i] += h;
      dn[i] -= h;
      const double fd = (rayleigh_quotient(m, cfg, up) - rayleigh_quotient(m, cfg, dn)) / (2 * h);
      err = std::max(err, std::abs(fd - g[i]));
      gmax = std::max(gmax, std::abs(g[i]));
    }
    EXPECT_LE(err / gmax, 1e-5) << "p=" << cfg.p << " q=" << cfg.q;
  }
}

TEST(QuotientProperty, QuadraticVariationsAreLinear) {
  testing::Generator gen(13);
  const Mesh m = generate_mesh(Disk{1.0}, 0.25);
  const ProblemConfig cfg = config(2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Field u1 = gen.field(m.num_vertices(), -1.0, 1.0);
    const Field u2 = gen.field(m.num_vertices(), -1.0, 1.0);
    Field sum(u1);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += u2[i];
    QuotientParts a, b, s;
    evaluate_parts(m, cfg, u1, a);
    evaluate_parts(m, cfg, u2, b);
    evaluate_parts(m, cfg, sum, s);
    for (std::size_t i = 0; i < sum.size(); ++i) {
      EXPECT_NEAR(s.energy_variation[i], a.energy_variation[i] + b.energy_variation[i], 1e-12);
      EXPECT_NEAR(s.boundary_variation[i], a.boundary_variation[i] + b.boundary_variation[i], 1e-12);
    }
  }
}

TEST(Basis, GradientsSumToZeroAndReproduceLinears) {
  const Mesh m = generate_mesh(Disk{1.0}, 0.3);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const auto g = basis_gradients(m, c);
    const auto cell = m.cell(c);
    Point sum = g[0] + g[1] + g[2];
    EXPECT_NEAR(norm(sum), 0.0, 1e-12);
    Point gx;
    for (int k = 0; k < 3; ++k) gx = gx + m.vertex(cell[k]).x * g[k];
    EXPECT_NEAR(gx.x, 1.0, 1e-12);
    EXPECT_NEAR(gx.y, 0.0, 1e-12);
  }
}

}  // namespace
}  // namespace stc
