#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kgl/dynamics.hpp"
#include "kgl/errors.hpp"
#include "kgl/model.hpp"
#include "kgl/quadrature.hpp"

using namespace kgl;

namespace {

ModelSpec square_well_model(int dim = 1, double L = 10.0, double z = 0.2) {
  ModelSpec m;
  m.domain = TorusDomain(dim, L);
  m.phi = PairPotential::square_well(1.0, 0.5);
  m.z = z;
  m.kernel = JumpKernel::uniform_ball(dim, 0.5);
  return m;
}

PointSet random_points(Rng &rng, const TorusDomain &dom, std::size_t n) {
  PointSet p;
  for (std::size_t i = 0; i < n; ++i) {
    Point x{0, 0, 0};
    for (int k = 0; k < dom.dim(); ++k)
      x[k] = rng.uniform(0, dom.side());
    p.push_back(x);
  }
  return p;
}

double brute_energy(const Point &x, const PointSet &pts, const TorusDomain &dom,
                    const PairPotential &phi) {
  double e = 0.0;
  for (const auto &p : pts)
    e += phi.at(torus_distance(x, p, dom));
  return e;
}

} // namespace

TEST(Potential, Examples) {
  EXPECT_EQ(PairPotential::zero().at(0.1), 0.0);
  auto sw = PairPotential::square_well(1.0, 0.5);
  EXPECT_EQ(sw.at(0.3), 1.0);
  EXPECT_EQ(sw.at(0.6), 0.0);
  auto hc = PairPotential::hardcore_square_well(0.1, 0.5, 0.5);
  EXPECT_TRUE(std::isinf(hc.at(0.05)));
  EXPECT_GT(hc.at(0.05), 0.0);
}

TEST(Potential, Properties) {
  std::vector<PairPotential> menu{PairPotential::zero(), PairPotential::square_well(1.0, 0.5),
                                  PairPotential::triangle(2.0, 0.7),
                                  PairPotential::hardcore_square_well(0.1, -0.5, 0.4),
                                  PairPotential::lennard_jones(0.3, 1.0, 0.9)};
  Rng rng(2);
  for (const auto &phi : menu) {
    const double B = phi.stability_constant(1);
    for (int i = 0; i < 2000; ++i) {
      Point u{rng.uniform(-1.5, 1.5), 0, 0};
      Point mu{-u[0], 0, 0};
      double v = phi(u, 1);
      EXPECT_EQ(v, phi(mu, 1));
      if (std::abs(u[0]) > phi.range()) EXPECT_EQ(v, 0.0);
      if (phi.positive()) EXPECT_GE(v, 0.0);
      EXPECT_GE(v, -2.0 * B);
    }
  }
}

TEST(RelativeEnergy, Examples) {
  ModelSpec m = square_well_model();
  Configuration g = m.make_configuration({{5.3, 0, 0}});
  EXPECT_EQ(relative_energy({5.0, 0, 0}, g, m.phi), 1.0);
  EXPECT_EQ(relative_energy({5.0, 0, 0}, g, PairPotential::zero()), 0.0);
}

TEST(RelativeEnergy, MatchesBruteForceTriangle) {
  Rng rng(4);
  for (int dim = 1; dim <= 3; ++dim) {
    TorusDomain dom(dim, 3.0);
    auto phi = PairPotential::triangle(1.5, 0.9);
    for (int t = 0; t < 100; ++t) {
      PointSet pts = random_points(rng, dom, 20);
      Configuration g(dom, phi.range(), pts);
      Point x = random_points(rng, dom, 1)[0];
      EXPECT_NEAR(relative_energy(x, g, phi), brute_energy(x, g.points(), dom, phi), 1e-12);
    }
  }
}

TEST(TotalEnergy, Examples) {
  ModelSpec m = square_well_model();
  EXPECT_EQ(total_energy(m.make_configuration({}), m.phi), 0.0);
  EXPECT_EQ(total_energy(m.make_configuration({{1, 0, 0}}), m.phi), 0.0);
  EXPECT_EQ(total_energy(m.make_configuration({{1, 0, 0}, {1.1, 0, 0}, {1.2, 0, 0}}), m.phi), 3.0);
}

TEST(TotalEnergy, IncrementIdentityFuzz) {
  Rng rng(8);
  std::vector<PairPotential> menu{PairPotential::square_well(1.0, 0.5), PairPotential::triangle(1.0, 0.5),
                                  PairPotential::lennard_jones(0.2, 1.0, 0.5)};
  TorusDomain dom(1, 10.0);
  for (const auto &phi : menu)
    for (int t = 0; t < 500; ++t) {
      PointSet pts = random_points(rng, dom, 30);
      Configuration g(dom, phi.range(), pts);
      double U = total_energy(g, phi);
      ASSERT_NEAR(U, total_energy_direct(pts, dom, phi), 1e-9 * std::max(1.0, std::abs(U)));
      std::size_t id = rng.index(pts.size());
      Point x = g.point(id);
      double e = relative_energy(x, g, phi, id);
      Configuration minus = g;
      minus.remove(id);
      double Um = total_energy(minus, phi);
      double scale = std::max({1.0, std::abs(U), std::abs(Um), std::abs(e)});
      EXPECT_NEAR(U - Um, e, 1e-12 * scale);
    }
}

TEST(Kernel, IdentityScale) {
  TorusDomain dom(1, 20.0);
  auto a = JumpKernel::uniform_ball(1, 0.5);
  for (double u : {-0.4, 0.0, 0.3, 0.7})
    EXPECT_DOUBLE_EQ(a_eps_eval(a, 1.0, {u, 0, 0}, dom), a.density({u, 0, 0}));
}

TEST(Kernel, ScaledUniformFormula) {
  TorusDomain dom(1, 20.0);
  auto a = JumpKernel::uniform_ball(1, 1.0);
  EXPECT_DOUBLE_EQ(a.density({0.3, 0, 0}), 0.5);
  for (double u : {-1.9, -0.5, 0.0, 1.0, 1.99})
    EXPECT_DOUBLE_EQ(a_eps_eval(a, 0.5, {u, 0, 0}, dom), 0.25);
  EXPECT_EQ(a_eps_eval(a, 0.5, {2.1, 0, 0}, dom), 0.0);
}

// Breakpoint Gauss-Legendre over one period; kinks where |u + nL| = r / eps.
double kernel_mass_1d(const JumpKernel &a, double eps, const TorusDomain &dom) {
  const double L = dom.side(), reach = a.cutoff() / eps;
  Breakpoints br;
  for (int n = -200; n <= 200; ++n) {
    br.add(reach + n * L);
    br.add(-reach + n * L);
  }
  return integrate_1d(-0.5 * L, 0.5 * L, br,
                      [&](double u) { return a_eps_eval(a, eps, {u, 0, 0}, dom); })
      .value;
}

TEST(Kernel, MassPreservedAtEveryEps) {
  TorusDomain dom(1, 4.0);
  for (const auto &a : {JumpKernel::uniform_ball(1, 0.5), JumpKernel::gaussian_truncated(1, 0.3, 0.9, 2.0)})
    for (double eps : {1.0, 0.5, 0.2, 0.1, 0.05, 0.01})
      EXPECT_NEAR(kernel_mass_1d(a, eps, dom), a.mass(), 1e-6) << a.describe() << " eps=" << eps;
}

TEST(Kernel, MassPreserved2d) {
  TorusDomain dom(2, 2.0);
  auto a = JumpKernel::uniform_ball(2, 0.5);
  for (double eps : {1.0, 0.3}) {
    const int n = 800;
    const double h = 2.0 / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        s += a_eps_eval(a, eps, {-1 + (i + 0.5) * h, -1 + (j + 0.5) * h, 0}, dom) * h * h;
    EXPECT_NEAR(s, 1.0, 5e-3) << "eps=" << eps;
  }
}

TEST(Kernel, SamplerMatchesDensity) {
  auto a = JumpKernel::gaussian_truncated(1, 0.3, 0.6);
  Rng rng(1);
  std::vector<double> draws;
  for (int i = 0; i < 20000; ++i) {
    double u = a.sample(rng)[0];
    ASSERT_LE(std::abs(u), 0.6);
    draws.push_back(u);
  }
  auto cdf = [&](double x) {
    Breakpoints br;
    return integrate_1d(-0.6, std::min(x, 0.6), br, [&](double u) { return a.density({u, 0, 0}); }).value;
  };
  EXPECT_GT(ks_one_sample(draws, cdf).p_value, 0.001);
}

TEST(KawasakiRate, Examples) {
  ModelSpec m = square_well_model();
  m.phi = PairPotential::zero();
  Configuration g = m.make_configuration({{5.0, 0, 0}, {8.0, 0, 0}});
  EXPECT_DOUBLE_EQ(kawasaki_rate(0, {5.2, 0, 0}, g, m), 1.0);
  m = square_well_model();
  g = m.make_configuration({{5.0, 0, 0}, {5.5, 0, 0}});
  EXPECT_NEAR(kawasaki_rate(0, {5.2, 0, 0}, g, m), std::exp(-1.0), 1e-15);
}

TEST(KawasakiRate, HalfFamilyMatchesBruteForce) {
  ModelSpec m = square_well_model();
  m.phi = PairPotential::triangle(1.3, 0.8);
  m.s = 0.5;
  m.rate_cap = 100.0;
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    PointSet pts = random_points(rng, m.domain, 10);
    Configuration g = m.make_configuration(pts);
    std::size_t id = rng.index(10);
    Point y{g.point(id)[0] + rng.uniform(-0.5, 0.5), 0, 0};
    y = wrap(y, m.domain);
    PointSet rest = g.points();
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(id));
    double ex = brute_energy(g.point(id), rest, m.domain, m.phi);
    double ey = brute_energy(y, rest, m.domain, m.phi);
    double expect = a_eps_eval(m.kernel, 1.0, min_image_disp(g.point(id), y, m.domain), m.domain) *
                    std::exp(0.5 * ex - 0.5 * ey);
    EXPECT_NEAR(kawasaki_rate(id, y, g, m), expect, 1e-12 * std::max(1.0, expect));
  }
}

TEST(KawasakiRate, BoundedByKernelForPositivePotential) {
  ModelSpec m = square_well_model();
  Rng rng(9);
  for (int t = 0; t < 500; ++t) {
    Configuration g = m.make_configuration(random_points(rng, m.domain, 15));
    std::size_t id = rng.index(15);
    Point y = wrap({g.point(id)[0] + rng.uniform(-0.6, 0.6), 0, 0}, m.domain);
    double kern = a_eps_eval(m.kernel, m.eps, min_image_disp(g.point(id), y, m.domain), m.domain);
    EXPECT_LE(kawasaki_rate(id, y, g, m), kern);
  }
}

TEST(KawasakiRate, HardCoreTargetForbidden) {
  ModelSpec m = square_well_model();
  m.phi = PairPotential::hardcore_square_well(0.2, 0.5, 0.5);
  Configuration g = m.make_configuration({{5.0, 0, 0}, {5.4, 0, 0}});
  EXPECT_EQ(kawasaki_rate(0, {5.3, 0, 0}, g, m), 0.0);
}

TEST(GlauberRates, Examples) {
  ModelSpec m = square_well_model();
  m.phi = PairPotential::zero();
  Configuration g = m.make_configuration({{5.0, 0, 0}});
  EXPECT_DOUBLE_EQ(glauber_death_rate(0, g, m, 0.7), 0.7);
  EXPECT_DOUBLE_EQ(glauber_birth_density({1.0, 0, 0}, g, m, 0.7), 0.7 * 0.2);
  m = square_well_model();
  EXPECT_NEAR(glauber_birth_density({5.2, 0, 0}, g, m, 0.7), 0.7 * 0.2 * std::exp(-1.0), 1e-15);
  m.s = 1.0;
  m.rate_cap = 10.0;
  Configuration g2 = m.make_configuration({{5.0, 0, 0}, {5.1, 0, 0}, {4.8, 0, 0}});
  EXPECT_NEAR(glauber_death_rate(0, g2, m, 0.7), 0.7 * std::exp(2.0), 1e-12);
}

TEST(Alpha, Examples) {
  auto a = JumpKernel::uniform_ball(1, 0.5);
  EXPECT_DOUBLE_EQ(alpha_from_k1(0.2, 0.2, a), a.mass());
  EXPECT_NEAR(alpha_from_k1(0.18, 0.2, a), 0.9, 1e-15);
  EXPECT_THROW(alpha_from_k1(0.0, 0.2, a), std::invalid_argument);
}

TEST(Laht, Examples) {
  ModelSpec m = square_well_model(1, 10.0, 0.2);
  auto c = lahht_check(m);
  const double closed = 0.2 * 2.0 * 0.5 * (1.0 - std::exp(-1.0));
  EXPECT_NEAR(c.lhs, closed, 1e-12);
  EXPECT_NEAR(c.rhs, 1.0 / (2.0 * std::numbers::e), 1e-15);
  EXPECT_TRUE(c.satisfied);
  m.z = 0.4;
  auto c2 = lahht_check(m);
  EXPECT_NEAR(c2.lhs, 2.0 * closed, 1e-12);
  EXPECT_FALSE(c2.satisfied);
  m.phi = PairPotential::zero();
  EXPECT_EQ(lahht_check(m).lhs, 0.0);
  EXPECT_TRUE(lahht_check(m).satisfied);
}

TEST(ModelSpec, Validation) {
  ModelSpec m = square_well_model();
  EXPECT_NO_THROW(m.validate());
  auto field_of = [](const ModelSpec &bad) {
    try {
      bad.validate();
    } catch (const ConfigError &e) {
      return e.field();
    }
    return std::string();
  };
  ModelSpec b = m;
  b.z = 0.0;
  EXPECT_EQ(field_of(b), "z");
  b = m;
  b.phi = PairPotential::square_well(1.0, 5.0);
  EXPECT_EQ(field_of(b), "potential.R");
  b = m;
  b.s = 0.3;
  EXPECT_EQ(field_of(b), "rate_cap");
  b = m;
  b.phi = PairPotential::lennard_jones(0.2, 1.0, 0.5);
  EXPECT_EQ(field_of(b), "rate_cap");
  b = m;
  b.eps = -1;
  EXPECT_EQ(field_of(b), "eps");
}

TEST(DetailedBalance, IdentitiesHoldOnEveryBuiltin) {
  std::vector<std::pair<PairPotential, double>> cases{
      {PairPotential::zero(), 0.0},
      {PairPotential::square_well(1.0, 0.5), 0.0},
      {PairPotential::square_well(1.0, 0.5), 0.5},
      {PairPotential::triangle(2.0, 0.5), 1.0},
      {PairPotential::hardcore_square_well(0.1, -0.5, 0.4), 0.3},
      {PairPotential::lennard_jones(0.2, 0.5, 0.45), 0.5}};
  for (const auto &[phi, s] : cases) {
    ModelSpec m = square_well_model(1, 6.0, 0.3);
    m.phi = phi;
    m.s = s;
    if (s > 0.0 || !phi.positive()) m.rate_cap = 1e6;
    auto rep = detailed_balance_audit(m, 2000, 42);
    EXPECT_TRUE(rep.pass()) << phi.describe() << " s=" << s << " kaw=" << rep.max_rel_kawasaki
                            << " gl=" << rep.max_rel_glauber << " U=" << rep.max_rel_energy;
  }
}

TEST(DetailedBalance, HardCoreTargetsGiveZeroCases) {
  ModelSpec m = square_well_model(1, 3.0, 0.3);
  m.phi = PairPotential::hardcore_square_well(0.3, 0.0, 0.3);
  auto rep = detailed_balance_audit(m, 500, 3);
  EXPECT_GT(rep.zero_cases, 0u);
  EXPECT_TRUE(rep.pass());
}
