#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "kgl/errors.hpp"
#include "kgl/gibbs.hpp"
#include "kgl/records.hpp"

using namespace kgl;

namespace {

ModelSpec make_model(double L, double z, PairPotential phi = PairPotential::square_well(1.0, 0.5)) {
  ModelSpec m;
  m.domain = TorusDomain(1, L);
  m.phi = phi;
  m.z = z;
  m.kernel = JumpKernel::uniform_ball(1, 0.5);
  return m;
}

SampleSet quick_samples(const ModelSpec &m, std::size_t n, std::uint64_t seed, std::size_t burn = 2000) {
  SamplerSettings s;
  s.n_samples = n;
  s.burn_in = burn;
  s.seed = seed;
  return sample_gibbs(m, s);
}

// Exact d = 1 torus integrals for the square well. Every nested integral is
// piecewise polynomial with kinks at earlier points plus multiples of R, so
// Gauss-Legendre on those pieces is exact.
struct TinyBox {
  double L, R, J;

  double boltz(const std::vector<double> &x) const {
    double u = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = i + 1; j < x.size(); ++j) {
        double d = std::abs(x[i] - x[j]);
        d = std::min(d, L - d);
        if (d < R) u += J;
      }
    return std::exp(-u);
  }

  double nested(std::vector<double> &x, std::size_t n) const {
    if (x.size() == n) return boltz(x);
    std::vector<double> nodes{0.0, L};
    for (double p : x)
      for (int m = -12; m <= 12; ++m) {
        double b = std::fmod(p + m * R + 10 * L, L);
        nodes.push_back(b);
      }
    std::sort(nodes.begin(), nodes.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      double a = nodes[i], b = nodes[i + 1];
      if (b - a < 1e-13) continue;
      total += boost::math::quadrature::gauss<double, 10>::integrate(
          [&](double t) {
            x.push_back(t);
            double v = nested(x, n);
            x.pop_back();
            return v;
          },
          a, b);
    }
    return total;
  }

  // int over [0, L)^n of e^{-U}; the first point is pinned by translation invariance.
  double configurational(std::size_t n) const {
    if (n == 0) return 1.0;
    std::vector<double> x{0.0};
    return L * nested(x, n);
  }
};

double factorial(std::size_t n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

} // namespace

TEST(GibbsChain, IdealGasPoisson) {
  ModelSpec m = make_model(10.0, 0.2, PairPotential::zero());
  auto s = quick_samples(m, 20000, 1);
  auto k1 = estimate_k1(s.configs, m.domain);
  EXPECT_LT(std::abs(k1.value - 0.2) / k1.std_error, 3.0);
  double mean_n = k1.value * 10.0;
  EXPECT_NEAR(mean_n, 2.0, 0.1);
}

TEST(GibbsChain, HardCoreOverlapAlwaysRejected) {
  ModelSpec m = make_model(10.0, 0.5, PairPotential::hardcore_square_well(0.4, 0.0, 0.4));
  m.rate_cap = 1.0;
  GibbsChain chain(m, 3);
  for (int i = 0; i < 200000; ++i) {
    chain.step();
    const auto &p = chain.current().points();
    if (i % 1000 == 0)
      ASSERT_TRUE(std::isfinite(total_energy_direct(p, m.domain, m.phi)));
  }
  EXPECT_TRUE(std::isfinite(total_energy_direct(chain.current().points(), m.domain, m.phi)));
}

TEST(GibbsChain, RejectsInfiniteInitialEnergy) {
  ModelSpec m = make_model(10.0, 0.5, PairPotential::hardcore_square_well(0.4, 0.0, 0.4));
  m.rate_cap = 1.0;
  EXPECT_THROW(GibbsChain(m, 1, {}, {{1.0, 0, 0}, {1.1, 0, 0}}), std::invalid_argument);
}

TEST(GibbsChain, TinyBoxParticleNumberMatchesPartitionFunction) {
  const double L = 2.0, z = 0.8;
  ModelSpec m = make_model(L, z);
  TinyBox box{L, 0.5, 1.0};
  std::vector<double> w(5);
  double Xi = 0.0;
  for (std::size_t n = 0; n <= 4; ++n) {
    w[n] = std::pow(z, n) / factorial(n) * box.configurational(n);
    Xi += w[n];
  }
  SamplerSettings s;
  s.n_samples = 200000;
  s.thin = 5;
  s.burn_in = 1000;
  s.seed = 77;
  s.options.max_particles = 4;
  auto set = sample_gibbs(m, s);
  for (std::size_t n = 0; n <= 4; ++n) {
    std::vector<double> ind;
    for (const auto &c : set.configs)
      ind.push_back(c.size() == n ? 1.0 : 0.0);
    auto est = batch_means(ind);
    double p = w[n] / Xi;
    EXPECT_LT(std::abs(est.value - p), 3.5 * est.std_error + 1e-4) << "n=" << n << " exact " << p;
  }
}

TEST(GibbsChain, MatchesExactRejectionSampler) {
  // zV = 2: draw Poisson(zV) uniform points and keep them with prob e^{-U}.
  ModelSpec m = make_model(10.0, 0.2);
  Rng rng(5);
  std::vector<double> exact_n;
  while (exact_n.size() < 40000) {
    auto n = rng.poisson(2.0);
    PointSet p;
    for (std::uint64_t i = 0; i < n; ++i)
      p.push_back({rng.uniform(0, 10.0), 0, 0});
    if (rng.uniform() < std::exp(-total_energy_direct(p, m.domain, m.phi)))
      exact_n.push_back(static_cast<double>(n));
  }
  auto s = quick_samples(m, 40000, 9);
  std::vector<double> chain_n;
  for (const auto &c : s.configs)
    chain_n.push_back(static_cast<double>(c.size()));
  auto a = batch_means(exact_n), b = batch_means(chain_n);
  EXPECT_LT(std::abs(z_score(a, b)), 3.0);
  std::vector<double> sq_a, sq_b;
  for (double v : exact_n) sq_a.push_back(v * v);
  for (double v : chain_n) sq_b.push_back(v * v);
  EXPECT_LT(std::abs(z_score(batch_means(sq_a), batch_means(sq_b))), 3.0);
}

TEST(SampleGibbs, DeterministicPerSeed) {
  ModelSpec m = make_model(10.0, 0.2);
  auto a = quick_samples(m, 300, 4, 200), b = quick_samples(m, 300, 4, 200);
  EXPECT_EQ(a.configs, b.configs);
  auto c = quick_samples(m, 300, 5, 200);
  EXPECT_NE(a.configs, c.configs);
}

TEST(SampleGibbs, WarnsOutsideLowActivityRegime) {
  ModelSpec m = make_model(10.0, 0.4);
  auto s = quick_samples(m, 100, 1, 100);
  EXPECT_FALSE(s.warnings.empty());
  EXPECT_TRUE(quick_samples(make_model(10.0, 0.2), 100, 1, 100).warnings.empty());
}

TEST(EstimateK1, SquareWellBelowActivityAndFlat) {
  ModelSpec m = make_model(20.0, 0.2);
  auto s = quick_samples(m, 20000, 12);
  auto k1 = estimate_k1(s.configs, m.domain);
  EXPECT_GT(k1.value, 0.0);
  EXPECT_LT(k1.value + 3 * k1.std_error, 0.2);
  auto halves = estimate_density_profile(s.configs, m.domain, 2);
  EXPECT_LT(std::abs(z_score(halves[0], halves[1])), 3.0);
  auto prof = estimate_density_profile(s.configs, m.domain, 10);
  int off = 0;
  for (const auto &b : prof)
    if (std::abs(b.value - k1.value) > 3.0 * b.std_error) ++off;
  EXPECT_LE(off, 1);
  EXPECT_THROW(estimate_k1(std::span(s.configs).first(50), m.domain), std::invalid_argument);
}

TEST(EstimateK2, IdealGasFlatAtZSquared) {
  ModelSpec m = make_model(10.0, 0.3, PairPotential::zero());
  auto s = quick_samples(m, 20000, 13);
  auto pc = estimate_k2(s.configs, m.domain, RadialBins::uniform(5.0, 5));
  int off = 0;
  for (const auto &k : pc.k2) {
    ASSERT_TRUE(k.has_value());
    if (std::abs(k->value - 0.09) > 3.0 * k->std_error) ++off;
  }
  EXPECT_LE(off, 1);
}

TEST(EstimateK2, HardCoreExcludedRegionIsMissing) {
  ModelSpec m = make_model(10.0, 0.3, PairPotential::hardcore_square_well(0.5, 0.0, 0.5));
  m.rate_cap = 1.0;
  auto s = quick_samples(m, 2000, 14);
  auto pc = estimate_k2(s.configs, m.domain, RadialBins::uniform(5.0, 20));
  EXPECT_FALSE(pc.k2[0].has_value());
  EXPECT_FALSE(pc.k2[1].has_value());
  EXPECT_EQ(pc.pair_counts[0], 0u);
  auto rb = ruelle_probe(s.configs, m, RadialBins::uniform(5.0, 20));
  for (const auto &v : rb.violations)
    EXPECT_GT(v.bin, 1u);
}

TEST(EstimateK2, TinyBoxMatchesQuadratureOracle) {
  const double L = 2.0, z = 0.8, R = 0.5;
  ModelSpec m = make_model(L, z);
  TinyBox box{L, R, 1.0};
  // Ensemble capped at 3 particles.
  double Xi = 0.0;
  for (std::size_t n = 0; n <= 3; ++n)
    Xi += std::pow(z, n) / factorial(n) * box.configurational(n);
  auto phi = [&](double d) {
    d = std::abs(d);
    d = std::min(d, L - d);
    return d < R ? 1.0 : 0.0;
  };
  // rho2(r) = [z^2 e^{-phi(r)} (1 + z int e^{-phi(x3) - phi(x3 - r)} dx3)] / Xi
  auto rho2 = [&](double r) {
    std::vector<double> nodes{0.0, L};
    for (double b : {R, L - R, r - R, r + R})
      nodes.push_back(std::fmod(b + 2 * L, L));
    std::sort(nodes.begin(), nodes.end());
    double I3 = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
      if (nodes[i + 1] > nodes[i])
        I3 += boost::math::quadrature::gauss<double, 10>::integrate(
            [&](double x) { return std::exp(-phi(x) - phi(x - r)); }, nodes[i], nodes[i + 1]);
    return z * z * std::exp(-phi(r)) * (1.0 + z * I3) / Xi;
  };
  auto bins = RadialBins::uniform(1.0, 4);
  std::vector<double> oracle;
  for (std::size_t b = 0; b < 4; ++b) {
    double lo = bins.edges[b], hi = bins.edges[b + 1];
    std::vector<double> nodes{lo, hi};
    for (double k : {R, 2 * R, L - 2 * R})
      if (k > lo && k < hi) nodes.push_back(k);
    std::sort(nodes.begin(), nodes.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
      s += boost::math::quadrature::gauss<double, 10>::integrate(rho2, nodes[i], nodes[i + 1]);
    oracle.push_back(s / (hi - lo));
  }
  SamplerSettings st;
  st.n_samples = 200000;
  st.thin = 5;
  st.burn_in = 1000;
  st.seed = 31;
  st.options.max_particles = 3;
  auto set = sample_gibbs(m, st);
  auto pc = estimate_k2(set.configs, m.domain, bins);
  for (std::size_t b = 0; b < 4; ++b) {
    ASSERT_TRUE(pc.k2[b].has_value());
    EXPECT_LT(std::abs(pc.k2[b]->value - oracle[b]), 3.5 * pc.k2[b]->std_error)
        << "bin " << b << " oracle " << oracle[b];
  }
  // Repulsion: the first bin lies inside the well, so u2 < 0 there.
  auto u2 = estimate_ursell2(set.configs, m.domain, bins);
  EXPECT_LT(u2[0]->value + 3 * u2[0]->std_error, 0.0);
}

TEST(EstimateUrsell, IdealGasZero) {
  ModelSpec m = make_model(10.0, 0.3, PairPotential::zero());
  auto s = quick_samples(m, 20000, 15);
  auto u2 = estimate_ursell2(s.configs, m.domain, RadialBins::uniform(5.0, 5));
  int off = 0;
  for (const auto &u : u2)
    if (std::abs(u->value) > 3 * u->std_error) ++off;
  EXPECT_LE(off, 1);
}

TEST(Gnz, IdealGasIdentity) {
  ModelSpec m = make_model(10.0, 0.3, PairPotential::zero());
  auto s = quick_samples(m, 20000, 16);
  GnzFunctional F;
  F.f = TestFunction::bump({3.0, 0, 0}, 1.0, 1.0);
  F.psi = TestFunction::step({3.5, 0, 0}, 1.0, 0.0);
  auto r = gnz_residual(s.configs, m, F);
  // z int f = 0.3 * 16/15.
  EXPECT_NEAR(r.rhs.value, 0.3 * 16.0 / 15.0, 1e-12);
  EXPECT_LT(std::abs(r.z_score), 3.0);
  EXPECT_LT(r.max_quad_error, 1e-10);
}

TEST(Gnz, SquareWellExpOuter) {
  ModelSpec m = make_model(20.0, 0.2);
  auto s = quick_samples(m, 20000, 17);
  GnzFunctional F;
  F.f = TestFunction::step({5.0, 0, 0}, 2.0, 1.0);
  F.psi = TestFunction::bump({5.5, 0, 0}, 1.5, 0.7);
  F.g = OuterKind::exp_clipped;
  auto r = gnz_residual(s.configs, m, F);
  EXPECT_LT(std::abs(r.z_score), 3.0);
  // F = f alone: lhs / int f estimates k1, rhs / int f estimates z E e^{-E}.
  GnzFunctional F1;
  F1.f = TestFunction::step({5.0, 0, 0}, 2.0, 1.0);
  auto r1 = gnz_residual(s.configs, m, F1);
  auto k1 = estimate_k1(s.configs, m.domain);
  EXPECT_LT(std::abs(r1.rhs.value / 4.0 - k1.value), 3.0 * std::hypot(r1.rhs.std_error / 4.0, k1.std_error));
}

TEST(Gnz, RejectsDegenerateFunctional) {
  ModelSpec m = make_model(10.0, 0.2);
  auto s = quick_samples(m, 200, 1, 100);
  GnzFunctional F;
  F.f = TestFunction::bump({3.0, 0, 0}, 1.0, 0.0);
  EXPECT_THROW(gnz_residual(s.configs, m, F), std::invalid_argument);
  F.f = TestFunction::bump({3.0, 0, 0}, 1.0, 1.0);
  F.poly = {0, 0, 0, 0};
  EXPECT_THROW(gnz_residual(s.configs, m, F), std::invalid_argument);
}

TEST(DoubleGnz, IdealGasMomentIdentity) {
  ModelSpec m = make_model(10.0, 0.3, PairPotential::zero());
  auto s = quick_samples(m, 5000, 18);
  GnzFunctional F;
  F.f = TestFunction::step({3.0, 0, 0}, 1.0, 1.0);
  auto r = double_gnz_residual(s.configs, m, F);
  EXPECT_NEAR(r.rhs.value, 0.09 * 4.0 + 0.3 * 2.0, 1e-10);
  EXPECT_LT(std::abs(r.z_score), 3.0);
}

TEST(DoubleGnz, IdealGasFactorisesForDisjointSupports) {
  ModelSpec m = make_model(10.0, 0.3, PairPotential::zero());
  auto s = quick_samples(m, 5000, 19);
  GnzFunctional F;
  F.f = TestFunction::step({2.0, 0, 0}, 1.0, 1.0);
  F.psi = TestFunction::step({7.0, 0, 0}, 1.0, 0.5);
  F.g = OuterKind::exp_clipped;
  auto r = double_gnz_residual(s.configs, m, F);
  // E[<f>^2] E[e^{<psi>}] with Poisson closed forms.
  double expect = (0.09 * 4.0 + 0.3 * 2.0) * std::exp(0.3 * 2.0 * std::expm1(0.5));
  EXPECT_NEAR(r.rhs.value, expect, 0.03 * expect);
  EXPECT_LT(std::abs(r.z_score), 3.0);
}

TEST(DoubleGnz, SquareWell) {
  ModelSpec m = make_model(20.0, 0.2);
  auto s = quick_samples(m, 3000, 20);
  GnzFunctional F;
  F.f = TestFunction::bump({5.0, 0, 0}, 1.5, 1.0);
  F.psi = TestFunction::step({5.0, 0, 0}, 2.0, 0.3);
  F.g = OuterKind::exp_clipped;
  auto r = double_gnz_residual(s.configs, m, F);
  EXPECT_LT(std::abs(r.z_score), 3.0);
  EXPECT_LT(r.max_quad_error, 1e-6);
}

TEST(ExpMoment, PoissonClosedForm) {
  ModelSpec m = make_model(10.0, 0.2, PairPotential::zero());
  auto s = quick_samples(m, 20000, 21);
  auto f = TestFunction::step({0.5, 0, 0}, 0.5, std::log(2.0));
  auto r = exp_moment(s.configs, m, f, 0.2, RadialBins::uniform(5.0, 20));
  ASSERT_TRUE(r.poisson_closed_form.has_value());
  EXPECT_NEAR(*r.poisson_closed_form, std::exp(0.2), 1e-12);
  EXPECT_LT(std::abs(r.mc.value - std::exp(0.2)), 3 * r.mc.std_error);
  auto zero = exp_moment(s.configs, m, TestFunction::step({0.5, 0, 0}, 0.5, 0.0), 0.2,
                         RadialBins::uniform(5.0, 20));
  EXPECT_EQ(zero.mc.value, 1.0);
  EXPECT_EQ(zero.mc.std_error, 0.0);
}

TEST(ExpMoment, SquareWellSeriesConsistent) {
  ModelSpec m = make_model(20.0, 0.2);
  auto s = quick_samples(m, 20000, 22);
  auto bins = RadialBins::uniform(10.0, 80);
  auto rb = ruelle_probe(s.configs, m, bins);
  auto f = TestFunction::step({5.0, 0, 0}, 0.5, 0.3);
  auto r = exp_moment(s.configs, m, f, rb.xi_hat, bins);
  ASSERT_TRUE(r.series.has_value());
  EXPECT_TRUE(r.series->consistent) << "mc " << r.mc.value << " series " << r.series->series.value;
}

TEST(Ruelle, IdealGasAndPositivePotential) {
  ModelSpec m0 = make_model(10.0, 0.2, PairPotential::zero());
  auto s0 = quick_samples(m0, 20000, 23);
  auto r0 = ruelle_probe(s0.configs, m0, RadialBins::uniform(5.0, 5));
  EXPECT_NEAR(r0.xi_hat, 0.2, 0.03);
  EXPECT_TRUE(r0.violations.empty());
  ModelSpec m = make_model(20.0, 0.2);
  auto s = quick_samples(m, 20000, 24);
  auto k1 = estimate_k1(s.configs, m.domain);
  auto r = ruelle_probe(s.configs, m, RadialBins::uniform(10.0, 10));
  EXPECT_LE(r.xi_hat, 0.2 + 3 * k1.std_error + 0.02);
  EXPECT_TRUE(r.violations.empty());
}

TEST(AlphaConsistency, IdealGasBoltzmannFactorIsOne) {
  ModelSpec m = make_model(10.0, 0.2, PairPotential::zero());
  m.kernel = JumpKernel::uniform_ball(1, 0.5, 2.0);
  auto s = quick_samples(m, 4000, 5);
  auto a = alpha_consistency(s.configs, m);
  EXPECT_DOUBLE_EQ(a.alpha_gnz.value, 2.0);
  EXPECT_LT(std::abs(a.alpha_k1.value - 2.0), 3.0 * a.alpha_k1.std_error);
  EXPECT_LT(std::abs(a.z_score), 3.0);
}

TEST(AlphaConsistency, SquareWellRoutesAgree) {
  ModelSpec m = make_model(20.0, 0.2, PairPotential::square_well(1.0, 0.5));
  auto s = quick_samples(m, 6000, 8);
  auto a = alpha_consistency(s.configs, m);
  EXPECT_LT(a.alpha_k1.value, 1.0);
  EXPECT_LT(std::abs(a.z_score), 3.0) << a.alpha_k1.value << " vs " << a.alpha_gnz.value;
}

TEST(Records, RoundTrip) {
  RecordHeader h{"0123456789abcdef", 99, TorusDomain(2, 3.5)};
  std::vector<Record> recs{{0.0, {}}, {1.5, {{0.123456789, 1.0, 0}, {2.0, 3.25, 0}}}};
  std::stringstream ss;
  write_records(ss, h, recs);
  auto back = read_records(ss);
  EXPECT_EQ(back.header.model_hash, h.model_hash);
  EXPECT_EQ(back.header.seed, 99u);
  EXPECT_EQ(back.header.domain.dim(), 2);
  ASSERT_EQ(back.records.size(), 2u);
  EXPECT_EQ(back.records[1].points.size(), 2u);
  EXPECT_DOUBLE_EQ(back.records[1].points[0][0], 0.123456789);
  EXPECT_DOUBLE_EQ(back.records[1].stamp, 1.5);
  std::stringstream bad("# kgl-samples v1\n# seed=1 dim=1 L=1\n0 2 0.5\n");
  EXPECT_THROW(read_records(bad), std::runtime_error);
}
