#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "kgl/configuration.hpp"
#include "kgl/geometry.hpp"
#include "kgl/rng.hpp"

using namespace kgl;

TEST(Wrap, Examples) {
  TorusDomain d1(1, 1.0), d2(2, 1.0);
  EXPECT_DOUBLE_EQ(wrap({0.3, 0, 0}, d1)[0], 0.3);
  EXPECT_NEAR(wrap({1.3, 0, 0}, d1)[0], 0.3, 1e-15);
  auto w = wrap({-0.2, 2.5, 0}, d2);
  EXPECT_NEAR(w[0], 0.8, 1e-15);
  EXPECT_NEAR(w[1], 0.5, 1e-15);
}

TEST(Wrap, IdempotentAndInBox) {
  Rng rng(3);
  TorusDomain dom(3, 2.5);
  for (int i = 0; i < 10000; ++i) {
    Point x{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)};
    Point w = wrap(x, dom);
    for (int k = 0; k < 3; ++k) {
      EXPECT_GE(w[k], 0.0);
      EXPECT_LT(w[k], 2.5);
    }
    EXPECT_EQ(wrap(w, dom), w);
  }
}

TEST(MinImage, Examples) {
  TorusDomain d1(1, 1.0), d2(2, 1.0);
  EXPECT_NEAR(min_image_disp({0.1, 0, 0}, {0.9, 0, 0}, d1)[0], 0.2, 1e-15);
  Point x{0.4, 0.7, 0};
  auto zero = min_image_disp(x, x, d2);
  EXPECT_EQ(zero[0], 0.0);
  EXPECT_EQ(zero[1], 0.0);
  auto v = min_image_disp({0.75, 0.0, 0}, {0.0, 0.75, 0}, d2);
  EXPECT_NEAR(v[0], -0.25, 1e-15);
  EXPECT_NEAR(v[1], 0.25, 1e-15);
  EXPECT_NEAR(torus_distance({0.75, 0.0, 0}, {0.0, 0.75, 0}, d2), std::sqrt(0.125), 1e-15);
}

TEST(MinImage, HalfOpenAndAntisymmetric) {
  TorusDomain dom(2, 3.0);
  auto tie = min_image_disp({1.5, 0, 0}, {0.0, 0, 0}, dom);
  EXPECT_DOUBLE_EQ(tie[0], -1.5);
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    Point x{rng.uniform(0, 3), rng.uniform(0, 3), 0}, y{rng.uniform(0, 3), rng.uniform(0, 3), 0};
    auto a = min_image_disp(x, y, dom), b = min_image_disp(y, x, dom);
    for (int k = 0; k < 2; ++k) {
      EXPECT_GE(a[k], -1.5);
      EXPECT_LT(a[k], 1.5);
      if (std::abs(a[k]) < 1.5 - 1e-12) EXPECT_NEAR(a[k], -b[k], 1e-12);
    }
    EXPECT_NEAR(norm(a, 2), norm(b, 2), 1e-12);
  }
}

namespace {

std::vector<std::size_t> brute(const PointSet &pts, const Point &x, double r, const TorusDomain &dom) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (torus_distance(x, pts[i], dom) <= r) out.push_back(i);
  return out;
}

} // namespace

TEST(CellList, EmptyAndSingle) {
  TorusDomain dom(1, 1.0);
  Configuration g(dom, 0.1);
  EXPECT_TRUE(g.cells().neighbors(g.points(), {0.5, 0, 0}, 0.1).empty());
  g.add({0.5 + 0.1 - 1e-9, 0, 0});
  auto nb = g.cells().neighbors(g.points(), {0.5, 0, 0}, 0.1);
  ASSERT_EQ(nb.size(), 1u);
  EXPECT_EQ(nb[0], 0u);
}

TEST(CellList, HundredPointsMatchesBruteForce) {
  TorusDomain dom(1, 1.0);
  Rng rng(11);
  PointSet pts;
  for (int i = 0; i < 100; ++i)
    pts.push_back({rng.uniform(), 0, 0});
  Configuration g(dom, 0.1, pts);
  for (int q = 0; q < 200; ++q) {
    Point x{rng.uniform(), 0, 0};
    auto nb = g.cells().neighbors(g.points(), x, 0.1);
    std::sort(nb.begin(), nb.end());
    EXPECT_EQ(nb, brute(g.points(), x, 0.1, dom));
  }
}

TEST(CellList, PropertyRandomConfigurationsAndEdits) {
  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    int dim = 1 + static_cast<int>(rng.index(3));
    double L = rng.uniform(1.0, 10.0);
    double R = rng.uniform(0.01, 0.49) * L;
    TorusDomain dom(dim, L);
    Configuration g(dom, R);
    auto rand_point = [&] {
      Point p{0, 0, 0};
      for (int k = 0; k < dim; ++k)
        p[k] = rng.uniform(0, L);
      return p;
    };
    std::size_t n = rng.index(60);
    for (std::size_t i = 0; i < n; ++i)
      g.add(rand_point());
    for (int e = 0; e < 20 && !g.empty(); ++e) {
      std::size_t id = rng.index(g.size());
      if (rng.uniform() < 0.5) g.remove(id);
      else g.move(id, rand_point());
    }
    ASSERT_TRUE(g.cells().consistent_with(g.points()));
    for (int q = 0; q < 5; ++q) {
      Point x = rand_point();
      auto nb = g.cells().neighbors(g.points(), x, R);
      std::sort(nb.begin(), nb.end());
      ASSERT_EQ(nb, brute(g.points(), x, R, dom)) << "trial " << trial;
    }
  }
}

TEST(Torus, Volume) {
  EXPECT_DOUBLE_EQ(TorusDomain(3, 2.0).volume(), 8.0);
  EXPECT_THROW(TorusDomain(4, 1.0), std::invalid_argument);
  EXPECT_THROW(TorusDomain(1, -1.0), std::invalid_argument);
}
