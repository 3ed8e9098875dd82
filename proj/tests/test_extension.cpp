#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <fchoq/extension.hpp>

#include "oracles.hpp"

using namespace fchoq;

namespace {
const Grid kGrid(3, 16, 8.0);

Field mode(const Grid& g, int m0, int m1) {
  return Field::sample(g, [&](const auto& x) { return std::cos(g.dxi() * (m0 * x[0] + m1 * x[1])); });
}

// Perturbation supported in y in (y_a, y_b), smooth in x.
ExtensionField perturb(const ExtensionField& U, std::mt19937& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double ya = U.ygrid.Ymax * (0.001 + 0.02 * u01(rng));
  const double yb = ya * (2.0 + 3.0 * u01(rng));
  const Field shape = oracle::smooth_random(U.grid, rng);
  const double amp = 0.2 * (0.5 + u01(rng)) * U.trace().max_abs() / shape.max_abs();
  ExtensionField V = U;
  for (std::size_t j = 1; j < V.slices.size(); ++j) {
    const double y = V.y(j);
    if (y <= ya || y >= yb) continue;
    const double t = (y - ya) / (yb - ya);
    V.slices[j] += (amp * std::pow(std::sin(3.14159265358979 * t), 2)) * shape;
  }
  return V;
}
} // namespace

TEST(Psi, ClosedFormProperties) {
  for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    EXPECT_EQ(psi_profile(s, 0.0), 1.0);
    EXPECT_NEAR(psi_profile(s, 1e-10), 1.0, 1e-14 + 2.0 * std::pow(1e-10, 2.0 * s)); // 1 - O(y^{2s})
  }
  for (double y : {0.01, 0.5, 1.0, 7.0, 30.0}) EXPECT_NEAR(psi_profile(0.5, y), std::exp(-y), 1e-14 + 1e-13 * std::exp(-y));
  for (double s : {0.25, 0.5, 0.75}) {
    double prev = 1.0;
    for (double y = 0.01; y < 40.0; y *= 1.1) {
      const double v = psi_profile(s, y);
      EXPECT_LT(v, prev);
      prev = v;
    }
  }
  EXPECT_THROW(psi_profile(0.0, 1.0), std::domain_error);
  EXPECT_THROW(psi_profile(1.0, 1.0), std::domain_error);
  EXPECT_THROW(psi_profile(0.5, -1.0), std::domain_error);
}

TEST(Psi, MatchesOdeSolution) {
  std::vector<double> ys;
  for (int i = 1; i <= 2000; ++i) ys.push_back(50.0 * i / 2000.0);
  for (int i = 0; i < 40; ++i) ys.push_back(std::pow(10.0, -6.0 + 0.15 * i));
  for (double s : {0.25, 0.5, 0.75}) {
    const auto ref = oracle::psi_ode(s, ys);
    double err = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) err = std::max(err, std::abs(ref[i] - psi_profile(s, ys[i])));
    EXPECT_LT(err, 1e-8) << s;
  }
}

TEST(YGrid, Nodes) {
  const YGrid y(64, 10.0);
  EXPECT_EQ(y.nodes.size(), 64u);
  EXPECT_DOUBLE_EQ(y.nodes.back(), 10.0);
  EXPECT_GT(y.nodes.front(), 0.0);
  for (std::size_t j = 1; j < y.nodes.size(); ++j) EXPECT_GT(y.nodes[j], y.nodes[j - 1]);
  EXPECT_THROW(YGrid(32, 10.0), std::invalid_argument);
  EXPECT_LT(psi_profile(0.25, kGrid.dxi() * default_ygrid(kGrid).Ymax), 1e-8);
}

TEST(HarmonicExtend, SingleModeAndConstant) {
  const auto yg = default_ygrid(kGrid, 64);
  const Field u = mode(kGrid, 2, 1);
  const double k = kGrid.dxi() * std::sqrt(5.0);
  for (double s : {0.25, 0.5}) {
    const auto U = harmonic_extend(u, s, yg);
    EXPECT_EQ(U.trace().values, u.values);
    for (std::size_t j : {1u, 10u, 40u}) {
      const double f = psi_profile(s, k * U.y(j));
      for (std::size_t i = 0; i < u.size(); i += 97) EXPECT_NEAR(U.slices[j].values[i], f * u.values[i], 1e-13);
    }
  }
  const auto C = harmonic_extend(Field(kGrid, 2.5), 0.3, yg);
  for (const auto& sl : C.slices)
    for (double v : sl.values) EXPECT_NEAR(v, 2.5, 1e-13);
  EXPECT_NEAR(extension_energy(C, 0.3), 0.0, 1e-20);
  EXPECT_EQ(extension_energy(harmonic_extend(Field(kGrid), 0.3, yg), 0.3), 0.0);
}

TEST(EnergyIdentity, HalfLaplacianSingleMode) {
  const auto r = energy_identity_check(mode(kGrid, 1, 0), 0.5, default_ygrid(kGrid));
  EXPECT_NEAR(r.ratio, 1.0, 0.01);
}

TEST(EnergyIdentity, RandomSmoothFields) {
  std::mt19937 rng(21);
  const auto yg = default_ygrid(kGrid);
  for (double s : {0.25, 0.5, 0.75}) {
    const Field u = oracle::smooth_random(kGrid, rng);
    const auto r = energy_identity_check(u, s, yg);
    EXPECT_NEAR(r.ratio, 1.0, 0.02) << s;
    const auto r2 = energy_identity_check(2.0 * u, s, yg);
    EXPECT_NEAR(r2.ratio, r.ratio, 1e-10);
  }
  EXPECT_THROW(energy_identity_check(Field(kGrid), 0.5, yg), std::invalid_argument);
}

TEST(EnergyIdentity, ConvergesInJ) {
  std::mt19937 rng(2);
  const Field u = oracle::smooth_random(kGrid, rng);
  for (double s : {0.25, 0.75}) {
    double prev = INFINITY;
    for (int J : {64, 128, 256}) {
      const double err = std::abs(energy_identity_check(u, s, default_ygrid(kGrid, J)).ratio - 1.0);
      EXPECT_LT(err, prev / 2.0) << s << " J=" << J; // at least first order
      prev = err;
    }
  }
}

TEST(TraceInequality, HarmonicPerturbedAndZero) {
  std::mt19937 rng(8);
  const auto yg = default_ygrid(kGrid, 128);
  for (double s : {0.25, 0.5, 0.75}) {
    const Field u = oracle::smooth_random(kGrid, rng);
    const auto U = harmonic_extend(u, s, yg);
    const auto h = trace_inequality_check(U, s);
    EXPECT_TRUE(h.satisfied);
    EXPECT_NEAR(h.lhs / h.rhs, 1.0, 0.02);
    const double e0 = extension_energy(U, s);
    for (int t = 0; t < 5; ++t) {
      const auto V = perturb(U, rng);
      const auto c = trace_inequality_check(V, s);
      EXPECT_TRUE(c.satisfied);
      EXPECT_EQ(c.lhs, h.lhs); // trace untouched
      EXPECT_GT(extension_energy(V, s), e0);
    }
  }
  const auto Z = trace_inequality_check(harmonic_extend(Field(kGrid), 0.5, yg), 0.5);
  EXPECT_EQ(Z.lhs, 0.0);
  EXPECT_EQ(Z.rhs, 0.0);
  EXPECT_TRUE(Z.satisfied);
}

TEST(ExtendSymmetry, Examples) {
  const Grid g(3, 12, 6.0);
  std::mt19937 rng(4);
  std::normal_distribution<double> n;
  Field r(g);
  for (auto& v : r.values) v = n(rng);
  const Field odd = symmetrize(r, named_group("A1"));
  EXPECT_TRUE(extend_symmetry_check(odd, named_group("A1"), 0.4));
  const Field b2 = symmetrize(r, named_group("B2"));
  EXPECT_TRUE(extend_symmetry_check(b2, named_group("B2"), 0.7));
  EXPECT_FALSE(extend_symmetry_check(r, named_group("A1"), 0.4));
}
