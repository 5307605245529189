#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "fbmg/tv_ops.hpp"
#include "testkit.hpp"

using namespace fbmg;
namespace tk = fbmg::testkit;

TEST_CASE("gradient of a constant vanishes") {
  const DualField g = gradient(ImageField(GridShape{5, 4}, 3.0));
  for (Vec2 v : g.values) CHECK(v == Vec2{0, 0});
}

TEST_CASE("gradient of the row index") {
  const GridShape s{5, 4};
  ImageField y(s);
  for (int r = 0; r < s.rows; ++r)
    for (int c = 0; c < s.cols; ++c) y(r, c) = r;
  const DualField g = gradient(y);
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      CHECK(g(r, c).x == (r + 1 < s.rows ? 1.0 : 0.0));
      CHECK(g(r, c).y == 0.0);
    }
  }
}

TEST_CASE("dense oracle agreement on 6x6 and 4x4") {
  for (GridShape s : {GridShape{6, 6}, GridShape{4, 4}, GridShape{3, 5}}) {
    const tk::Matrix D = tk::dense_gradient(s);
    const int n = static_cast<int>(s.size());
    const tk::Matrix Gop = tk::dense_matrix_of(
        [&](const tk::Vector& v) { return tk::to_vector(gradient(tk::image_from(s, v))); }, n, 2 * n);
    CHECK((D - Gop).cwiseAbs().maxCoeff() == 0.0);
    const tk::Matrix Aop = tk::dense_matrix_of(
        [&](const tk::Vector& v) { return tk::to_vector(divergence_adjoint(tk::dual_from(s, v))); }, 2 * n, n);
    CHECK((D.transpose() - Aop).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("adjointness on random pairs") {
  std::mt19937_64 rng(8);
  for (GridShape s : {GridShape{4, 4}, GridShape{8, 8}, GridShape{17, 13}}) {
    for (int k = 0; k < 100; ++k) {
      const ImageField y(s, tk::uniform(rng, s.size(), -1, 1));
      const DualField x = tk::dual_from(s, Eigen::Map<const tk::Vector>(tk::uniform(rng, 2 * s.size(), -1, 1).data(),
                                                                        static_cast<Eigen::Index>(2 * s.size())));
      const double lhs = inner(gradient(y), x);
      const double rhs = inner(y, divergence_adjoint(x));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::sqrt(squared_norm(y) * squared_norm(x)));
    }
  }
  CHECK(squared_norm(divergence_adjoint(DualField(GridShape{3, 3}))) == 0.0);
}

TEST_CASE("operator norm bound 8") {
  // Power iteration on grad^* grad.
  std::mt19937_64 rng(4);
  for (int n : {4, 8, 16, 32, 64}) {
    const GridShape s{n, n};
    ImageField y(s, tk::uniform(rng, s.size(), -1, 1));
    double lambda = 0.0;
    for (int it = 0; it < 3000; ++it) {
      ImageField z = divergence_adjoint(gradient(y));
      lambda = std::sqrt(squared_norm(z) / squared_norm(y));
      const double scale = 1.0 / std::sqrt(squared_norm(z));
      for (double& v : z.values) v *= scale;
      y = std::move(z);
    }
    CHECK(lambda <= kGradientNormBound + 1e-6);
    // Largest eigenvalue of the Neumann Laplacian on an n x n grid.
    CHECK(lambda == doctest::Approx(4.0 + 4.0 * std::cos(std::numbers::pi / n)).epsilon(1e-3));
  }
}

TEST_CASE("tv_norm") {
  DualField x(GridShape{2, 2});
  CHECK(tv_norm(x) == 0.0);
  x.values[1] = {3, 4};
  CHECK(tv_norm(x) == 5.0);
  std::mt19937_64 rng(1);
  const GridShape s{7, 6};
  const std::vector<double> v = tk::uniform(rng, 2 * s.size(), -2, 2);
  DualField r(s);
  double expect = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    r.values[i] = {v[2 * i], v[2 * i + 1]};
    expect += std::sqrt(v[2 * i] * v[2 * i] + v[2 * i + 1] * v[2 * i + 1]);
  }
  CHECK(tv_norm(r) == doctest::Approx(expect).epsilon(1e-14));
}
