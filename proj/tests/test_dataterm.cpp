#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fbmg/bench.hpp"
#include "fbmg/dataterm.hpp"
#include "fbmg/transfer.hpp"
#include "fbmg/tv_ops.hpp"
#include "testkit.hpp"

using namespace fbmg;
namespace tk = fbmg::testkit;

namespace {

SamplingMasks random_mri(const GridShape& s, int t, int lines, std::mt19937_64& rng) {
  const LineMasks lm = random_line_masks(s, t, lines, rng());
  const ImageField y(s, tk::uniform(rng, s.size(), 0, 1));
  return add_complex_noise(acquire(y, lm.lines), 0.1, rng());
}

tk::Matrix dense_of_T(const DataTerm& dt) {
  const GridShape s = dt.shape();
  return tk::dense_matrix_of([&](const tk::Vector& v) { return tk::to_vector(dt.apply_T(tk::image_from(s, v))); },
                             static_cast<int>(s.size()), static_cast<int>(s.size()));
}

double max_abs_diff(const ImageField& a, const tk::Vector& b) { return (tk::to_vector(a) - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("denoising data term is the identity with e = b") {
  std::mt19937_64 rng(1);
  const GridShape s{5, 6};
  const ImageField b(s, tk::uniform(rng, s.size(), 0, 1));
  const DataTerm dt = DataTerm::denoising(b);
  CHECK(dt.is_identity());
  CHECK(dt.e().values == b.values);
  const ImageField z(s, tk::uniform(rng, s.size(), -1, 1));
  CHECK(dt.apply_T_inv(z).values == z.values);
  CHECK(dt.apply_T_inv_sqrt(z).values == z.values);
  CHECK(dt.lipschitz() == 8.0);
}

TEST_CASE("full sampling in one mask gives unit weights") {
  const GridShape s{6, 5};
  std::vector<int> all{0, 1, 2, 3, 4, 5};
  std::mt19937_64 rng(2);
  const ImageField y(s, tk::uniform(rng, s.size(), 0, 1));
  const DataTerm dt = DataTerm::mri(acquire(y, {all}));
  for (double w : dt.fourier_weights()) CHECK(w == 1.0);
  // Without noise, e recovers the image.
  CHECK(max_abs_diff(dt.e(), tk::to_vector(y)) < 1e-12);
}

TEST_CASE("MRI T and e match the dense DFT oracle") {
  std::mt19937_64 rng(3);
  for (GridShape s : {GridShape{8, 8}, GridShape{7, 6}}) {
    const SamplingMasks masks = random_mri(s, 2, 5, rng);
    const tk::DenseProblem dense = tk::dense_mri(s, masks.lines, masks.data);
    const DataTerm dt = DataTerm::mri(masks);
    CHECK((dense_of_T(dt) - dense.T).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(max_abs_diff(dt.e(), dense.e) < 1e-12);
    const ImageField z(s, tk::uniform(rng, s.size(), -1, 1));
    const tk::Vector solved = dense.T.ldlt().solve(tk::to_vector(z));
    CHECK(max_abs_diff(dt.apply_T_inv(z), solved) < 1e-10);
    // T^{-1/2} applied twice is T^{-1}.
    CHECK(max_abs_diff(dt.apply_T_inv_sqrt(dt.apply_T_inv_sqrt(z)), solved) < 1e-10);
  }
}

TEST_CASE("T inverse round trip and positive definiteness") {
  std::mt19937_64 rng(4);
  const GridShape s{16, 12};
  const DataTerm dt = DataTerm::mri(random_mri(s, 5, 6, rng));
  for (int k = 0; k < 10; ++k) {
    const ImageField z(s, tk::uniform(rng, s.size(), -1, 1));
    const ImageField back = dt.apply_T_inv(dt.apply_T(z));
    CHECK(std::sqrt(squared_norm(axpy(back, -1.0, z))) <= 1e-10 * std::sqrt(squared_norm(z)));
    CHECK(inner(dt.apply_T(z), z) > 0.0);
  }
  double max_inv = 0.0;
  for (double w : dt.fourier_weights()) max_inv = std::max(max_inv, 1.0 / w);
  CHECK(dt.lipschitz() == doctest::Approx(8.0 * max_inv));
}

TEST_CASE("symmetrise_mask") {
  const GridShape s{4, 5};
  std::vector<double> delta(s.size(), 0.0);
  delta[s.index(1, 2)] = 1.0;
  const std::vector<double> d = symmetrise_mask(s, delta);
  CHECK(d[s.index(1, 2)] == 0.5);
  CHECK(d[s.index(3, 3)] == 0.5);
  double total = 0.0;
  for (double v : d) total += v;
  CHECK(total == 1.0);

  std::mt19937_64 rng(5);
  const std::vector<double> counts = tk::uniform(rng, s.size(), 0, 3);
  const std::vector<double> sym = symmetrise_mask(s, counts);
  for (int r = 0; r < s.rows; ++r)
    for (int c = 0; c < s.cols; ++c)
      CHECK(sym[s.index(r, c)] == sym[s.index((s.rows - r) % s.rows, (s.cols - c) % s.cols)]);
  CHECK(symmetrise_mask(s, sym) == sym);
}

TEST_CASE("uncovered frequency is reported") {
  const GridShape s{6, 4};
  const ImageField y(s, 1.0);
  try {
    (void)DataTerm::mri(acquire(y, {{0, 1, 5}}));
    FAIL("expected SingularDataTerm");
  } catch (const SingularDataTerm& e) {
    CHECK(e.frequency() == s.index(2, 0));
  }
}

TEST_CASE("non-finite input is rejected") {
  const DataTerm dt = DataTerm::fourier_diagonal(GridShape{4, 4}, std::vector<double>(16, 2.0), ImageField(GridShape{4, 4}));
  ImageField z(GridShape{4, 4});
  z.values[3] = std::nan("");
  CHECK_THROWS_AS(dt.apply_T_inv(z), std::invalid_argument);
}

TEST_CASE("smooth dual gradient") {
  std::mt19937_64 rng(6);
  const GridShape s{6, 7};
  const ImageField b(s, tk::uniform(rng, s.size(), 0, 1));
  const DataTerm den = DataTerm::denoising(b);
  const DualField g0 = smooth_dual_gradient(DualField(s), den);
  const DualField gb = gradient(b);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(g0.values[i] == -gb.values[i]);

  const DataTerm mri = DataTerm::mri(random_mri(s, 3, 3, rng));
  for (const DataTerm* dt : {&den, &mri}) {
    for (int k = 0; k < 20; ++k) {
      const tk::Vector x = tk::to_vector(tk::random_feasible(s, 1.0, 0.3, rng));
      const tk::Vector fd = tk::fd_gradient(
          [&](const tk::Vector& v) { return smooth_dual_value(tk::dual_from(s, v), *dt); }, x, 1e-5);
      const tk::Vector an = tk::to_vector(smooth_dual_gradient(tk::dual_from(s, x), *dt));
      CHECK((fd - an).norm() <= 1e-6 * an.norm());
    }
  }
}

TEST_CASE("gradient vanishes when grad^* x = e") {
  std::mt19937_64 rng(7);
  const GridShape s{5, 5};
  const DualField x = tk::random_feasible(s, 1.0, 0.0, rng);
  std::vector<double> w = tk::uniform(rng, s.size(), 1.0, 2.0);
  w = symmetrise_mask(s, w);
  const DataTerm dt = DataTerm::fourier_diagonal(s, w, divergence_adjoint(x));
  const DualField g = smooth_dual_gradient(x, dt);
  CHECK(std::sqrt(squared_norm(g)) < 1e-13);
  CHECK(smooth_dual_value(x, dt) < 1e-26);
}

TEST_CASE("evaluate_smooth agrees with the separate functions") {
  std::mt19937_64 rng(8);
  const GridShape s{8, 6};
  const DataTerm dt = DataTerm::mri(random_mri(s, 3, 3, rng));
  const DualField x = tk::random_feasible(s, 0.5, 0.3, rng);
  const SmoothEval ev = evaluate_smooth(x, dt);
  CHECK(ev.value == doctest::Approx(smooth_dual_value(x, dt)).epsilon(1e-12));
  CHECK(std::sqrt(squared_norm(axpy(ev.gradient, -1.0, smooth_dual_gradient(x, dt)))) < 1e-12);
  CHECK(std::sqrt(squared_norm(axpy(ev.primal, -1.0, primal_recover(x, dt)))) < 1e-12);
}

TEST_CASE("primal_recover") {
  std::mt19937_64 rng(9);
  const GridShape s{5, 4};
  const ImageField b(s, tk::uniform(rng, s.size(), 0, 1));
  CHECK(primal_recover(DualField(s), DataTerm::denoising(b)).values == b.values);

  const DataTerm dt = DataTerm::mri(random_mri(s, 3, 2, rng));
  const DualField x1 = tk::random_feasible(s, 1.0, 0.5, rng);
  const DualField x2 = tk::random_feasible(s, 1.0, 0.5, rng);
  ImageField combo = axpy(primal_recover(axpy(x1, 1.0, x2), dt), -1.0, primal_recover(x1, dt));
  combo = axpy(combo, -1.0, primal_recover(x2, dt));
  combo = axpy(combo, 1.0, primal_recover(DualField(s), dt));
  CHECK(std::sqrt(squared_norm(combo)) < 1e-12);
}

TEST_CASE("phi conjugate: quadratic part") {
  std::mt19937_64 rng(10);
  const GridShape s{6, 6};
  const DataTerm dt = DataTerm::mri(random_mri(s, 2, 3, rng));
  ImageField minus_e = dt.e();
  for (double& v : minus_e.values) v = -v;
  CHECK(phi_conjugate_value(minus_e, dt, false) == 0.0);
}

TEST_CASE("phi conjugate with constants, denoising closed form") {
  std::mt19937_64 rng(11);
  const GridShape s{5, 5};
  const ImageField b(s, tk::uniform(rng, s.size(), 0, 1));
  const DataTerm dt = DataTerm::denoising(b);
  const ImageField z(s, tk::uniform(rng, s.size(), -1, 1));
  const double expect = 0.5 * squared_norm(z) + inner(z, b);
  CHECK(phi_conjugate_value(z, dt, true) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("phi conjugate with constants, MRI by dense stationarity") {
  std::mt19937_64 rng(12);
  const GridShape s{6, 6};
  const SamplingMasks masks = random_mri(s, 3, 3, rng);
  const DataTerm dt = DataTerm::mri(masks);
  const tk::DenseProblem dense = tk::dense_mri(s, masks.lines, masks.data);
  const tk::CMatrix F = tk::dense_dft(s);
  for (int k = 0; k < 5; ++k) {
    const ImageField z(s, tk::uniform(rng, s.size(), -1, 1));
    const tk::Vector y = dense.T.ldlt().solve(tk::to_vector(z) + dense.e);
    const Eigen::VectorXcd fy = F * y.cast<std::complex<double>>();
    double phi = 0.0;
    for (std::size_t m = 0; m < masks.count(); ++m) {
      for (int r : masks.lines[m])
        for (int c = 0; c < s.cols; ++c) {
          const std::size_t i = s.index(r, c);
          phi += 0.5 * std::norm(fy[static_cast<Eigen::Index>(i)] - masks.data[m][i]);
        }
    }
    const double sup = tk::to_vector(z).dot(y) - phi;
    CHECK(phi_conjugate_value(z, dt, true) == doctest::Approx(sup).epsilon(1e-10));
  }
}

TEST_CASE("real part of a complex quadratic form") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int n : {3, 17, 64}) {
    tk::CMatrix A(n + 5, n);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = {g(rng), g(rng)};
    tk::Vector y(n);
    for (auto& v : y) v = g(rng);
    const double lhs = (A * y.cast<std::complex<double>>()).squaredNorm();
    const double rhs = y.dot((A.adjoint() * A).real() * y);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * lhs);
  }
}

TEST_CASE("conjugate residuals are orthogonal to the data term") {
  std::mt19937_64 rng(14);
  for (int t : {2, 3}) {
    const DataTerm dt = DataTerm::mri(random_mri(GridShape{8, 8}, t, 4, rng));
    const std::vector<ComplexField> r = conjugate_residuals(dt);
    std::vector<double> sum(64, 0.0);
    double scale = 0.0;
    for (std::size_t s = 0; s < r.size(); ++s) {
      const ComplexField back = dt.apply_sample_adjoint(s, r[s]);
      for (std::size_t i = 0; i < back.size(); ++i) sum[i] += back[i].real();
      for (const Complex& v : dt.sample_data(s)) scale += std::norm(v);
    }
    for (double v : sum) CHECK(std::abs(v) <= 1e-9 * std::sqrt(scale));
  }
}

TEST_CASE("coarsening") {
  std::mt19937_64 rng(15);
  const GridShape s{8, 8};
  const GridTransfer tr(s);
  const DataTerm den = DataTerm::denoising(ImageField(s, tk::uniform(rng, s.size(), 0, 1)));
  const DataTerm cden = den.coarsen(tr);
  CHECK(cden.is_identity());
  CHECK(cden.shape() == tr.coarse());
  CHECK(cden.e().values == tr.restrict(den.e()).values);

  const DataTerm flat = DataTerm::fourier_diagonal(s, std::vector<double>(s.size(), 3.0), ImageField(s));
  for (double w : flat.coarsen(tr).fourier_weights()) CHECK(w == 3.0);

  // Coarse weights stay symmetric so T_H is real.
  const DataTerm mri = DataTerm::mri(random_mri(GridShape{10, 9}, 3, 3, rng));
  const GridTransfer tr2(mri.shape());
  const DataTerm cm = mri.coarsen(tr2);
  const GridShape cs = tr2.coarse();
  const std::vector<double>& w = cm.fourier_weights();
  for (int r = 0; r < cs.rows; ++r)
    for (int c = 0; c < cs.cols; ++c)
      CHECK(w[cs.index(r, c)] == doctest::Approx(w[cs.index((cs.rows - r) % cs.rows, (cs.cols - c) % cs.cols)]));
}
