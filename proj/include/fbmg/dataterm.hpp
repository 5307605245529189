#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fbmg/core.hpp"
#include "fbmg/fft.hpp"

namespace fbmg {

class GridTransfer;

enum class DataKind { Denoising, Mri };

/// Fourier line sampling: sample s acquires the k-space rows listed in
/// lines[s]; data[s] holds b_s on the full grid, zero off the mask.
struct SamplingMasks {
  GridShape shape;
  std::vector<std::vector<int>> lines;
  std::vector<ComplexField> data;

  std::size_t count() const { return lines.size(); }
  /// Per-frequency count of samples acquiring it (the diagonal of sum S_s^* S_s).
  std::vector<double> aggregate_counts() const;
  /// 0/1 mask of sample s over the grid.
  std::vector<double> mask(std::size_t s) const;
};

/// Raised when the symmetrised mask leaves a frequency unsampled.
class SingularDataTerm : public std::runtime_error {
 public:
  explicit SingularDataTerm(std::size_t frequency);
  std::size_t frequency() const { return frequency_; }

 private:
  std::size_t frequency_;
};

/// weight(k) = (S(k) + S(-k)) / 2 with -k taken modulo the grid in both axes.
std::vector<double> symmetrise_mask(const GridShape& shape, const std::vector<double>& counts);

/// Quadratic data term phi(y) = 1/2 sum_s |T_s y - b_s|^2 reduced to
/// grad phi(y) = T y - e. T is either the identity (denoising) or
/// F^* diag(d) F for a strictly positive, symmetric weight array d.
class DataTerm {
 public:
  /// One full sample with T_1 = I, so T = I and e = b.
  static DataTerm denoising(ImageField b);
  /// T_s = S_s F for each mask. Throws SingularDataTerm on an uncovered frequency.
  static DataTerm mri(SamplingMasks masks);
  /// T = F^* diag(weights) F with the given e; no per-sample structure.
  static DataTerm fourier_diagonal(GridShape shape, std::vector<double> weights, ImageField e);

  DataKind kind() const { return kind_; }
  const GridShape& shape() const { return e_.shape; }
  const ImageField& e() const { return e_; }
  bool is_identity() const { return weights_.empty(); }
  /// Diagonal of T in the unitary DFT basis; empty when T = I.
  const std::vector<double>& fourier_weights() const { return weights_; }

  ImageField apply_T(const ImageField& z) const;
  ImageField apply_T_inv(const ImageField& z) const;
  ImageField apply_T_inv_sqrt(const ImageField& z) const;

  /// |T^{-1}|, exact for the diagonal representation.
  double inverse_norm() const;
  /// Lipschitz constant of the smooth dual gradient: 8 |T^{-1}|.
  double lipschitz() const;

  /// Number of samples (T_s, b_s); zero for fourier_diagonal terms.
  std::size_t sample_count() const;
  ComplexField apply_sample(std::size_t s, const ImageField& y) const;
  ComplexField apply_sample_adjoint(std::size_t s, const ComplexField& c) const;
  const ComplexField& sample_data(std::size_t s) const;

  /// Coarse data term for the coarse smooth model. Identity stays identity;
  /// a Fourier-diagonal T keeps the weights of the frequencies the coarse grid
  /// can represent. e is restricted.
  DataTerm coarsen(const GridTransfer& transfer) const;

 private:
  DataTerm(DataKind kind, ImageField e, std::vector<double> weights);
  ImageField apply_fourier_multiplier(const ImageField& z, const std::vector<double>& m) const;

  DataKind kind_;
  ImageField e_;
  std::vector<double> weights_;
  std::vector<double> inv_weights_;
  std::vector<double> inv_sqrt_weights_;
  std::optional<Fft2d> fft_;
  std::shared_ptr<const SamplingMasks> masks_;
  std::vector<ComplexField> denoise_data_;
};

/// Primal image paired with a dual field: y = T^{-1}(e - grad^* x).
ImageField primal_recover(const DualField& x, const DataTerm& dt);

/// F(x) = 1/2 |T^{-1/2}(grad^* x - e)|^2.
double smooth_dual_value(const DualField& x, const DataTerm& dt);

/// grad F(x) = -grad(primal_recover(x)).
DualField smooth_dual_gradient(const DualField& x, const DataTerm& dt);

/// Value, gradient and primal image from a single application of T^{-1}.
struct SmoothEval {
  ImageField primal;
  DualField gradient;
  double value = 0.0;
};
SmoothEval evaluate_smooth(const DualField& x, const DataTerm& dt);

/// F(x) plus the ball indicators; +inf when some |x_i| > alpha (1 + boundary_tol).
/// Additive constants of the conjugate are omitted.
double dual_objective(const DualField& x, const DataTerm& dt, double alpha,
                      double boundary_tol = kDefaultBoundaryTol);

/// phi^*(z) = 1/2 |T^{-1/2}(z + e)|^2 - 1/2 sum_s |r_s|^2 - 1/2 |T^{-1/2} e|^2
/// with r_s = b_s - T_s T^{-1} e. Only the first term when include_constants
/// is false. The constants need per-sample structure.
double phi_conjugate_value(const ImageField& z, const DataTerm& dt, bool include_constants);

/// Residuals r_s = b_s - T_s T^{-1} e.
std::vector<ComplexField> conjugate_residuals(const DataTerm& dt);

}  // namespace fbmg
