#include "fbmg/dataterm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fbmg/transfer.hpp"
#include "fbmg/tv_ops.hpp"

namespace fbmg {

std::vector<double> SamplingMasks::aggregate_counts() const {
  std::vector<double> counts(shape.size(), 0.0);
  for (const auto& rows : lines) {
    for (int r : rows) {
      for (int c = 0; c < shape.cols; ++c) counts[shape.index(r, c)] += 1.0;
    }
  }
  return counts;
}

std::vector<double> SamplingMasks::mask(std::size_t s) const {
  std::vector<double> m(shape.size(), 0.0);
  for (int r : lines.at(s)) {
    for (int c = 0; c < shape.cols; ++c) m[shape.index(r, c)] = 1.0;
  }
  return m;
}

SingularDataTerm::SingularDataTerm(std::size_t frequency)
    : std::runtime_error("data term is singular: frequency " + std::to_string(frequency) + " is never sampled"),
      frequency_(frequency) {}

std::vector<double> symmetrise_mask(const GridShape& shape, const std::vector<double>& counts) {
  if (counts.size() != shape.size()) throw std::invalid_argument("symmetrise_mask: size mismatch");
  std::vector<double> out(counts.size());
  for (int r = 0; r < shape.rows; ++r) {
    const int nr = (shape.rows - r) % shape.rows;
    for (int c = 0; c < shape.cols; ++c) {
      const int nc = (shape.cols - c) % shape.cols;
      out[shape.index(r, c)] = 0.5 * (counts[shape.index(r, c)] + counts[shape.index(nr, nc)]);
    }
  }
  return out;
}

DataTerm::DataTerm(DataKind kind, ImageField e, std::vector<double> weights)
    : kind_(kind), e_(std::move(e)), weights_(std::move(weights)) {
  e_.shape.validate();
  if (!all_finite(e_)) throw std::invalid_argument("data term: e is not finite");
  if (weights_.empty()) return;
  if (weights_.size() != e_.size()) throw std::invalid_argument("data term: weight size mismatch");
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (!(weights_[k] > 0.0)) throw SingularDataTerm(k);
  }
  inv_weights_.resize(weights_.size());
  inv_sqrt_weights_.resize(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    inv_weights_[k] = 1.0 / weights_[k];
    inv_sqrt_weights_[k] = 1.0 / std::sqrt(weights_[k]);
  }
  fft_.emplace(e_.shape);
}

DataTerm DataTerm::denoising(ImageField b) {
  DataTerm dt(DataKind::Denoising, b, {});
  dt.denoise_data_.emplace_back(b.values.begin(), b.values.end());
  return dt;
}

DataTerm DataTerm::mri(SamplingMasks masks) {
  masks.shape.validate();
  if (masks.lines.size() != masks.data.size()) throw std::invalid_argument("mri: masks and data counts differ");
  const std::size_t n = masks.shape.size();
  for (const auto& rows : masks.lines) {
    for (int r : rows) {
      if (r < 0 || r >= masks.shape.rows) throw std::invalid_argument("mri: sampled line out of range");
    }
  }
  std::vector<double> weights = symmetrise_mask(masks.shape, masks.aggregate_counts());
  for (std::size_t k = 0; k < n; ++k) {
    if (!(weights[k] > 0.0)) throw SingularDataTerm(k);
  }

  Fft2d fft(masks.shape);
  ComplexField acc(n, Complex(0.0, 0.0));
  for (std::size_t s = 0; s < masks.count(); ++s) {
    if (masks.data[s].size() != n) throw std::invalid_argument("mri: sample data has wrong size");
    const std::vector<double> m = masks.mask(s);
    for (std::size_t k = 0; k < n; ++k) acc[k] += m[k] * masks.data[s][k];
  }
  const ComplexField back = fft.inverse(acc);
  ImageField e(masks.shape);
  for (std::size_t i = 0; i < n; ++i) e.values[i] = back[i].real();

  DataTerm dt(DataKind::Mri, std::move(e), std::move(weights));
  dt.masks_ = std::make_shared<const SamplingMasks>(std::move(masks));
  return dt;
}

DataTerm DataTerm::fourier_diagonal(GridShape shape, std::vector<double> weights, ImageField e) {
  if (!(e.shape == shape)) throw std::invalid_argument("fourier_diagonal: e has wrong shape");
  if (weights.size() != shape.size()) throw std::invalid_argument("fourier_diagonal: weights have wrong size");
  return DataTerm(DataKind::Mri, std::move(e), std::move(weights));
}

ImageField DataTerm::apply_fourier_multiplier(const ImageField& z, const std::vector<double>& m) const {
  if (!(z.shape == shape())) throw std::invalid_argument("data term: image shape mismatch");
  if (!all_finite(z)) throw std::invalid_argument("data term: non-finite input");
  if (m.empty()) return z;
  ComplexField f = fft_->forward(z);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] *= m[k];
  const ComplexField back = fft_->inverse(f);
  ImageField out(z.shape);
  for (std::size_t i = 0; i < back.size(); ++i) out.values[i] = back[i].real();
  return out;
}

ImageField DataTerm::apply_T(const ImageField& z) const { return apply_fourier_multiplier(z, weights_); }
ImageField DataTerm::apply_T_inv(const ImageField& z) const { return apply_fourier_multiplier(z, inv_weights_); }
ImageField DataTerm::apply_T_inv_sqrt(const ImageField& z) const {
  return apply_fourier_multiplier(z, inv_sqrt_weights_);
}

double DataTerm::inverse_norm() const {
  if (weights_.empty()) return 1.0;
  return *std::max_element(inv_weights_.begin(), inv_weights_.end());
}

double DataTerm::lipschitz() const { return kGradientNormBound * inverse_norm(); }

std::size_t DataTerm::sample_count() const {
  if (masks_) return masks_->count();
  return denoise_data_.size();
}

ComplexField DataTerm::apply_sample(std::size_t s, const ImageField& y) const {
  if (s >= sample_count()) throw std::out_of_range("sample index out of range");
  if (!masks_) return ComplexField(y.values.begin(), y.values.end());
  ComplexField f = fft_->forward(y);
  const std::vector<double> m = masks_->mask(s);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] *= m[k];
  return f;
}

ComplexField DataTerm::apply_sample_adjoint(std::size_t s, const ComplexField& c) const {
  if (s >= sample_count()) throw std::out_of_range("sample index out of range");
  if (!masks_) return c;
  ComplexField masked = c;
  const std::vector<double> m = masks_->mask(s);
  for (std::size_t k = 0; k < masked.size(); ++k) masked[k] *= m[k];
  return fft_->inverse(masked);
}

const ComplexField& DataTerm::sample_data(std::size_t s) const {
  if (s >= sample_count()) throw std::out_of_range("sample index out of range");
  return masks_ ? masks_->data[s] : denoise_data_[s];
}

namespace {

// Fine DFT indices carrying the same signed frequency as coarse index K. The
// coarse Nyquist index has two signed representatives.
std::vector<int> matching_fine_frequencies(int K, int coarse_n, int fine_n) {
  auto wrap = [fine_n](int s) { return ((s % fine_n) + fine_n) % fine_n; };
  if (2 * K < coarse_n) return {K};
  if (2 * K > coarse_n) return {wrap(K - coarse_n)};
  return {K, wrap(-K)};
}

}  // namespace

DataTerm DataTerm::coarsen(const GridTransfer& transfer) const {
  if (!(transfer.fine() == shape())) throw std::invalid_argument("coarsen: transfer does not match data term");
  ImageField e_coarse = transfer.restrict(e_);
  if (is_identity()) {
    DataTerm out(kind_, e_coarse, {});
    out.denoise_data_.emplace_back(e_coarse.values.begin(), e_coarse.values.end());
    return out;
  }
  const GridShape cs = transfer.coarse();
  const GridShape fs = shape();
  std::vector<double> w(cs.size());
  for (int R = 0; R < cs.rows; ++R) {
    const auto rows = matching_fine_frequencies(R, cs.rows, fs.rows);
    for (int C = 0; C < cs.cols; ++C) {
      const auto cols = matching_fine_frequencies(C, cs.cols, fs.cols);
      double sum = 0.0;
      for (int r : rows)
        for (int c : cols) sum += weights_[fs.index(r, c)];
      w[cs.index(R, C)] = sum / static_cast<double>(rows.size() * cols.size());
    }
  }
  return DataTerm(kind_, std::move(e_coarse), std::move(w));
}

ImageField primal_recover(const DualField& x, const DataTerm& dt) {
  return dt.apply_T_inv(axpy(dt.e(), -1.0, divergence_adjoint(x)));
}

double smooth_dual_value(const DualField& x, const DataTerm& dt) {
  const ImageField r = dt.apply_T_inv_sqrt(axpy(divergence_adjoint(x), -1.0, dt.e()));
  return 0.5 * squared_norm(r);
}

DualField smooth_dual_gradient(const DualField& x, const DataTerm& dt) {
  DualField g = gradient(primal_recover(x, dt));
  for (Vec2& v : g.values) v = -v;
  return g;
}

SmoothEval evaluate_smooth(const DualField& x, const DataTerm& dt) {
  SmoothEval out;
  const ImageField residual = axpy(dt.e(), -1.0, divergence_adjoint(x));
  out.primal = dt.apply_T_inv(residual);
  // 1/2 <T^{-1} u, u> with u = e - grad^* x.
  out.value = 0.5 * inner(residual, out.primal);
  out.gradient = gradient(out.primal);
  for (Vec2& v : out.gradient.values) v = -v;
  return out;
}

double dual_objective(const DualField& x, const DataTerm& dt, double alpha, double boundary_tol) {
  if (!is_feasible(x, alpha, boundary_tol)) return std::numeric_limits<double>::infinity();
  return smooth_dual_value(x, dt);
}

std::vector<ComplexField> conjugate_residuals(const DataTerm& dt) {
  const ImageField t_inv_e = dt.apply_T_inv(dt.e());
  std::vector<ComplexField> out;
  for (std::size_t s = 0; s < dt.sample_count(); ++s) {
    ComplexField r = dt.sample_data(s);
    const ComplexField ts = dt.apply_sample(s, t_inv_e);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= ts[k];
    out.push_back(std::move(r));
  }
  return out;
}

double phi_conjugate_value(const ImageField& z, const DataTerm& dt, bool include_constants) {
  const double quadratic = 0.5 * squared_norm(dt.apply_T_inv_sqrt(axpy(z, 1.0, dt.e())));
  if (!include_constants) return quadratic;
  if (dt.sample_count() == 0) throw std::logic_error("phi_conjugate_value: constants need per-sample data");
  double residual_sq = 0.0;
  for (const ComplexField& r : conjugate_residuals(dt))
    for (const Complex& v : r) residual_sq += std::norm(v);
  const double e_term = squared_norm(dt.apply_T_inv_sqrt(dt.e()));
  return quadratic - 0.5 * residual_sq - 0.5 * e_term;
}

}  // namespace fbmg
