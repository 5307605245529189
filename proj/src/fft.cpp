#include "fbmg/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace fbmg {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Fft2d::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  Plans(int rows, int cols) {
    std::lock_guard lock(planner_mutex());
    // Scratch arrays only serve planning; FFTW_UNALIGNED allows execution on
    // arbitrary std::vector storage.
    fftw_complex* scratch = fftw_alloc_complex(static_cast<std::size_t>(rows) * cols);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward = fftw_plan_dft_2d(rows, cols, scratch, scratch, FFTW_FORWARD, flags);
    backward = fftw_plan_dft_2d(rows, cols, scratch, scratch, FFTW_BACKWARD, flags);
    fftw_free(scratch);
    if (!forward || !backward) throw std::runtime_error("FFTW planning failed");
  }

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }

  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

Fft2d::Fft2d(GridShape shape) : shape_(shape), plans_(std::make_shared<Plans>(shape.rows, shape.cols)) {
  shape.validate();
}

namespace {

ComplexField execute(fftw_plan plan, const ComplexField& in, std::size_t n) {
  if (in.size() != n) throw std::invalid_argument("fft: input size mismatch");
  // Plans are in-place, so the new-array call must be in-place as well.
  ComplexField out = in;
  auto* data = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, data, data);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Complex& v : out) v *= scale;
  return out;
}

}  // namespace

ComplexField Fft2d::forward(const ComplexField& in) const { return execute(plans_->forward, in, shape_.size()); }

ComplexField Fft2d::inverse(const ComplexField& in) const { return execute(plans_->backward, in, shape_.size()); }

ComplexField Fft2d::forward(const ImageField& in) const {
  ComplexField c(in.values.begin(), in.values.end());
  return forward(c);
}

}  // namespace fbmg
