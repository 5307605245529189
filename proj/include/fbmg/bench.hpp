#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbmg/core.hpp"
#include "fbmg/dataterm.hpp"
#include "fbmg/solver.hpp"

namespace fbmg {

/// Full-size acquisition the MRI noise level refers to: sigma is given for an
/// unnormalised DFT on this grid and rescaled to the unitary transform.
inline constexpr int kMriReferenceRows = 583;
inline constexpr int kMriReferenceCols = 493;
inline constexpr int kMriReferenceLines = 150;

struct ExperimentSpec {
  DataKind kind = DataKind::Denoising;
  /// PNG to use; a built-in synthetic image of `size` x `size` when empty.
  std::string input;
  int size = 64;
  double sigma = 0.4;
  double alpha = 0.85;
  double tau_scale = 0.95;
  double tauh_scale = 1.95;
  int coarse_steps = 6;
  int trigger_k = 110;
  double omega = 0.4;
  /// See SolverConfig::project_candidate.
  bool project_candidate = false;
  /// MRI: number of masks and lines per mask. Lines default to the
  /// reference count scaled by rows / 583.
  int masks = 21;
  std::optional<int> lines;
  std::uint64_t seed = 1;
  int max_iter = 3000;
  int ref_iters = 20000;
  /// Artifacts are written here; nothing is written when empty.
  std::string out_dir;

  static ExperimentSpec denoising_defaults();
  static ExperimentSpec mri_defaults();
  void validate() const;
};

/// Adds N(0, sigma^2) to every pixel; deterministic in the seed.
ImageField add_gaussian_noise(const ImageField& image, double sigma, std::uint64_t seed);

/// Adds independent N(0, sigma^2) real and imaginary parts to every sampled
/// frequency of every sample.
SamplingMasks add_complex_noise(SamplingMasks masks, double sigma, std::uint64_t seed);

struct LineMasks {
  std::vector<std::vector<int>> lines;
  /// Draws discarded because the symmetrised union missed a frequency row.
  int retries = 0;
};

/// t masks, each a uniformly drawn set of `lines` distinct k-space rows.
/// Redraws until every row is covered after symmetrisation; throws
/// std::runtime_error after max_retries failed draws.
LineMasks random_line_masks(const GridShape& shape, int t, int lines, std::uint64_t seed, int max_retries = 100);

/// Noise-free MRI acquisition b_s = S_s F y.
SamplingMasks acquire(const ImageField& image, std::vector<std::vector<int>> lines);

/// Synthetic test images with values in [0, 1].
ImageField synthetic_scene(int rows, int cols);
ImageField shepp_logan(int rows, int cols);

/// First trace record with relative error <= rho.
struct Milestone {
  double rho = 0.0;
  std::optional<int> iter;
  double icn = 0.0;
  double cpu_seconds = 0.0;
};
Milestone first_reaching(const SolveTrace& trace, double rho);

struct ExperimentResult {
  /// Traces summed over channels, with relative errors against vstar.
  SolveTrace fb;
  SolveTrace fbmg;
  double vstar = 0.0;
  std::vector<Milestone> fb_milestones;
  std::vector<Milestone> fbmg_milestones;
  int mask_retries = 0;
};

inline constexpr double kRho1 = 0.01;
inline constexpr double kRho2 = 0.001;

/// Builds the data, computes a reference optimum with a long FBMG run, then
/// runs FB and FBMG for max_iter iterations each. Colour inputs are solved
/// channel by channel.
ExperimentResult run_experiment(const ExperimentSpec& spec);

void write_trace_csv(const std::string& path, const SolveTrace& trace);

}  // namespace fbmg
