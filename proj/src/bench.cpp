#include "fbmg/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fbmg/fft.hpp"
#include "fbmg/image_io.hpp"
#include "fbmg/transfer.hpp"

namespace fbmg {

namespace {

enum class Stream : std::uint32_t { ImageNoise = 1, Masks = 2, KSpaceNoise = 3 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream, std::uint32_t channel) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), channel};
  return std::mt19937_64(seq);
}

std::mt19937_64 make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

ExperimentSpec ExperimentSpec::denoising_defaults() { return {}; }

ExperimentSpec ExperimentSpec::mri_defaults() {
  ExperimentSpec s;
  s.kind = DataKind::Mri;
  s.sigma = 50.0;
  s.alpha = 1.15;
  s.trigger_k = 500;
  return s;
}

void ExperimentSpec::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("experiment: " + what); };
  if (!(sigma >= 0.0)) fail("sigma must be non-negative");
  if (!(alpha > 0.0)) fail("alpha must be positive");
  if (!(tau_scale > 0.0 && tau_scale < 1.0)) fail("tau scale must lie in (0, 1)");
  if (!(tauh_scale > 0.0 && tauh_scale < 2.0)) fail("coarse tau scale must lie in (0, 2)");
  if (coarse_steps < 0) fail("m must be non-negative");
  if (trigger_k <= 0) fail("trigger-k must be positive");
  if (!(omega > 0.0)) fail("omega must be positive");
  if (input.empty() && size < 3) fail("size must be at least 3");
  if (kind == DataKind::Mri && masks <= 0) fail("need at least one mask");
  if (lines && *lines <= 0) fail("lines must be positive");
  if (max_iter < 0 || ref_iters <= 0) fail("iteration counts must be positive");
}

ImageField add_gaussian_noise(const ImageField& image, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("add_gaussian_noise: negative sigma");
  ImageField out = image;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng = make_rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : out.values) v += noise(rng);
  return out;
}

SamplingMasks add_complex_noise(SamplingMasks masks, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("add_complex_noise: negative sigma");
  if (sigma == 0.0) return masks;
  std::mt19937_64 rng = make_rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (std::size_t s = 0; s < masks.count(); ++s) {
    for (int r : masks.lines[s]) {
      for (int c = 0; c < masks.shape.cols; ++c) {
        const double re = noise(rng);
        const double im = noise(rng);
        masks.data[s][masks.shape.index(r, c)] += Complex(re, im);
      }
    }
  }
  return masks;
}

LineMasks random_line_masks(const GridShape& shape, int t, int lines, std::uint64_t seed, int max_retries) {
  shape.validate();
  if (t <= 0 || lines <= 0 || lines > shape.rows)
    throw std::invalid_argument("random_line_masks: need t > 0 and 0 < lines <= rows");
  std::mt19937_64 rng = make_rng(seed);
  std::vector<int> all(shape.rows);
  for (int r = 0; r < shape.rows; ++r) all[r] = r;

  LineMasks out;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    out.lines.assign(t, {});
    std::vector<bool> covered(shape.rows, false);
    for (auto& mask : out.lines) {
      std::sample(all.begin(), all.end(), std::back_inserter(mask), lines, rng);
      for (int r : mask) {
        covered[r] = true;
        covered[(shape.rows - r) % shape.rows] = true;
      }
    }
    if (std::all_of(covered.begin(), covered.end(), [](bool b) { return b; })) {
      out.retries = attempt;
      return out;
    }
  }
  throw std::runtime_error("random_line_masks: k-space coverage failed after " + std::to_string(max_retries) +
                           " retries");
}

SamplingMasks acquire(const ImageField& image, std::vector<std::vector<int>> lines) {
  SamplingMasks masks{image.shape, std::move(lines), {}};
  const ComplexField full = Fft2d(image.shape).forward(image);
  for (std::size_t s = 0; s < masks.count(); ++s) {
    ComplexField d(full.size(), Complex(0.0, 0.0));
    for (int r : masks.lines[s]) {
      for (int c = 0; c < image.shape.cols; ++c) d[image.shape.index(r, c)] = full[image.shape.index(r, c)];
    }
    masks.data.push_back(std::move(d));
  }
  return masks;
}

ImageField synthetic_scene(int rows, int cols) {
  ImageField img(GridShape{rows, cols});
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double y = (r + 0.5) / rows;
      const double x = (c + 0.5) / cols;
      double v = 0.2 + 0.3 * x;
      if (x > 0.1 && x < 0.45 && y > 0.15 && y < 0.5) v = 0.9;
      if (std::hypot(x - 0.7, y - 0.35) < 0.18) v = 0.1;
      if (y > 0.6 && y < 0.9 && std::abs(x - 0.3) < 0.5 * (y - 0.6)) v = 0.65;
      if (x > 0.6 && x < 0.9 && y > 0.65 && y < 0.9) v = 0.5 + 0.3 * std::sin(2.0 * std::numbers::pi * 6.0 * x);
      img(r, c) = v;
    }
  }
  return img;
}

ImageField shepp_logan(int rows, int cols) {
  struct Ellipse {
    double value, a, b, x0, y0, phi_deg;
  };
  static constexpr Ellipse kEllipses[] = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},        {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},       {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},     {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},   {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  };
  ImageField img(GridShape{rows, cols});
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double x = 2.0 * (c + 0.5) / cols - 1.0;
      const double y = 1.0 - 2.0 * (r + 0.5) / rows;
      double v = 0.0;
      for (const Ellipse& e : kEllipses) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = x - e.x0;
        const double dy = y - e.y0;
        const double u = dx * std::cos(phi) + dy * std::sin(phi);
        const double w = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((u * u) / (e.a * e.a) + (w * w) / (e.b * e.b) <= 1.0) v += e.value;
      }
      img(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

Milestone first_reaching(const SolveTrace& trace, double rho) {
  Milestone m;
  m.rho = rho;
  for (const TraceRecord& r : trace.records) {
    if (r.relative && *r.relative <= rho) {
      m.iter = r.iter;
      m.icn = r.icn;
      m.cpu_seconds = r.cpu_seconds;
      break;
    }
  }
  return m;
}

namespace {

struct ChannelProblem {
  DataTerm dt;
  ImageField observed;
};

int default_lines(int rows) {
  return std::max(1, static_cast<int>(std::lround(static_cast<double>(kMriReferenceLines) * rows / kMriReferenceRows)));
}

SolverConfig solver_config(const ExperimentSpec& spec, const DataTerm& dt) {
  SolverConfig cfg;
  cfg.alpha = spec.alpha;
  cfg.tau = spec.tau_scale / dt.lipschitz();
  cfg.tau_coarse = spec.tauh_scale / dt.coarsen(GridTransfer(dt.shape())).lipschitz();
  cfg.coarse_steps = spec.coarse_steps;
  cfg.omega = spec.omega;
  cfg.project_candidate = spec.project_candidate;
  cfg.max_iter = spec.max_iter;
  return cfg;
}

void accumulate(SolveTrace& total, const SolveTrace& part) {
  if (total.records.empty()) {
    total = part;
    return;
  }
  if (total.records.size() != part.records.size()) throw std::logic_error("channel traces differ in length");
  for (std::size_t k = 0; k < part.records.size(); ++k) {
    total.records[k].objective += part.records[k].objective;
    total.records[k].cpu_seconds += part.records[k].cpu_seconds;
  }
}

void write_summary(const std::string& path, const ExperimentResult& res) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw std::runtime_error("cannot write " + path);
  std::fprintf(f.get(), "method,rho,iterations,icn,cputime\n");
  auto rows = [&](const char* name, const std::vector<Milestone>& ms) {
    for (const Milestone& m : ms) {
      if (m.iter)
        std::fprintf(f.get(), "%s,%.17g,%d,%.17g,%.17g\n", name, m.rho, *m.iter, m.icn, m.cpu_seconds);
      else
        std::fprintf(f.get(), "%s,%.17g,,,\n", name, m.rho);
    }
  };
  rows("fb", res.fb_milestones);
  rows("fbmg", res.fbmg_milestones);
}

}  // namespace

void write_trace_csv(const std::string& path, const SolveTrace& trace) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw std::runtime_error("cannot write " + path);
  std::fprintf(f.get(), "iter,icn,cputime,objective,relative\n");
  for (const TraceRecord& r : trace.records) {
    std::fprintf(f.get(), "%d,%.17g,%.17g,%.17g,", r.iter, r.icn, r.cpu_seconds, r.objective);
    if (r.relative) std::fprintf(f.get(), "%.17g", *r.relative);
    std::fprintf(f.get(), "\n");
  }
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<ImageField> clean;
  if (spec.input.empty()) {
    clean.push_back(spec.kind == DataKind::Mri ? shepp_logan(spec.size, spec.size)
                                               : synthetic_scene(spec.size, spec.size));
  } else {
    clean = load_image(spec.input);
  }
  const GridShape shape = clean.front().shape;

  ExperimentResult res;
  LineMasks lines;
  if (spec.kind == DataKind::Mri) {
    const int per_mask = spec.lines.value_or(default_lines(shape.rows));
    lines = random_line_masks(shape, spec.masks, per_mask, make_rng(spec.seed, Stream::Masks, 0)());
    res.mask_retries = lines.retries;
    std::clog << "masks: " << spec.masks << " x " << per_mask << " lines on " << shape.rows
              << " rows, full symmetrised coverage after " << lines.retries << " retries\n";
  }
  const double kspace_sigma =
      spec.sigma / std::sqrt(static_cast<double>(kMriReferenceRows) * kMriReferenceCols);

  std::vector<ImageField> observed;
  std::vector<ImageField> recon_fb;
  std::vector<ImageField> recon_fbmg;
  double vstar = 0.0;
  for (std::size_t ch = 0; ch < clean.size(); ++ch) {
    const auto channel = static_cast<std::uint32_t>(ch);
    std::optional<DataTerm> dt;
    if (spec.kind == DataKind::Denoising) {
      ImageField noisy =
          add_gaussian_noise(clean[ch], spec.sigma, make_rng(spec.seed, Stream::ImageNoise, channel)());
      dt.emplace(DataTerm::denoising(noisy));
      observed.push_back(std::move(noisy));
    } else {
      SamplingMasks acq = add_complex_noise(acquire(clean[ch], lines.lines), kspace_sigma,
                                            make_rng(spec.seed, Stream::KSpaceNoise, channel)());
      dt.emplace(DataTerm::mri(std::move(acq)));
      observed.push_back(dt->apply_T_inv(dt->e()));
    }

    const SolverConfig base = solver_config(spec, *dt);
    const DualField x0(shape);

    SolverConfig ref_cfg = base;
    ref_cfg.trigger = TriggerPolicy::first_k(spec.trigger_k);
    ref_cfg.max_iter = spec.ref_iters;
    vstar += fbmg_solve(x0, *dt, ref_cfg).trace.records.back().objective;

    const SolveResult fb = fb_solve(x0, *dt, base);
    SolverConfig mg_cfg = base;
    mg_cfg.trigger = TriggerPolicy::first_k(spec.trigger_k);
    const SolveResult fbmg = fbmg_solve(x0, *dt, mg_cfg);

    accumulate(res.fb, fb.trace);
    accumulate(res.fbmg, fbmg.trace);
    recon_fb.push_back(primal_recover(fb.x, *dt));
    recon_fbmg.push_back(primal_recover(fbmg.x, *dt));
  }

  res.vstar = vstar;
  res.fb.set_reference(vstar);
  res.fbmg.set_reference(vstar);
  for (double rho : {kRho1, kRho2}) {
    res.fb_milestones.push_back(first_reaching(res.fb, rho));
    res.fbmg_milestones.push_back(first_reaching(res.fbmg, rho));
  }

  if (!spec.out_dir.empty()) {
    const std::filesystem::path dir(spec.out_dir);
    std::filesystem::create_directories(dir);
    write_trace_csv((dir / "trace_fb.csv").string(), res.fb);
    write_trace_csv((dir / "trace_fbmg.csv").string(), res.fbmg);
    write_summary((dir / "summary.csv").string(), res);
    save_image((dir / "noisy.png").string(), observed);
    save_image((dir / "recon_fb.png").string(), recon_fb);
    save_image((dir / "recon_fbmg.png").string(), recon_fbmg);
  }
  return res;
}

}  // namespace fbmg
