// src/cacgmm.cc

// Copyright 2025  DSRKit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "dsr/cacgmm.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dsr/eigen_util.h"

namespace dsr {

namespace {

constexpr double kNormFloor = 1e-10;  // ||x|| and quadratic-form floor

struct GuidedProblem {
  int num_classes = 0;
  int frames = 0;
  std::vector<std::uint8_t> active;  // [class][frame], noise class appended

  bool is_active(int k, int t) const {
    return active[static_cast<std::size_t>(k) * frames + t] != 0;
  }
};

GuidedProblem build_problem(const Spectrogram& s, const ActivityGrid& grid) {
  if (s.num_channels() < 2)
    throw std::invalid_argument("fit_guided_cacgmm: need at least 2 channels");
  if (s.num_frames() < 2)
    throw std::invalid_argument("fit_guided_cacgmm: need at least 2 frames");
  if (grid.num_frames != s.num_frames())
    throw std::invalid_argument(
        "fit_guided_cacgmm: activity grid is not frame-aligned with the spectrogram");
  if (grid.target_row < 0 || grid.target_row >= grid.num_speakers())
    throw std::invalid_argument("fit_guided_cacgmm: grid has no target row");
  bool target_active = false;
  for (int t = 0; t < grid.num_frames && !target_active; ++t)
    target_active = grid.active(grid.target_row, t);
  if (!target_active)
    throw std::runtime_error("fit_guided_cacgmm: target speaker never active");

  GuidedProblem p;
  p.frames = grid.num_frames;
  p.num_classes = grid.num_speakers() + 1;
  p.active.assign(static_cast<std::size_t>(p.num_classes) * p.frames, 0);
  for (int k = 0; k < grid.num_speakers(); ++k)
    for (int t = 0; t < p.frames; ++t)
      p.active[static_cast<std::size_t>(k) * p.frames + t] = grid.active(k, t) ? 1 : 0;
  for (int t = 0; t < p.frames; ++t)  // noise class, active everywhere
    p.active[static_cast<std::size_t>(p.num_classes - 1) * p.frames + t] = 1;
  return p;
}

// unit-normalized snapshots of one bin, zero columns for silent frames
MatrixXc normalized_bin(const Spectrogram& s, int f) {
  MatrixXc z(s.num_channels(), s.num_frames());
  for (int t = 0; t < s.num_frames(); ++t) {
    VectorXc x(s.num_channels());
    for (int c = 0; c < s.num_channels(); ++c) x(c) = s.at(c, t, f);
    z.col(t) = x / std::max(x.norm(), kNormFloor);
  }
  return z;
}

}  // namespace

void CacgmmConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("CacgmmConfig: iterations must be >= 1");
  if (eps <= 0.0) throw std::invalid_argument("CacgmmConfig: eps must be > 0");
  if (weight_floor < 0.0)
    throw std::invalid_argument("CacgmmConfig: weight_floor must be >= 0");
}

double cacg_log_density(const Eigen::VectorXcd& z, const Eigen::MatrixXcd& b) {
  const int dim = static_cast<int>(z.size());
  Eigen::LLT<MatrixXc> llt(b);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("cacg_log_density: matrix is not positive definite");
  double logdet = 0.0;
  for (int i = 0; i < dim; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i).real());
  const double quad =
      std::max(kNormFloor, z.dot(llt.solve(z)).real());  // z^H B^-1 z
  return -logdet - dim * std::log(quad);
}

CacgmmFit fit_guided_cacgmm(const Spectrogram& s, const ActivityGrid& grid,
                            const CacgmmConfig& cfg) {
  cfg.validate();
  const GuidedProblem problem = build_problem(s, grid);
  const int num_ch = s.num_channels();
  const int frames = s.num_frames();
  const int bins = s.num_bins();
  const int classes = problem.num_classes;

  // bin-major snapshots, unit-normalized once
  std::vector<MatrixXc> zbins(bins);
#pragma omp parallel for schedule(static)
  for (int f = 0; f < bins; ++f) zbins[f] = normalized_bin(s, f);

  // tied weights pi[k][t]; covariances B[f][k]
  std::vector<double> pi(static_cast<std::size_t>(classes) * frames, 0.0);
  for (int t = 0; t < frames; ++t) {
    double norm = 0.0;
    for (int k = 0; k < classes; ++k) norm += problem.is_active(k, t) ? 1.0 : 0.0;
    for (int k = 0; k < classes; ++k)
      if (problem.is_active(k, t))
        pi[static_cast<std::size_t>(k) * frames + t] = 1.0 / norm;
  }
  std::vector<std::vector<MatrixXc>> cov(
      bins, std::vector<MatrixXc>(classes, MatrixXc::Identity(num_ch, num_ch)));

  CacgmmFit fit;
  fit.masks.num_classes = classes;
  fit.masks.frames = frames;
  fit.masks.bins = bins;
  fit.masks.target_class = grid.target_row;
  fit.masks.gamma.assign(static_cast<std::size_t>(classes) * frames * bins, 0.0);
  Masks& masks = fit.masks;

  std::vector<double> objective_per_bin(bins);

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    // E-step and M-step are independent per bin; the tied-weight update in
    // between reduces over bins in fixed order, so results do not depend
    // on the thread count.
#pragma omp parallel for schedule(dynamic)
    for (int f = 0; f < bins; ++f) {
      const MatrixXc& z = zbins[f];
      std::vector<MatrixXc> inv(classes);
      std::vector<double> logdet(classes);
      for (int k = 0; k < classes; ++k) {
        Eigen::LLT<MatrixXc> llt(cov[f][k]);
        if (llt.info() != Eigen::Success)
          throw std::runtime_error("fit_guided_cacgmm: covariance not PD at bin " +
                                   std::to_string(f));
        inv[k] = llt.solve(MatrixXc::Identity(num_ch, num_ch));
        logdet[k] = 0.0;
        for (int i = 0; i < num_ch; ++i)
          logdet[k] += 2.0 * std::log(llt.matrixL()(i, i).real());
      }
      // quadratic forms for every class and frame
      Eigen::MatrixXd quad(classes, frames);
      for (int k = 0; k < classes; ++k) {
        const MatrixXc w = inv[k] * z;
        for (int t = 0; t < frames; ++t)
          quad(k, t) =
              std::max(kNormFloor, std::real(z.col(t).dot(w.col(t))));
      }

      double obj = 0.0;
      Eigen::MatrixXd gamma_bin = Eigen::MatrixXd::Zero(classes, frames);
      Eigen::VectorXd logw(classes);
      for (int t = 0; t < frames; ++t) {
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < classes; ++k) {
          if (!problem.is_active(k, t)) continue;
          const double lp = -logdet[k] - num_ch * std::log(quad(k, t));
          logw(k) = std::log(pi[static_cast<std::size_t>(k) * frames + t]) + lp;
          best = std::max(best, logw(k));
        }
        double denom = 0.0;
        for (int k = 0; k < classes; ++k)
          if (problem.is_active(k, t)) denom += std::exp(logw(k) - best);
        obj += best + std::log(denom);
        for (int k = 0; k < classes; ++k)
          if (problem.is_active(k, t))
            gamma_bin(k, t) = std::exp(logw(k) - best) / denom;
      }
      objective_per_bin[f] = obj;
      for (int k = 0; k < classes; ++k)
        for (int t = 0; t < frames; ++t) masks.at(k, t, f) = gamma_bin(k, t);

      // M-step fixed point with this iteration's inverses
      for (int k = 0; k < classes; ++k) {
        Eigen::VectorXd w(frames);
        double total = 0.0;
        for (int t = 0; t < frames; ++t) {
          const double g = gamma_bin(k, t);
          w(t) = g / quad(k, t);
          total += g;
        }
        if (total < 1e-12) continue;  // starved class keeps its covariance
        MatrixXc b = (z * w.asDiagonal() * z.adjoint()) * (num_ch / total);
        b = hermitize(b);
        b.diagonal().array() += cfg.eps * b.trace().real() / num_ch;
        cov[f][k] = b;
      }
    }

    double objective = 0.0;
    for (int f = 0; f < bins; ++f) objective += objective_per_bin[f];
    fit.objective.push_back(objective);

    // tied weight update, one weight per class and frame
#pragma omp parallel for collapse(2) schedule(static)
    for (int k = 0; k < classes; ++k)
      for (int t = 0; t < frames; ++t) {
        double acc = 0.0;
        for (int f = 0; f < bins; ++f) acc += masks.at(k, t, f);
        pi[static_cast<std::size_t>(k) * frames + t] =
            problem.is_active(k, t) ? std::max(cfg.weight_floor, acc) : 0.0;
      }
    for (int t = 0; t < frames; ++t) {
      double norm = 0.0;
      for (int k = 0; k < classes; ++k) norm += pi[static_cast<std::size_t>(k) * frames + t];
      if (norm > 0.0)
        for (int k = 0; k < classes; ++k)
          pi[static_cast<std::size_t>(k) * frames + t] /= norm;
    }
  }
  return fit;
}

}  // namespace dsr
