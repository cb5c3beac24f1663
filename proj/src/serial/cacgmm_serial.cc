// src/serial/cacgmm_serial.cc

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

#include <cmath>
#include <stdexcept>

#include "dsr/cacgmm.h"
#include "dsr/eigen_util.h"

namespace dsr {
namespace serial {

// Naive-loop reference: explicit inverses and per-entry accumulation, one
// bin after another. Kept for testing the parallel kernel against.
CacgmmFit fit_guided_cacgmm(const Spectrogram& s, const ActivityGrid& grid,
                            const CacgmmConfig& cfg) {
  cfg.validate();
  if (s.num_channels() < 2)
    throw std::invalid_argument("fit_guided_cacgmm: need at least 2 channels");
  if (s.num_frames() < 2)
    throw std::invalid_argument("fit_guided_cacgmm: need at least 2 frames");
  if (grid.num_frames != s.num_frames())
    throw std::invalid_argument(
        "fit_guided_cacgmm: activity grid is not frame-aligned with the spectrogram");

  const int num_ch = s.num_channels();
  const int frames = s.num_frames();
  const int bins = s.num_bins();
  const int classes = grid.num_speakers() + 1;

  auto active = [&](int k, int t) {
    return k == classes - 1 ? true : grid.active(k, t);
  };
  bool target_active = false;
  for (int t = 0; t < frames; ++t) target_active |= grid.active(grid.target_row, t);
  if (!target_active)
    throw std::runtime_error("fit_guided_cacgmm: target speaker never active");

  std::vector<MatrixXc> z(bins);
  for (int f = 0; f < bins; ++f) {
    z[f].resize(num_ch, frames);
    for (int t = 0; t < frames; ++t) {
      VectorXc x(num_ch);
      for (int c = 0; c < num_ch; ++c) x(c) = s.at(c, t, f);
      z[f].col(t) = x / std::max(x.norm(), 1e-10);
    }
  }

  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(classes, frames);
  for (int t = 0; t < frames; ++t) {
    double n = 0.0;
    for (int k = 0; k < classes; ++k) n += active(k, t) ? 1.0 : 0.0;
    for (int k = 0; k < classes; ++k)
      if (active(k, t)) pi(k, t) = 1.0 / n;
  }
  std::vector<std::vector<MatrixXc>> cov(
      bins, std::vector<MatrixXc>(classes, MatrixXc::Identity(num_ch, num_ch)));

  CacgmmFit fit;
  fit.masks.num_classes = classes;
  fit.masks.frames = frames;
  fit.masks.bins = bins;
  fit.masks.target_class = grid.target_row;
  fit.masks.gamma.assign(static_cast<std::size_t>(classes) * frames * bins, 0.0);

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    double objective = 0.0;
    for (int f = 0; f < bins; ++f) {
      std::vector<MatrixXc> inv(classes);
      std::vector<double> logdet(classes);
      for (int k = 0; k < classes; ++k) {
        inv[k] = cov[f][k].inverse();
        logdet[k] = std::log(std::real(cov[f][k].determinant()));
      }
      Eigen::MatrixXd quad(classes, frames), gamma(classes, frames);
      gamma.setZero();
      for (int t = 0; t < frames; ++t) {
        for (int k = 0; k < classes; ++k) {
          Cplx q = 0.0;
          for (int a = 0; a < num_ch; ++a)
            for (int b = 0; b < num_ch; ++b)
              q += std::conj(z[f](a, t)) * inv[k](a, b) * z[f](b, t);
          quad(k, t) = std::max(1e-10, q.real());
        }
        double best = -1e300;
        for (int k = 0; k < classes; ++k)
          if (active(k, t))
            best = std::max(best, std::log(pi(k, t)) - logdet[k] -
                                      num_ch * std::log(quad(k, t)));
        double denom = 0.0;
        for (int k = 0; k < classes; ++k)
          if (active(k, t))
            denom += std::exp(std::log(pi(k, t)) - logdet[k] -
                              num_ch * std::log(quad(k, t)) - best);
        objective += best + std::log(denom);
        for (int k = 0; k < classes; ++k)
          if (active(k, t))
            gamma(k, t) = std::exp(std::log(pi(k, t)) - logdet[k] -
                                   num_ch * std::log(quad(k, t)) - best) /
                          denom;
      }
      for (int k = 0; k < classes; ++k)
        for (int t = 0; t < frames; ++t) fit.masks.at(k, t, f) = gamma(k, t);

      for (int k = 0; k < classes; ++k) {
        double total = 0.0;
        MatrixXc acc = MatrixXc::Zero(num_ch, num_ch);
        for (int t = 0; t < frames; ++t) {
          total += gamma(k, t);
          const double w = gamma(k, t) / quad(k, t);
          for (int a = 0; a < num_ch; ++a)
            for (int b = 0; b < num_ch; ++b)
              acc(a, b) += w * z[f](a, t) * std::conj(z[f](b, t));
        }
        if (total < 1e-12) continue;
        MatrixXc b = acc * (num_ch / total);
        b = hermitize(b);
        b.diagonal().array() += cfg.eps * b.trace().real() / num_ch;
        cov[f][k] = b;
      }
    }
    fit.objective.push_back(objective);

    for (int k = 0; k < classes; ++k)
      for (int t = 0; t < frames; ++t) {
        double acc = 0.0;
        for (int f = 0; f < bins; ++f) acc += fit.masks.at(k, t, f);
        pi(k, t) = active(k, t) ? std::max(cfg.weight_floor, acc) : 0.0;
      }
    for (int t = 0; t < frames; ++t) {
      const double norm = pi.col(t).sum();
      if (norm > 0.0) pi.col(t) /= norm;
    }
  }
  return fit;
}

}  // namespace serial
}  // namespace dsr
