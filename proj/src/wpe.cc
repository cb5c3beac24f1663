// src/wpe.cc

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

#include "dsr/wpe.h"

#include <stdexcept>
#include <string>

#include "dsr/eigen_util.h"

namespace dsr {

namespace {
constexpr double kLoading = 1e-8;
}

void WpeConfig::validate() const {
  if (taps < 1 || delay < 1 || iterations < 1 || psd_floor <= 0.0)
    throw std::invalid_argument(
        "WpeConfig: require taps >= 1, delay >= 1, iterations >= 1, psd_floor > 0");
}

Spectrogram wpe(const Spectrogram& s, const WpeConfig& cfg) {
  cfg.validate();
  const int num_ch = s.num_channels();
  const int frames = s.num_frames();
  const int bins = s.num_bins();
  if (frames <= cfg.taps + cfg.delay)
    throw std::invalid_argument("wpe: need more frames than taps + delay");

  Spectrogram out = s;
  const int stack = num_ch * cfg.taps;

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < bins; ++k) {
    const MatrixXc x = bin_matrix(s, k);

    // lagged history, column t = [x(t-delay); ...; x(t-delay-taps+1)]
    MatrixXc hist = MatrixXc::Zero(stack, frames);
    for (int j = 0; j < cfg.taps; ++j)
      for (int t = cfg.delay + j; t < frames; ++t)
        hist.block(j * num_ch, t, num_ch, 1) = x.col(t - cfg.delay - j);

    MatrixXc estimate = x;
    MatrixXc hist_weighted(stack, frames);
    for (int iter = 0; iter < cfg.iterations; ++iter) {
      Eigen::VectorXd lambda(frames);
      for (int t = 0; t < frames; ++t)
        lambda(t) = std::max(cfg.psd_floor, estimate.col(t).squaredNorm() / num_ch);

      for (int t = 0; t < frames; ++t) hist_weighted.col(t) = hist.col(t) / lambda(t);
      MatrixXc corr = hist_weighted * hist.adjoint();          // IK x IK
      const MatrixXc cross = hist_weighted * x.adjoint();      // IK x I

      const double trace = corr.trace().real();
      if (trace <= 0.0) break;  // nothing to predict (silent bin)
      corr.diagonal().array() += kLoading * trace / stack;
      Eigen::LLT<MatrixXc> llt(corr);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error("wpe: singular correlation matrix at frequency bin " +
                                 std::to_string(k));
      const MatrixXc filter = llt.solve(cross);  // IK x I
      estimate = x - filter.adjoint() * hist;
    }
    set_bin_matrix(out, k, estimate);
  }
  return out;
}

}  // namespace dsr
