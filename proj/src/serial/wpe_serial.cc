// src/serial/wpe_serial.cc

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

#include <stdexcept>
#include <string>

#include "dsr/eigen_util.h"
#include "dsr/wpe.h"

namespace dsr {
namespace serial {

// Textbook form of the update, one bin after another, accumulating the
// normal equations frame by frame.
Spectrogram wpe(const Spectrogram& s, const WpeConfig& cfg) {
  cfg.validate();
  const int num_ch = s.num_channels();
  const int frames = s.num_frames();
  if (frames <= cfg.taps + cfg.delay)
    throw std::invalid_argument("wpe: need more frames than taps + delay");
  const int stack = num_ch * cfg.taps;

  Spectrogram out = s;
  for (int k = 0; k < s.num_bins(); ++k) {
    const MatrixXc x = bin_matrix(s, k);
    MatrixXc estimate = x;

    auto lagged = [&](int t) {
      VectorXc v = VectorXc::Zero(stack);
      for (int j = 0; j < cfg.taps; ++j) {
        const int src = t - cfg.delay - j;
        if (src >= 0) v.segment(j * num_ch, num_ch) = x.col(src);
      }
      return v;
    };

    for (int iter = 0; iter < cfg.iterations; ++iter) {
      MatrixXc corr = MatrixXc::Zero(stack, stack);
      MatrixXc cross = MatrixXc::Zero(stack, num_ch);
      for (int t = 0; t < frames; ++t) {
        const double lambda =
            std::max(cfg.psd_floor, estimate.col(t).squaredNorm() / num_ch);
        const VectorXc v = lagged(t);
        corr += v * v.adjoint() / lambda;
        cross += v * x.col(t).adjoint() / lambda;
      }
      const double trace = corr.trace().real();
      if (trace <= 0.0) break;
      corr.diagonal().array() += 1e-8 * trace / stack;
      Eigen::LLT<MatrixXc> llt(corr);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error("wpe: singular correlation matrix at frequency bin " +
                                 std::to_string(k));
      const MatrixXc filter = llt.solve(cross);
      for (int t = 0; t < frames; ++t)
        estimate.col(t) = x.col(t) - filter.adjoint() * lagged(t);
    }
    set_bin_matrix(out, k, estimate);
  }
  return out;
}

}  // namespace serial
}  // namespace dsr
