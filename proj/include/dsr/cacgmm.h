// include/dsr/cacgmm.h

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

#ifndef DSR_CACGMM_H_
#define DSR_CACGMM_H_

#include <Eigen/Dense>
#include <vector>

#include "dsr/manifest.h"
#include "dsr/stft.h"

namespace dsr {

// Guided complex angular central Gaussian mixture model. Classes are the
// speakers of the activity grid plus one always-active noise class; the
// class weights are tied over frequency, which resolves the per-bin
// permutation ambiguity.
struct CacgmmConfig {
  int iterations = 20;
  double eps = 1e-8;           // covariance regularizer (relative to trace)
  double weight_floor = 1e-6;  // minimal class weight before renormalizing

  void validate() const;
};

// Per-class time-frequency posteriors. Class k of the grid maps to row k;
// the appended noise class is the last row.
struct Masks {
  int num_classes = 0;
  int frames = 0;
  int bins = 0;
  int target_class = -1;
  std::vector<double> gamma;  // [class][frame][bin]

  double at(int k, int t, int f) const {
    return gamma[(static_cast<std::size_t>(k) * frames + t) * bins + f];
  }
  double& at(int k, int t, int f) {
    return gamma[(static_cast<std::size_t>(k) * frames + t) * bins + f];
  }
};

struct CacgmmFit {
  Masks masks;
  // Auxiliary log-likelihood sum_{t,f} log sum_k a_k pi_k p_k, evaluated at
  // the E-step of each iteration. Non-decreasing under the EM updates.
  std::vector<double> objective;
};

// Density of the complex angular central Gaussian up to a shared constant:
// -log det B - I * log(z^H B^-1 z), for unit-norm z.
double cacg_log_density(const Eigen::VectorXcd& z, const Eigen::MatrixXcd& b);

// EM fit of the guided mixture. Requires >= 2 channels and >= 2 frames;
// the activity grid must be frame-aligned with the spectrogram and the
// target row must be active somewhere.
CacgmmFit fit_guided_cacgmm(const Spectrogram& s, const ActivityGrid& activity,
                            const CacgmmConfig& cfg = CacgmmConfig{});

namespace serial {
// Reference implementation with naive per-entry loops, kept for testing.
CacgmmFit fit_guided_cacgmm(const Spectrogram& s, const ActivityGrid& activity,
                            const CacgmmConfig& cfg = CacgmmConfig{});
}  // namespace serial

}  // namespace dsr

#endif  // DSR_CACGMM_H_
