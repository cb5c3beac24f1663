// include/dsr/beamform.h

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

#ifndef DSR_BEAMFORM_H_
#define DSR_BEAMFORM_H_

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "dsr/eigen_util.h"
#include "dsr/stft.h"
#include "dsr/waveform.h"

namespace dsr {

// time-frequency weights, (frame, bin)
using TfMask = Eigen::MatrixXd;

// Per-bin Hermitian covariance with the accumulated mask mass. dim is the
// channel count I, or I*taps for tap-stacked (convolutional) statistics.
struct SpatialCovariance {
  std::vector<MatrixXc> phi;
  std::vector<double> mass;
  std::vector<int> fallback_bins;  // bins that fell back to eps * Id

  int num_bins() const { return static_cast<int>(phi.size()); }
  int dim() const { return phi.empty() ? 0 : static_cast<int>(phi[0].rows()); }
};

struct BeamformerWeights {
  std::vector<VectorXc> w;  // per bin, dim I * taps
  int ref_channel = 0;
  int taps = 1;
  std::vector<int> flagged_bins;  // degenerate solves

  int num_bins() const { return static_cast<int>(w.size()); }
};

struct SteeringVector {
  std::vector<VectorXc> d;  // unit norm per bin
  std::vector<int> fallback_bins;
};

struct BinGain {
  std::vector<double> gain;
  std::vector<int> flagged_bins;
};

// Mask-weighted spatial covariance: phi(f) = sum_t m(t,f) x x^H / mass.
// A bin whose mask is identically zero falls back to eps * Id and is
// flagged. Restricting to a frame range implements context dropping.
SpatialCovariance scm_from_mask(const Spectrogram& s, const TfMask& mask,
                                int frame_begin = 0, int frame_end = -1);

// Tap-stacked variant over frames [x(t); x(t-1); ...; x(t-taps+1)].
SpatialCovariance scm_from_mask_stacked(const Spectrogram& s, const TfMask& mask, int taps,
                                        int frame_begin = 0, int frame_end = -1);

// Souden-style MVDR: w = (phi_n^-1 phi_s / trace) e_ref, with relative
// diagonal loading on phi_n. Zero-trace bins fall back to e_ref.
BeamformerWeights mvdr_souden(const SpatialCovariance& phi_s, const SpatialCovariance& phi_n,
                              int ref_channel);

// Highest posterior-SNR candidate, ties toward the lower index.
int select_reference_channel(const SpatialCovariance& phi_s, const SpatialCovariance& phi_n);

// y(t,f) = w(f)^H x(t,f), with tap stacking when wts.taps > 1.
Spectrogram apply_beamformer(const BeamformerWeights& wts, const Spectrogram& s);

// Blind analytical normalization gain (CBAN for stacked statistics):
// g = sqrt(w^H Phi Phi w / (I L)) / (w^H Phi w); undefined denominators
// give g = 1 and a flag.
BinGain ban_gain(const BeamformerWeights& wts, const SpatialCovariance& phi_n);

Spectrogram apply_bin_gain(const Spectrogram& s, const std::vector<double>& gain);

// Principal eigenvector of the rank-one SCM formed from the correlation
// r(f) = sum_t x(t,f) conj(y(t,f)); phase-normalized so the reference
// entry is real non-negative. Empty bins fall back to e_ref.
SteeringVector steering_from_beamformed(const Spectrogram& s_multichannel,
                                        const Spectrogram& y_beamformed, int ref_channel,
                                        int frame_begin = 0, int frame_end = -1);

// Rank-one-speech multichannel Wiener filter over tap-stacked statistics:
// w = phi_s_psd * PhiN^-1 dbar / (1 + phi_s_psd * dbar^H PhiN^-1 dbar)
// with dbar = [d; 0; ...; 0].
BeamformerWeights cwmwf(const SteeringVector& d, const SpatialCovariance& phi_n_stacked,
                        int taps, const std::vector<double>& phi_s_psd);

// y_pf(t,f) = m(t,f) * y(t,f); no flooring.
Spectrogram mask_postfilter(const Spectrogram& y, const TfMask& mask);

// Scales by 1/max|s| only when the peak exceeds one.
Waveform peak_normalize(const Waveform& w);

// Ratio masks from externally supplied per-channel speech estimates:
// noise is mix - estimate, masks are per-channel power ratios averaged
// over channels; speech and noise masks sum to one pointwise.
std::pair<TfMask, TfMask> masks_from_speech_estimates(const Spectrogram& mix,
                                                      const Spectrogram& est);

}  // namespace dsr

#endif  // DSR_BEAMFORM_H_
