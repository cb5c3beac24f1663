// src/beamform.cc

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

#include "dsr/beamform.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dsr {

namespace {

constexpr double kLoading = 1e-8;
constexpr double kScmEps = 1e-10;
constexpr double kMassFloor = 1e-10;

void check_mask_shape(const Spectrogram& s, const TfMask& mask, const char* who) {
  if (mask.rows() != s.num_frames() || mask.cols() != s.num_bins())
    throw std::invalid_argument(std::string(who) + ": mask shape does not match (frames x bins)");
}

std::pair<int, int> resolve_range(const Spectrogram& s, int frame_begin, int frame_end,
                                  const char* who) {
  if (frame_end < 0) frame_end = s.num_frames();
  if (frame_begin < 0 || frame_begin >= frame_end || frame_end > s.num_frames())
    throw std::invalid_argument(std::string(who) + ": bad frame range");
  return {frame_begin, frame_end};
}

VectorXc stacked_column(const Spectrogram& s, int t, int f, int taps) {
  const int num_ch = s.num_channels();
  VectorXc v = VectorXc::Zero(static_cast<long>(num_ch) * taps);
  for (int j = 0; j < taps; ++j) {
    const int src = t - j;
    if (src < 0) break;
    for (int c = 0; c < num_ch; ++c) v(j * num_ch + c) = s.at(c, src, f);
  }
  return v;
}

std::vector<int> collect_flags(const std::vector<std::uint8_t>& flagged) {
  std::vector<int> out;
  for (std::size_t f = 0; f < flagged.size(); ++f)
    if (flagged[f]) out.push_back(static_cast<int>(f));
  return out;
}

SpatialCovariance scm_impl(const Spectrogram& s, const TfMask& mask, int taps,
                           int frame_begin, int frame_end) {
  check_mask_shape(s, mask, "scm_from_mask");
  std::tie(frame_begin, frame_end) = resolve_range(s, frame_begin, frame_end, "scm_from_mask");
  const int bins = s.num_bins();
  const int dim = s.num_channels() * taps;

  SpatialCovariance out;
  out.phi.resize(bins);
  out.mass.resize(bins);
  std::vector<std::uint8_t> flagged(bins, 0);

#pragma omp parallel for schedule(static)
  for (int f = 0; f < bins; ++f) {
    MatrixXc acc = MatrixXc::Zero(dim, dim);
    double mass = 0.0;
    for (int t = frame_begin; t < frame_end; ++t) {
      const double m = mask(t, f);
      if (m == 0.0) continue;
      const VectorXc x =
          taps == 1 ? [&] {
            VectorXc v(dim);
            for (int c = 0; c < dim; ++c) v(c) = s.at(c, t, f);
            return v;
          }()
                    : stacked_column(s, t, f, taps);
      acc.noalias() += m * (x * x.adjoint());
      mass += m;
    }
    out.mass[f] = mass;
    if (mass == 0.0) {
      out.phi[f] = kScmEps * MatrixXc::Identity(dim, dim);
      flagged[f] = 1;
    } else {
      out.phi[f] = hermitize(acc / std::max(mass, kMassFloor));
    }
  }
  out.fallback_bins = collect_flags(flagged);
  return out;
}

// column ref of phi_n^-1 phi_s / trace, shared by MVDR and the reference
// search; returns false on a degenerate bin
bool souden_matrix(const MatrixXc& phi_s, const MatrixXc& phi_n, MatrixXc* out) {
  const int dim = static_cast<int>(phi_s.rows());
  MatrixXc loaded = phi_n;
  const double tr_n = loaded.trace().real();
  if (tr_n <= 0.0) return false;
  loaded.diagonal().array() += kLoading * tr_n / dim;
  Eigen::LLT<MatrixXc> llt(loaded);
  if (llt.info() != Eigen::Success) return false;
  MatrixXc m = llt.solve(phi_s);
  const Cplx tr = m.trace();
  if (std::abs(tr) < 1e-12) return false;
  *out = m / tr;
  return true;
}

}  // namespace

SpatialCovariance scm_from_mask(const Spectrogram& s, const TfMask& mask, int frame_begin,
                                int frame_end) {
  return scm_impl(s, mask, 1, frame_begin, frame_end);
}

SpatialCovariance scm_from_mask_stacked(const Spectrogram& s, const TfMask& mask, int taps,
                                        int frame_begin, int frame_end) {
  if (taps < 1) throw std::invalid_argument("scm_from_mask_stacked: taps must be >= 1");
  return scm_impl(s, mask, taps, frame_begin, frame_end);
}

BeamformerWeights mvdr_souden(const SpatialCovariance& phi_s, const SpatialCovariance& phi_n,
                              int ref_channel) {
  const int bins = phi_s.num_bins();
  const int dim = phi_s.dim();
  if (phi_n.num_bins() != bins || phi_n.dim() != dim)
    throw std::invalid_argument("mvdr_souden: covariance shapes differ");
  if (ref_channel < 0 || ref_channel >= dim)
    throw std::invalid_argument("mvdr_souden: reference channel out of range");

  BeamformerWeights out;
  out.ref_channel = ref_channel;
  out.taps = 1;
  out.w.resize(bins);
  std::vector<std::uint8_t> flagged(bins, 0);
#pragma omp parallel for schedule(static)
  for (int f = 0; f < bins; ++f) {
    MatrixXc m;
    if (souden_matrix(phi_s.phi[f], phi_n.phi[f], &m)) {
      out.w[f] = m.col(ref_channel);
    } else {
      out.w[f] = VectorXc::Unit(dim, ref_channel);
      flagged[f] = 1;
    }
  }
  out.flagged_bins = collect_flags(flagged);
  return out;
}

int select_reference_channel(const SpatialCovariance& phi_s, const SpatialCovariance& phi_n) {
  const int bins = phi_s.num_bins();
  const int dim = phi_s.dim();
  if (dim == 1) return 0;

  std::vector<double> snr(dim, 0.0);
  for (int f = 0; f < bins; ++f) {
    MatrixXc m;
    if (!souden_matrix(phi_s.phi[f], phi_n.phi[f], &m)) continue;
    for (int i = 0; i < dim; ++i) {
      const VectorXc w = m.col(i);
      const double num = std::real(w.dot(phi_s.phi[f] * w));
      const double den = std::real(w.dot(phi_n.phi[f] * w));
      if (den > 1e-12) snr[i] += num / den;
    }
  }
  int best = 0;
  for (int i = 1; i < dim; ++i)
    if (snr[i] > snr[best]) best = i;
  return best;
}

Spectrogram apply_beamformer(const BeamformerWeights& wts, const Spectrogram& s) {
  const int bins = s.num_bins();
  const int frames = s.num_frames();
  if (wts.num_bins() != bins)
    throw std::invalid_argument("apply_beamformer: weight/bin count mismatch");
  if (!wts.w.empty() &&
      wts.w[0].size() != static_cast<long>(s.num_channels()) * wts.taps)
    throw std::invalid_argument("apply_beamformer: weight dimension mismatch");

  Spectrogram out(1, frames, bins, s.config(), s.sample_rate());
#pragma omp parallel for schedule(static)
  for (int f = 0; f < bins; ++f) {
    for (int t = 0; t < frames; ++t) {
      VectorXc x;
      if (wts.taps == 1) {
        x.resize(s.num_channels());
        for (int c = 0; c < s.num_channels(); ++c) x(c) = s.at(c, t, f);
      } else {
        x = stacked_column(s, t, f, wts.taps);
      }
      out.at(0, t, f) = wts.w[f].dot(x);  // w^H x
    }
  }
  return out;
}

BinGain ban_gain(const BeamformerWeights& wts, const SpatialCovariance& phi_n) {
  const int bins = phi_n.num_bins();
  if (wts.num_bins() != bins) throw std::invalid_argument("ban_gain: bin count mismatch");
  if (!wts.w.empty() && wts.w[0].size() != phi_n.dim())
    throw std::invalid_argument("ban_gain: dimension mismatch");
  const double dim = phi_n.dim();

  BinGain out;
  out.gain.assign(bins, 1.0);
  std::vector<std::uint8_t> flagged(bins, 0);
  for (int f = 0; f < bins; ++f) {
    const VectorXc& w = wts.w[f];
    const VectorXc pw = phi_n.phi[f] * w;
    const double denom = std::real(w.dot(pw));
    if (denom < 1e-12) {
      flagged[f] = 1;
      continue;
    }
    out.gain[f] = std::sqrt(std::real(pw.dot(pw)) / dim) / denom;
  }
  out.flagged_bins = collect_flags(flagged);
  return out;
}

Spectrogram apply_bin_gain(const Spectrogram& s, const std::vector<double>& gain) {
  if (static_cast<int>(gain.size()) != s.num_bins())
    throw std::invalid_argument("apply_bin_gain: gain/bin count mismatch");
  Spectrogram out = s;
  for (int c = 0; c < s.num_channels(); ++c)
    for (int t = 0; t < s.num_frames(); ++t)
      for (int f = 0; f < s.num_bins(); ++f) out.at(c, t, f) *= gain[f];
  return out;
}

SteeringVector steering_from_beamformed(const Spectrogram& s_multichannel,
                                        const Spectrogram& y_beamformed, int ref_channel,
                                        int frame_begin, int frame_end) {
  const int bins = s_multichannel.num_bins();
  const int num_ch = s_multichannel.num_channels();
  if (y_beamformed.num_channels() != 1 || y_beamformed.num_bins() != bins ||
      y_beamformed.num_frames() != s_multichannel.num_frames())
    throw std::invalid_argument("steering_from_beamformed: shape mismatch");
  if (ref_channel < 0 || ref_channel >= num_ch)
    throw std::invalid_argument("steering_from_beamformed: reference channel out of range");
  std::tie(frame_begin, frame_end) =
      resolve_range(s_multichannel, frame_begin, frame_end, "steering_from_beamformed");

  SteeringVector out;
  out.d.resize(bins);
  std::vector<std::uint8_t> flagged(bins, 0);
#pragma omp parallel for schedule(static)
  for (int f = 0; f < bins; ++f) {
    VectorXc r = VectorXc::Zero(num_ch);
    for (int t = frame_begin; t < frame_end; ++t) {
      const Cplx y = std::conj(y_beamformed.at(0, t, f));
      for (int c = 0; c < num_ch; ++c) r(c) += s_multichannel.at(c, t, f) * y;
    }
    const double norm = r.norm();
    if (norm < 1e-12) {
      out.d[f] = VectorXc::Unit(num_ch, ref_channel);
      flagged[f] = 1;
      continue;
    }
    r /= norm;
    // rotate so the reference entry is real non-negative
    const Cplx ref = r(ref_channel);
    if (std::abs(ref) > 0.0) r *= std::conj(ref) / std::abs(ref);
    out.d[f] = r;
  }
  out.fallback_bins = collect_flags(flagged);
  return out;
}

BeamformerWeights cwmwf(const SteeringVector& d, const SpatialCovariance& phi_n_stacked,
                        int taps, const std::vector<double>& phi_s_psd) {
  const int bins = static_cast<int>(d.d.size());
  if (phi_n_stacked.num_bins() != bins || static_cast<int>(phi_s_psd.size()) != bins)
    throw std::invalid_argument("cwmwf: bin count mismatch");
  if (taps < 1) throw std::invalid_argument("cwmwf: taps must be >= 1");
  const int num_ch = static_cast<int>(d.d.empty() ? 0 : d.d[0].size());
  const int dim = num_ch * taps;
  if (phi_n_stacked.dim() != dim)
    throw std::invalid_argument("cwmwf: stacked covariance dimension mismatch");

  BeamformerWeights out;
  out.taps = taps;
  out.ref_channel = 0;
  out.w.resize(bins);
  std::vector<std::uint8_t> flagged(bins, 0);
#pragma omp parallel for schedule(static)
  for (int f = 0; f < bins; ++f) {
    VectorXc dbar = VectorXc::Zero(dim);
    dbar.head(num_ch) = d.d[f];
    MatrixXc loaded = phi_n_stacked.phi[f];
    const double tr = loaded.trace().real();
    if (tr <= 0.0) {
      out.w[f] = dbar;
      flagged[f] = 1;
      continue;
    }
    loaded.diagonal().array() += kLoading * tr / dim;
    Eigen::LLT<MatrixXc> llt(loaded);
    if (llt.info() != Eigen::Success) {
      out.w[f] = dbar;
      flagged[f] = 1;
      continue;
    }
    const VectorXc u = llt.solve(dbar);
    const double psd = phi_s_psd[f];
    const double denom = 1.0 + psd * std::real(dbar.dot(u));
    out.w[f] = (psd / denom) * u;
  }
  out.flagged_bins = collect_flags(flagged);
  return out;
}

Spectrogram mask_postfilter(const Spectrogram& y, const TfMask& mask) {
  if (y.num_channels() != 1)
    throw std::invalid_argument("mask_postfilter: expects a single-channel spectrogram");
  check_mask_shape(y, mask, "mask_postfilter");
  Spectrogram out = y;
  for (int t = 0; t < y.num_frames(); ++t)
    for (int f = 0; f < y.num_bins(); ++f) out.at(0, t, f) *= mask(t, f);
  return out;
}

Waveform peak_normalize(const Waveform& w) {
  double peak = 0.0;
  for (double s : w.samples) peak = std::max(peak, std::abs(s));
  if (peak <= 1.0) return w;
  Waveform out = w;
  const double scale = 1.0 / peak;
  for (auto& s : out.samples) s *= scale;
  return out;
}

std::pair<TfMask, TfMask> masks_from_speech_estimates(const Spectrogram& mix,
                                                      const Spectrogram& est) {
  if (mix.num_channels() != est.num_channels() || mix.num_frames() != est.num_frames() ||
      mix.num_bins() != est.num_bins())
    throw std::invalid_argument("masks_from_speech_estimates: shape mismatch");
  const int num_ch = mix.num_channels();
  const double eps = 1e-10;

  TfMask speech = TfMask::Zero(mix.num_frames(), mix.num_bins());
  TfMask noise = TfMask::Zero(mix.num_frames(), mix.num_bins());
  for (int c = 0; c < num_ch; ++c)
    for (int t = 0; t < mix.num_frames(); ++t)
      for (int f = 0; f < mix.num_bins(); ++f) {
        const double ps = std::norm(est.at(c, t, f));
        const double pn = std::norm(mix.at(c, t, f) - est.at(c, t, f));
        // the epsilon is split so the two masks sum to one exactly
        speech(t, f) += (ps + 0.5 * eps) / (ps + pn + eps);
        noise(t, f) += (pn + 0.5 * eps) / (ps + pn + eps);
      }
  speech /= num_ch;
  noise /= num_ch;
  return {speech, noise};
}

}  // namespace dsr
