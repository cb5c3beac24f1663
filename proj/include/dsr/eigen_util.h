// include/dsr/eigen_util.h

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

#ifndef DSR_EIGEN_UTIL_H_
#define DSR_EIGEN_UTIL_H_

#include <Eigen/Dense>
#include <complex>

#include "dsr/stft.h"

namespace dsr {

using Cplx = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

// Channels-by-frames slice of one frequency bin.
inline MatrixXc bin_matrix(const Spectrogram& s, int k) {
  MatrixXc m(s.num_channels(), s.num_frames());
  for (int c = 0; c < s.num_channels(); ++c)
    for (int t = 0; t < s.num_frames(); ++t) m(c, t) = s.at(c, t, k);
  return m;
}

inline void set_bin_matrix(Spectrogram& s, int k, const MatrixXc& m) {
  for (int c = 0; c < s.num_channels(); ++c)
    for (int t = 0; t < s.num_frames(); ++t) s.at(c, t, k) = m(c, t);
}

inline MatrixXc hermitize(const MatrixXc& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace dsr

#endif  // DSR_EIGEN_UTIL_H_
