#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "qpbeam/fourier.hpp"
#include "qpbeam/frequency_vector.hpp"

namespace qt {

using qpbeam::cplx;
using qpbeam::FourierField;
using qpbeam::ModeIndex;

inline qpbeam::FrequencyVector golden() {
  return qpbeam::FrequencyVector::normalized({1.0, 0.5 * (std::sqrt(5.0) - 1.0)});
}

inline FourierField modes(std::vector<std::pair<ModeIndex, cplx>> m, int nu, int d, int cutoff) {
  return qpbeam::field_from_modes(m, nu, d, qpbeam::TruncationBox{cutoff, 2});
}

// cos(k.phi + j.x)
inline FourierField cosine(std::vector<int> k, std::vector<int> j, int cutoff) {
  const int nu = static_cast<int>(k.size());
  const int d = static_cast<int>(j.size());
  std::vector<int> mk = k, mj = j;
  for (int& x : mk) x = -x;
  for (int& x : mj) x = -x;
  return modes({{ModeIndex{k, j}, 0.5}, {ModeIndex{mk, mj}, 0.5}}, nu, d, cutoff);
}

// cos(phi_1) cos(x_1) with nu = 2, d = 1
inline FourierField cos_cos(int cutoff) {
  return modes({{ModeIndex{{1, 0}, {1}}, 0.25}, {ModeIndex{{1, 0}, {-1}}, 0.25}}, 2, 1, cutoff);
}

inline double max_diff(const FourierField& a, const FourierField& b) {
  const int n = std::max(a.cutoff(), b.cutoff());
  return (qpbeam::rebox(a, n) - qpbeam::rebox(b, n)).max_abs();
}

}  // namespace qt
