#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::parallel`; both
// evaluate each output entry with the same arithmetic so their results are
// bitwise identical. The unqualified names dispatch to the parallel version.

#include "invgan/types.hpp"

#include <cmath>
#include <cstddef>

namespace invgan::kernels {

inline double euclid(const double* a, const double* b, Eigen::Index d) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return std::sqrt(s);
}

struct ArgMax {
  Eigen::Index index = -1;
  double value = -1.0;
};

// Larger value wins; equal values resolve to the smaller index.
inline ArgMax better(const ArgMax& a, const ArgMax& b) {
  if (a.index < 0) return b;
  if (b.index < 0) return a;
  if (b.value > a.value || (b.value == a.value && b.index < a.index)) return b;
  return a;
}

namespace serial {

/// out(i, j) = |a_i - b_j|.
void pairwise_distance(const Cloud& a, const Cloud& b, Mat& out);

/// out(i, j) = min over blocks k of |a_i - images_{k*m + j}|, where `images`
/// holds `blocks` consecutive copies of an m-point cloud (an orbit cloud).
void blockwise_min_distance(const Cloud& a, const Cloud& images, Eigen::Index blocks, Mat& out);

/// min_dist_i <- min(min_dist_i, |p_i - center|); returns the arg max of the
/// updated array.
ArgMax relax_and_argmax(const Cloud& points, const Vec& center, Vec& min_dist);

}  // namespace serial

namespace parallel {

void pairwise_distance(const Cloud& a, const Cloud& b, Mat& out);
void blockwise_min_distance(const Cloud& a, const Cloud& images, Eigen::Index blocks, Mat& out);
ArgMax relax_and_argmax(const Cloud& points, const Vec& center, Vec& min_dist);

}  // namespace parallel

using parallel::blockwise_min_distance;
using parallel::pairwise_distance;
using parallel::relax_and_argmax;

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace invgan::kernels
