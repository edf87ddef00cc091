#include "invgan/kernels.hpp"

#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace invgan::kernels {

namespace {

void check_dims(const Cloud& a, const Cloud& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("point clouds have different dimensions");
}

inline double block_min(const double* x, const Cloud& images, Eigen::Index j, Eigen::Index m, Eigen::Index blocks) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < blocks; ++k) {
    const double v = euclid(x, images.col(k * m + j).data(), images.rows());
    if (v < best) best = v;
  }
  return best;
}

}  // namespace

namespace serial {

void pairwise_distance(const Cloud& a, const Cloud& b, Mat& out) {
  check_dims(a, b);
  out.resize(a.cols(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < a.cols(); ++i) out(i, j) = euclid(a.col(i).data(), b.col(j).data(), a.rows());
}

void blockwise_min_distance(const Cloud& a, const Cloud& images, Eigen::Index blocks, Mat& out) {
  check_dims(a, images);
  const Eigen::Index m = images.cols() / blocks;
  out.resize(a.cols(), m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < a.cols(); ++i) out(i, j) = block_min(a.col(i).data(), images, j, m, blocks);
}

ArgMax relax_and_argmax(const Cloud& points, const Vec& center, Vec& min_dist) {
  ArgMax best;
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    const double v = euclid(points.col(i).data(), center.data(), points.rows());
    if (v < min_dist(i)) min_dist(i) = v;
    best = better(best, {i, min_dist(i)});
  }
  return best;
}

}  // namespace serial

namespace parallel {

void pairwise_distance(const Cloud& a, const Cloud& b, Mat& out) {
  check_dims(a, b);
  out.resize(a.cols(), b.cols());
  const Eigen::Index nb = b.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < nb; ++j)
    for (Eigen::Index i = 0; i < a.cols(); ++i) out(i, j) = euclid(a.col(i).data(), b.col(j).data(), a.rows());
}

void blockwise_min_distance(const Cloud& a, const Cloud& images, Eigen::Index blocks, Mat& out) {
  check_dims(a, images);
  const Eigen::Index m = images.cols() / blocks;
  out.resize(a.cols(), m);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < a.cols(); ++i) out(i, j) = block_min(a.col(i).data(), images, j, m, blocks);
}

ArgMax relax_and_argmax(const Cloud& points, const Vec& center, Vec& min_dist) {
  ArgMax best;
  const Eigen::Index n = points.cols();
#pragma omp parallel
  {
    ArgMax local;
#pragma omp for schedule(static) nowait
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = euclid(points.col(i).data(), center.data(), points.rows());
      if (v < min_dist(i)) min_dist(i) = v;
      local = better(local, {i, min_dist(i)});
    }
#pragma omp critical
    best = better(best, local);
  }
  return best;
}

}  // namespace parallel

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace invgan::kernels
