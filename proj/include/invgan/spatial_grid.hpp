#pragma once

#include "invgan/types.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace invgan {

/// Uniform-grid hash over the columns of a point cloud for fixed-radius
/// neighbor queries. Cells have side `cell`; a query with radius <= cell only
/// needs the 3^d surrounding cells.
class SpatialGrid {
 public:
  SpatialGrid(int dim, double cell) : dim_(dim), cell_(cell) {}

  void insert(const double* p, Eigen::Index id) { cells_[key(coords(p))].push_back(id); }

  void insert_all(const Cloud& pts) {
    for (Eigen::Index i = 0; i < pts.cols(); ++i) insert(pts.col(i).data(), i);
  }

  /// Calls f(id) for every stored id in the cells neighboring p. Stops early
  /// when f returns true; returns whether it stopped.
  template <class F>
  bool visit_neighbors(const double* p, F&& f) const {
    const std::vector<std::int64_t> c = coords(p);
    std::vector<std::int64_t> probe(c);
    std::vector<int> offs(dim_, -1);
    while (true) {
      for (int k = 0; k < dim_; ++k) probe[k] = c[k] + offs[k];
      auto it = cells_.find(key(probe));
      if (it != cells_.end())
        for (Eigen::Index id : it->second)
          if (f(id)) return true;
      int k = 0;
      while (k < dim_ && offs[k] == 1) offs[k++] = -1;
      if (k == dim_) break;
      ++offs[k];
    }
    return false;
  }

 private:
  std::vector<std::int64_t> coords(const double* p) const {
    std::vector<std::int64_t> c(dim_);
    for (int k = 0; k < dim_; ++k) c[k] = static_cast<std::int64_t>(std::floor(p[k] / cell_));
    return c;
  }

  static std::uint64_t key(const std::vector<std::int64_t>& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int64_t v : c) {
      h ^= static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

  int dim_;
  double cell_;
  // Hash collisions only add candidates; callers always test actual distance.
  std::unordered_map<std::uint64_t, std::vector<Eigen::Index>> cells_;
};

}  // namespace invgan
