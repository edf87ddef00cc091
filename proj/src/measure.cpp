#include "invgan/measure.hpp"

#include "invgan/format.hpp"
#include "invgan/spatial_grid.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace invgan {

namespace {

double compensated_sum(const Vec& w) {
  double s = 0.0, c = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double y = w(i) - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(Cloud points, Vec weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.cols() != weights_.size()) throw std::invalid_argument("point and weight counts differ");
  if (points_.cols() == 0) throw std::invalid_argument("empty measure");
  if ((weights_.array() < 0.0).any()) throw std::invalid_argument("negative weight");
  if (std::abs(compensated_sum(weights_) - 1.0) > 1e-12) throw std::invalid_argument("weights do not sum to 1");
}

EmpiricalMeasure EmpiricalMeasure::uniform(Cloud points) {
  const Eigen::Index n = points.cols();
  if (n == 0) throw std::invalid_argument("empty measure");
  return EmpiricalMeasure(std::move(points), Vec::Constant(n, 1.0 / static_cast<double>(n)));
}

bool EmpiricalMeasure::is_uniform() const {
  const double w = 1.0 / static_cast<double>(size());
  return (weights_.array() == w).all();
}

double EmpiricalMeasure::expect(const ScalarFn& f) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < size(); ++i) s += weights_(i) * f(points_.col(i));
  return s;
}

EmpiricalMeasure merge_duplicates(const EmpiricalMeasure& mu, double tol) {
  SpatialGrid grid(mu.dim(), tol);
  const Cloud& p = mu.points();
  std::vector<Eigen::Index> reps;  // slot -> representative point index
  std::vector<double> w;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    Eigen::Index hit = -1;
    grid.visit_neighbors(p.col(i).data(), [&](Eigen::Index slot) {
      if ((p.col(reps[static_cast<std::size_t>(slot)]) - p.col(i)).norm() <= tol) {
        hit = slot;
        return true;
      }
      return false;
    });
    if (hit >= 0) {
      w[static_cast<std::size_t>(hit)] += mu.weight(i);
    } else {
      grid.insert(p.col(i).data(), static_cast<Eigen::Index>(reps.size()));
      reps.push_back(i);
      w.push_back(mu.weight(i));
    }
  }
  Cloud out(mu.dim(), static_cast<Eigen::Index>(reps.size()));
  Vec ow(static_cast<Eigen::Index>(reps.size()));
  for (std::size_t k = 0; k < reps.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = p.col(reps[k]);
    ow(static_cast<Eigen::Index>(k)) = w[k];
  }
  return EmpiricalMeasure(std::move(out), std::move(ow));
}

bool approx_equal(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double tol) {
  if (a.dim() != b.dim()) return false;
  const EmpiricalMeasure ma = merge_duplicates(a, tol);
  const EmpiricalMeasure mb = merge_duplicates(b, tol);
  if (ma.size() != mb.size()) return false;
  SpatialGrid grid(mb.dim(), tol);
  grid.insert_all(mb.points());
  std::vector<char> used(static_cast<std::size_t>(mb.size()), 0);
  for (Eigen::Index i = 0; i < ma.size(); ++i) {
    bool matched = false;
    grid.visit_neighbors(ma.points().col(i).data(), [&](Eigen::Index j) {
      if (!used[j] && (mb.points().col(j) - ma.points().col(i)).norm() <= tol &&
          std::abs(mb.weight(j) - ma.weight(i)) <= tol) {
        used[j] = 1;
        matched = true;
        return true;
      }
      return false;
    });
    if (!matched) return false;
  }
  return true;
}

EmpiricalMeasure transform(const GroupElement& e, const EmpiricalMeasure& mu) {
  if (e.matrix.cols() != mu.dim()) throw std::invalid_argument("point dimension does not match group");
  return EmpiricalMeasure(e.matrix * mu.points(), mu.weights());
}

EmpiricalMeasure symmetrize_measure(const FiniteGroup& g, const EmpiricalMeasure& mu) {
  const double k = static_cast<double>(g.order());
  Vec w(mu.size() * static_cast<Eigen::Index>(g.order()));
  for (std::size_t i = 0; i < g.order(); ++i) w.segment(static_cast<Eigen::Index>(i) * mu.size(), mu.size()) = mu.weights() / k;
  return merge_duplicates(EmpiricalMeasure(orbit_cloud(g, mu.points()), std::move(w)));
}

ScalarFn symmetrize_function(const FiniteGroup& g, ScalarFn f) {
  std::vector<Mat> mats;
  for (const auto& e : g.elements()) mats.push_back(e.matrix);
  return [mats = std::move(mats), f = std::move(f)](const Vec& x) {
    double s = 0.0;
    for (const auto& m : mats) s += f(m * x);
    return s / static_cast<double>(mats.size());
  };
}

void write_measure_csv(std::ostream& os, const EmpiricalMeasure& mu) {
  for (int k = 0; k < mu.dim(); ++k) os << "x_" << (k + 1) << ',';
  os << "weight\n";
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    for (int k = 0; k < mu.dim(); ++k) os << fmt_double(mu.points()(k, i)) << ',';
    os << fmt_double(mu.weight(i)) << '\n';
  }
}

EmpiricalMeasure read_measure_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty measure CSV");
  const auto header = split_csv(line);
  if (header.empty()) throw std::invalid_argument("empty CSV header");
  const bool has_weight = header.back() == "weight";
  const int d = static_cast<int>(header.size()) - (has_weight ? 1 : 0);
  for (int k = 0; k < d; ++k)
    if (header[static_cast<std::size_t>(k)] != "x_" + std::to_string(k + 1))
      throw std::invalid_argument("unexpected CSV column '" + header[static_cast<std::size_t>(k)] + "'");

  std::vector<double> coords, weights;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw std::invalid_argument("ragged CSV row: " + line);
    for (int k = 0; k < d; ++k) coords.push_back(parse_double(cells[static_cast<std::size_t>(k)]));
    if (has_weight) weights.push_back(parse_double(cells.back()));
  }
  const Eigen::Index n = static_cast<Eigen::Index>(coords.size()) / d;
  Cloud pts = Eigen::Map<Cloud>(coords.data(), d, n);
  if (!has_weight) return EmpiricalMeasure::uniform(std::move(pts));
  return EmpiricalMeasure(std::move(pts), Eigen::Map<Vec>(weights.data(), n));
}

}  // namespace invgan
