#include "invgan/group.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace invgan {

namespace {

double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Index of the element nearest to m (entrywise max norm) and its distance.
std::pair<std::size_t, double> nearest(const std::vector<GroupElement>& els, const Mat& m) {
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < els.size(); ++i) {
    const double err = max_abs_diff(els[i].matrix, m);
    if (err < best_err) {
      best_err = err;
      best = i;
    }
  }
  return {best, best_err};
}

void validate_action(const GroupElement& e, int dim) {
  if (e.matrix.rows() != dim || e.matrix.cols() != dim)
    throw std::invalid_argument("group element '" + e.label + "' has wrong shape");
  if (std::abs(e.matrix.determinant()) < 1e-12)
    throw std::invalid_argument("group element '" + e.label + "' is not invertible");
  if (operator_norm(e.matrix) > 1.0 + kMatchTol)
    throw std::invalid_argument("group element '" + e.label + "' is not 1-Lipschitz");
}

}  // namespace

double operator_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

Mat FiniteGroup::average_matrix() const {
  Mat avg = Mat::Zero(dim_, dim_);
  for (const auto& e : elements_) avg += e.matrix;
  return avg / static_cast<double>(order());
}

void FiniteGroup::build_tables(bool require_closure) {
  const std::size_t n = elements_.size();
  if (n == 0) throw std::invalid_argument("empty element list");
  dim_ = static_cast<int>(elements_.front().matrix.rows());

  orthogonal_ = true;
  for (const auto& e : elements_) {
    const Mat gram = e.matrix.transpose() * e.matrix;
    if (max_abs_diff(gram, Mat::Identity(dim_, dim_)) > kMatchTol) orthogonal_ = false;
  }

  auto [id, id_err] = nearest(elements_, Mat::Identity(dim_, dim_));
  if (require_closure && id_err > kMatchTol) throw NotAGroupError("no identity element");
  identity_ = id;

  cayley_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto [k, err] = nearest(elements_, elements_[i].matrix * elements_[j].matrix);
      if (require_closure && err > kMatchTol)
        throw NotAGroupError("product " + elements_[i].label + "*" + elements_[j].label +
                             " is not in the set");
      cayley_[i * n + j] = k;
    }
  }

  inverse_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    bool found = false;
    for (std::size_t k = 0; k < n && !found; ++k) {
      if (cayley_[i * n + k] == identity_) {
        inverse_[i] = k;
        found = true;
      }
    }
    if (!found) {
      if (require_closure) throw NotAGroupError("element " + elements_[i].label + " has no inverse");
      inverse_[i] = nearest(elements_, elements_[i].matrix.inverse()).first;
    }
  }
}

FiniteGroup FiniteGroup::from_elements(std::vector<GroupElement> elements) {
  if (elements.empty()) throw std::invalid_argument("empty element list");
  const int dim = static_cast<int>(elements.front().matrix.rows());
  for (const auto& e : elements) validate_action(e, dim);
  FiniteGroup g;
  g.elements_ = std::move(elements);
  g.build_tables(true);
  g.descriptor_ = "explicit:" + std::to_string(g.order());
  return g;
}

FiniteGroup FiniteGroup::unchecked(std::vector<GroupElement> elements) {
  FiniteGroup g;
  g.elements_ = std::move(elements);
  g.build_tables(false);
  g.descriptor_ = "unchecked:" + std::to_string(g.order());
  return g;
}

FiniteGroup FiniteGroup::generate(int dim, const std::vector<GroupElement>& generators,
                                  std::size_t max_order) {
  for (const auto& gen : generators) validate_action(gen, dim);
  std::vector<GroupElement> els{{Mat::Identity(dim, dim), "e"}};
  for (std::size_t head = 0; head < els.size(); ++head) {
    for (const auto& gen : generators) {
      Mat prod = els[head].matrix * gen.matrix;
      if (nearest(els, prod).second <= kMatchTol) continue;
      if (els.size() >= max_order) throw NotAGroupError("closure exceeds the element cap");
      std::string label = els[head].label == "e" ? gen.label : els[head].label + "*" + gen.label;
      els.push_back({std::move(prod), std::move(label)});
    }
  }
  return from_elements(std::move(els));
}

FiniteGroup make_trivial_group(int dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  FiniteGroup g = FiniteGroup::from_elements({{Mat::Identity(dim, dim), "e"}});
  g.set_descriptor("trivial");
  return g;
}

FiniteGroup make_cyclic_rotation_group(int k, int dim, int axis_a, int axis_b) {
  if (k < 1) throw std::invalid_argument("cyclic group order must be >= 1");
  if (dim < 2) throw std::invalid_argument("rotation groups need dim >= 2");
  if (axis_a == axis_b || axis_a < 0 || axis_b < 0 || axis_a >= dim || axis_b >= dim)
    throw std::invalid_argument("invalid rotation plane");
  std::vector<GroupElement> els;
  for (int j = 0; j < k; ++j) {
    const double t = 2.0 * std::numbers::pi * j / k;
    Mat m = Mat::Identity(dim, dim);
    // Snap exact multiples of pi/2 so that C_4 contains the integer matrices.
    auto snap = [](double v) { return std::abs(v) < 1e-15 ? 0.0 : v; };
    const double c = snap(std::cos(t)), s = snap(std::sin(t));
    m(axis_a, axis_a) = c;
    m(axis_a, axis_b) = -s;
    m(axis_b, axis_a) = s;
    m(axis_b, axis_b) = c;
    els.push_back({std::move(m), j == 0 ? "e" : "rot" + std::to_string(j) + "/" + std::to_string(k)});
  }
  FiniteGroup g = FiniteGroup::from_elements(std::move(els));
  g.set_descriptor("cyclic:" + std::to_string(k));
  return g;
}

FiniteGroup make_reflection_group(int axis, int dim) {
  if (axis < 0 || axis >= dim) throw std::invalid_argument("reflection axis out of range");
  Mat r = Mat::Identity(dim, dim);
  r(axis, axis) = -1.0;
  FiniteGroup g = FiniteGroup::from_elements({{Mat::Identity(dim, dim), "e"}, {r, "mirror" + std::to_string(axis)}});
  g.set_descriptor("reflection:" + std::to_string(axis));
  return g;
}

FiniteGroup make_product_group(const FiniteGroup& g, const FiniteGroup& h) {
  if (g.dim() != h.dim()) throw std::invalid_argument("groups act on different dimensions");
  std::vector<GroupElement> els;
  for (const auto& a : g.elements()) {
    for (const auto& b : h.elements()) {
      Mat prod = a.matrix * b.matrix;
      bool dup = false;
      for (const auto& e : els) {
        if (max_abs_diff(e.matrix, prod) <= kMatchTol) {
          dup = true;
          break;
        }
      }
      if (dup) continue;
      std::string label = a.label == "e" ? b.label : (b.label == "e" ? a.label : a.label + "*" + b.label);
      els.push_back({std::move(prod), std::move(label)});
    }
  }
  FiniteGroup p = FiniteGroup::from_elements(std::move(els));
  p.set_descriptor("product(" + g.descriptor() + "," + h.descriptor() + ")");
  return p;
}

FiniteGroup group_from_descriptor(const std::string& desc, int dim) {
  const auto colon = desc.find(':');
  const std::string kind = desc.substr(0, colon);
  int arg = 0;
  if (colon != std::string::npos) {
    const std::string rest = desc.substr(colon + 1);
    std::size_t used = 0;
    try {
      arg = std::stoi(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rest.size()) throw std::invalid_argument("bad group descriptor '" + desc + "'");
  }
  if (kind == "trivial" && colon == std::string::npos) return make_trivial_group(dim);
  if (kind == "cyclic" && colon != std::string::npos) return make_cyclic_rotation_group(arg, dim);
  if (kind == "reflection" && colon != std::string::npos) return make_reflection_group(arg, dim);
  if (kind == "dihedral" && colon != std::string::npos) {
    FiniteGroup g = make_product_group(make_cyclic_rotation_group(arg, dim), make_reflection_group(1, dim));
    g.set_descriptor(desc);
    return g;
  }
  throw std::invalid_argument("unknown group descriptor '" + desc + "'");
}

AxiomReport verify_group_axioms(const FiniteGroup& g) {
  AxiomReport rep;
  const std::size_t n = g.order();
  const int d = g.dim();
  auto note = [&rep](bool& flag, double err, const std::string& what) {
    rep.worst_error = std::max(rep.worst_error, err);
    if (err > kMatchTol) {
      if (flag) rep.violations.push_back(what + " (error " + std::to_string(err) + ")");
      flag = false;
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = g.product(i, j);
      const double err = k < n ? max_abs_diff(g.element(i).matrix * g.element(j).matrix, g.element(k).matrix)
                               : std::numeric_limits<double>::infinity();
      note(rep.closure, err, "closure fails at " + g.element(i).label + "*" + g.element(j).label);
    }
  }

  const auto& e = g.element(g.identity_index());
  note(rep.identity, max_abs_diff(e.matrix, Mat::Identity(d, d)), "identity matrix mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (g.product(g.identity_index(), i) != i || g.product(i, g.identity_index()) != i)
      note(rep.identity, std::numeric_limits<double>::infinity(), "identity table row/column wrong at " + g.element(i).label);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t inv = g.inverse(i);
    double err = max_abs_diff(g.element(i).matrix * g.element(inv).matrix, Mat::Identity(d, d));
    if (g.product(i, inv) != g.identity_index() || g.product(inv, i) != g.identity_index())
      err = std::numeric_limits<double>::infinity();
    note(rep.inverses, err, "inverse of " + g.element(i).label);
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (g.product(g.product(i, j), k) != g.product(i, g.product(j, k))) {
          note(rep.associativity, std::numeric_limits<double>::infinity(),
               "associativity fails at (" + g.element(i).label + "," + g.element(j).label + "," +
                   g.element(k).label + ")");
        }
      }
  return rep;
}

std::size_t haar_sample_index(const FiniteGroup& g, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, g.order() - 1);
  return pick(rng);
}

const GroupElement& haar_sample(const FiniteGroup& g, Rng& rng) { return g.element(haar_sample_index(g, rng)); }

Vec apply(const GroupElement& e, const Vec& x) {
  if (x.size() != e.matrix.cols()) throw std::invalid_argument("point dimension does not match group");
  return e.matrix * x;
}

std::vector<Vec> orbit(const FiniteGroup& g, const Vec& x) {
  std::vector<Vec> out;
  out.reserve(g.order());
  for (const auto& e : g.elements()) out.push_back(apply(e, x));
  return out;
}

Cloud orbit_cloud(const FiniteGroup& g, const Cloud& points) {
  if (points.rows() != g.dim()) throw std::invalid_argument("point dimension does not match group");
  const Eigen::Index n = points.cols();
  Cloud out(points.rows(), n * static_cast<Eigen::Index>(g.order()));
  for (std::size_t i = 0; i < g.order(); ++i)
    out.middleCols(static_cast<Eigen::Index>(i) * n, n) = g.element(i).matrix * points;
  return out;
}

}  // namespace invgan
