#pragma once

// Finite matrix groups acting linearly on R^d.

#include "invgan/rng.hpp"
#include "invgan/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace invgan {

struct GroupElement {
  Mat matrix;
  std::string label;
};

/// A finite group stored extensionally: every element matrix plus its Cayley
/// table, identity index and inverse table. Immutable after construction.
class FiniteGroup {
 public:
  /// Closes `generators` under multiplication (cap of `max_order` elements).
  /// Throws std::invalid_argument for non-invertible or expanding generators
  /// and NotAGroupError if the closure does not terminate below the cap.
  static FiniteGroup generate(int dim, const std::vector<GroupElement>& generators,
                              std::size_t max_order = 10000);

  /// Builds a group from an explicit element list. Throws NotAGroupError when
  /// the set is not closed or lacks identity/inverses.
  static FiniteGroup from_elements(std::vector<GroupElement> elements);

  /// Builds the tables by nearest-element lookup without validating them.
  /// Used to hand-construct broken sets for the axiom checker.
  static FiniteGroup unchecked(std::vector<GroupElement> elements);

  std::size_t order() const { return elements_.size(); }
  int dim() const { return dim_; }
  const GroupElement& element(std::size_t i) const { return elements_[i]; }
  const std::vector<GroupElement>& elements() const { return elements_; }
  std::size_t identity_index() const { return identity_; }
  std::size_t inverse(std::size_t i) const { return inverse_[i]; }
  std::size_t product(std::size_t i, std::size_t j) const { return cayley_[i * order() + j]; }
  const std::vector<std::size_t>& cayley() const { return cayley_; }
  bool is_orthogonal() const { return orthogonal_; }

  /// Short identifier such as "cyclic:4" used in checkpoints and summaries.
  const std::string& descriptor() const { return descriptor_; }
  void set_descriptor(std::string d) { descriptor_ = std::move(d); }

  /// Fault injection for verification tests: overwrite one Cayley entry.
  void corrupt_cayley_entry(std::size_t i, std::size_t j, std::size_t value) {
    cayley_[i * order() + j] = value;
  }

  /// (1/|G|) * sum of element matrices.
  Mat average_matrix() const;

 private:
  FiniteGroup() = default;
  void build_tables(bool require_closure);

  int dim_ = 0;
  std::vector<GroupElement> elements_;
  std::vector<std::size_t> cayley_;
  std::vector<std::size_t> inverse_;
  std::size_t identity_ = 0;
  bool orthogonal_ = true;
  std::string descriptor_;
};

FiniteGroup make_trivial_group(int dim);

/// C_k: rotations by 2*pi*j/k in the (axis_a, axis_b) coordinate plane.
FiniteGroup make_cyclic_rotation_group(int k, int dim, int axis_a = 0, int axis_b = 1);

/// {I, reflection negating coordinate `axis`}.
FiniteGroup make_reflection_group(int axis, int dim);

/// All pairwise products g*h, deduplicated. Throws NotAGroupError if the
/// product set is not closed.
FiniteGroup make_product_group(const FiniteGroup& g, const FiniteGroup& h);

/// Parses "trivial", "cyclic:k", "reflection:axis" or "dihedral:k" (C_k
/// with the reflection negating coordinate 1). Rotations act on axes 0, 1.
FiniteGroup group_from_descriptor(const std::string& desc, int dim);

struct AxiomReport {
  bool closure = true;
  bool identity = true;
  bool inverses = true;
  bool associativity = true;
  double worst_error = 0.0;
  std::vector<std::string> violations;

  bool ok() const { return closure && identity && inverses && associativity; }
};

/// Checks the Cayley table against actual matrix products, the identity and
/// inverse tables, and associativity over every triple.
AxiomReport verify_group_axioms(const FiniteGroup& g);

std::size_t haar_sample_index(const FiniteGroup& g, Rng& rng);
const GroupElement& haar_sample(const FiniteGroup& g, Rng& rng);

Vec apply(const GroupElement& e, const Vec& x);

/// Images of x under every element, in element order (duplicates retained).
std::vector<Vec> orbit(const FiniteGroup& g, const Vec& x);

/// Images of every column of `points` under every element; column
/// i * n + j holds element i applied to point j.
Cloud orbit_cloud(const FiniteGroup& g, const Cloud& points);

double operator_norm(const Mat& m);

}  // namespace invgan
