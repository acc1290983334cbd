#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "coarse/common.hpp"
#include "coarse/pl_function.hpp"

namespace coarse {

class LatticeSpace;

/// Distance oracle over a finite indexed point set. Implementations are
/// immutable; distance is a pure function.
class MetricSpace {
 public:
  virtual ~MetricSpace() = default;
  virtual std::size_t size() const = 0;
  virtual double distance(std::size_t i, std::size_t j) const = 0;
  virtual std::string describe() const = 0;
  /// The lattice this space is a (possibly transformed) view of, if any.
  virtual const LatticeSpace* underlying_lattice() const { return nullptr; }
};

using SpacePtr = std::shared_ptr<const MetricSpace>;

/// Centered cube {-box_radius, ..., box_radius}^n of integer tuples with the
/// sup (l-infinity) metric.
class LatticeSpace final : public MetricSpace {
 public:
  LatticeSpace(int dimension, std::int64_t box_radius);

  std::size_t size() const override { return size_; }
  double distance(std::size_t i, std::size_t j) const override;
  std::string describe() const override;
  const LatticeSpace* underlying_lattice() const override { return this; }

  int dimension() const { return dim_; }
  std::int64_t box_radius() const { return radius_; }

  std::vector<std::int64_t> point(std::size_t index) const;
  std::size_t index_of(std::span<const std::int64_t> p) const;
  bool contains(std::span<const std::int64_t> p) const;

  static double sup_distance(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

 private:
  int dim_;
  std::int64_t radius_;
  std::size_t side_;
  std::size_t size_;
};

/// Space given by an explicit distance matrix. The constructor verifies the
/// metric axioms (symmetry, zero diagonal and nothing else, triangle
/// inequality) and rejects any matrix failing them.
class ExplicitSpace final : public MetricSpace {
 public:
  ExplicitSpace(std::vector<double> matrix, std::vector<std::string> labels);

  /// CSV with a header row of point labels followed by the square matrix.
  static ExplicitSpace from_csv(const std::string& path);

  std::size_t size() const override { return labels_.size(); }
  double distance(std::size_t i, std::size_t j) const override;
  std::string describe() const override;
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<double> matrix_;
  std::vector<std::string> labels_;
};

/// Product with the sup metric: d(x, y) = max over factors of d_i(x_i, y_i).
class SupProductSpace final : public MetricSpace {
 public:
  explicit SupProductSpace(std::vector<SpacePtr> factors);

  std::size_t size() const override { return size_; }
  double distance(std::size_t i, std::size_t j) const override;
  std::string describe() const override;

  const std::vector<SpacePtr>& factors() const { return factors_; }
  std::vector<std::size_t> coordinates(std::size_t index) const;

 private:
  std::vector<SpacePtr> factors_;
  std::vector<std::size_t> strides_;
  std::size_t size_;
};

/// Base space with the metric composed with a monotone rescaling:
/// d(x, y) = c(base.distance(x, y)).
class TransformedSpace final : public MetricSpace {
 public:
  TransformedSpace(SpacePtr base, PiecewiseLinearFn c);

  std::size_t size() const override { return base_->size(); }
  double distance(std::size_t i, std::size_t j) const override {
    return c_.eval(base_->distance(i, j));
  }
  std::string describe() const override;
  const LatticeSpace* underlying_lattice() const override {
    return base_->underlying_lattice();
  }

  const MetricSpace& base() const { return *base_; }
  const PiecewiseLinearFn& transform() const { return c_; }

 private:
  SpacePtr base_;
  PiecewiseLinearFn c_;
};

struct TriangleViolation {
  std::size_t x = 0, y = 0, z = 0;
  double defect = 0.0;  // d(x,z) - d(x,y) - d(y,z), positive when violated
};

struct AxiomReport {
  std::size_t triples_checked = 0;
  std::size_t pairs_checked = 0;
  std::vector<TriangleViolation> violations;  // sorted by (x, y, z)
  std::vector<std::pair<std::size_t, std::size_t>> symmetry_violations;
  std::vector<std::pair<std::size_t, std::size_t>> identity_violations;
  double max_defect = 0.0;

  bool passed() const {
    return violations.empty() && symmetry_violations.empty() && identity_violations.empty();
  }
};

/// Triangle, symmetry and identity-of-indiscernibles checks. Exhaustive plans
/// are accepted only for spaces of at most 1000 points; larger spaces must use
/// a fixed-seed sampled plan.
AxiomReport verify_metric_axioms(const MetricSpace& space, const SamplePlan& plan);

struct CoarseIdentityReport {
  std::size_t pairs_checked = 0;
  double max_roundtrip_defect = 0.0;
  bool continuous_at_zero = false;
  bool passed(double tol = kTol) const {
    return continuous_at_zero && max_roundtrip_defect <= tol;
  }
};

/// Checks that the identity map between (X, d) and (X, c o d) is a coarse
/// equivalence witnessed by c itself: inverting c on the transformed distance
/// recovers the original distance, and c is continuous at 0. Requires c
/// unbounded, nondecreasing, and vanishing at 0; a bounded c is rejected with
/// std::invalid_argument.
CoarseIdentityReport verify_coarse_identity(const MetricSpace& base, const PiecewiseLinearFn& c,
                                            const SamplePlan& plan);

}  // namespace coarse
