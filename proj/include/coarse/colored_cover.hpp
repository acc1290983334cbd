#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coarse/metric_space.hpp"

namespace coarse {

struct CellRef {
  int color = 0;
  std::vector<std::int64_t> cell;
  friend bool operator==(const CellRef&, const CellRef&) = default;
};

/// A cover of the integer lattice by n+1 colored families of cells, exposed
/// through a membership oracle: every point maps to at most one (color, cell)
/// pair, and correctness (total coverage, same-color separation, diameter
/// bounds) is established by verify_cover, never assumed from the
/// construction.
class ColoredCover {
 public:
  virtual ~ColoredCover() = default;
  virtual int dimension() const = 0;  // colors run 0 .. dimension()
  virtual std::optional<CellRef> cell_of(std::span<const std::int64_t> p) const = 0;
  virtual std::string describe() const = 0;
};

/// Shifted-core brick decomposition of Z^n with period 2(n+1)r.
///
/// Color k partitions each axis into intervals of length L = 2(n+1)r offset
/// by 2rk and keeps the core of the first L-2r integers of each interval; a
/// point takes the smallest color whose core contains it in every axis. The
/// n+1 dropped zones of width 2r per axis are pairwise disjoint, so a point
/// can fail at most n colors.
class BrickCover final : public ColoredCover {
 public:
  BrickCover(int dimension, std::int64_t r);

  int dimension() const override { return dim_; }
  std::optional<CellRef> cell_of(std::span<const std::int64_t> p) const override;
  std::string describe() const override;

  std::int64_t separation_scale() const { return r_; }
  std::int64_t period() const { return period_; }
  // The affine bound advertised for the construction: 2(n+1)r. The exact cell
  // diameter is L - 2r - 1, which this majorizes.
  double advertised_diameter_bound() const { return static_cast<double>(period_); }

 private:
  int dim_;
  std::int64_t r_;
  std::int64_t period_;
};

struct CellStats {
  int color = 0;
  std::vector<std::int64_t> cell;
  std::size_t point_count = 0;
  double diameter = 0.0;             // in the measured space's metric
  double min_same_color_gap = 0.0;   // +inf when the color has a single cell
};

struct SeparationViolation {
  int color = 0;
  std::vector<std::int64_t> cell_a, cell_b;
  std::vector<std::int64_t> point_a, point_b;
  double distance = 0.0;
};

struct DiameterViolation {
  int color = 0;
  std::vector<std::int64_t> cell;
  std::vector<std::int64_t> point_a, point_b;
  double diameter = 0.0;
};

struct CoverReport {
  std::size_t points_checked = 0;
  std::size_t cell_count = 0;
  std::vector<std::vector<std::int64_t>> uncovered;
  std::vector<CellStats> cells;  // sorted by (color, cell id)
  std::vector<SeparationViolation> separation_violations;
  std::vector<DiameterViolation> diameter_violations;
  double min_separation = 0.0;
  double max_diameter = 0.0;

  bool passed() const {
    return uncovered.empty() && separation_violations.empty() && diameter_violations.empty();
  }
};

/// Exhaustively checks the cover over the box of the space's underlying
/// lattice: every point covered, distinct same-color cells at distance
/// >= separation_scale, every cell of diameter <= diameter_bound. Distances
/// are measured through the space's own metric, so passing a transformed
/// lattice re-measures the same cells at a new scale. Requires a space backed
/// by a lattice box and a monotone transform (all spaces here qualify).
CoverReport verify_cover(const MetricSpace& space, const ColoredCover& cover,
                         double separation_scale, double diameter_bound);

struct ControlSample {
  double r = 0.0;      // separation scale
  double bound = 0.0;  // measured diameter bound at that scale
};

struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-slope affine majorant of the samples: the slope is the steepest
/// chord between consecutive samples and the intercept the smallest shift
/// making the line dominate every point. Returns nullopt when growth is
/// superlinear over the sampled range (the ratio bound/r climbs steadily),
/// since no affine fit is meaningful then. Throws on fewer than two samples.
std::optional<AffineFit> fit_affine_control(std::span<const ControlSample> samples);

}  // namespace coarse
