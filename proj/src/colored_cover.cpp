#include "coarse/colored_cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace coarse {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

}  // namespace

BrickCover::BrickCover(int dimension, std::int64_t r) : dim_(dimension), r_(r) {
  if (dimension < 1) throw std::invalid_argument("BrickCover: dimension must be >= 1");
  if (r < 1) throw std::invalid_argument("BrickCover: separation scale must be >= 1");
  period_ = 2 * (dimension + 1) * r;
}

std::optional<CellRef> BrickCover::cell_of(std::span<const std::int64_t> p) const {
  if (p.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("BrickCover::cell_of: wrong point dimension");
  const std::int64_t core = period_ - 2 * r_;
  for (int color = 0; color <= dim_; ++color) {
    const std::int64_t offset = 2 * r_ * color;
    CellRef ref;
    ref.color = color;
    ref.cell.reserve(p.size());
    bool inside = true;
    for (std::size_t d = 0; d < p.size() && inside; ++d) {
      const std::int64_t shifted = p[d] - offset;
      if (floor_mod(shifted, period_) >= core) {
        inside = false;
      } else {
        ref.cell.push_back(floor_div(shifted, period_));
      }
    }
    if (inside) return ref;
  }
  return std::nullopt;
}

std::string BrickCover::describe() const {
  return "brick[n=" + std::to_string(dim_) + ",r=" + std::to_string(r_) + "]";
}

namespace {

struct CellBox {
  std::vector<std::int64_t> lo, hi;
  std::vector<std::size_t> lo_index, hi_index;  // members attaining each extent
  std::size_t count = 0;

  void absorb(std::span<const std::int64_t> p, std::size_t index) {
    if (count == 0) {
      lo.assign(p.begin(), p.end());
      hi.assign(p.begin(), p.end());
      lo_index.assign(p.size(), index);
      hi_index.assign(p.size(), index);
    } else {
      for (std::size_t d = 0; d < p.size(); ++d) {
        if (p[d] < lo[d]) {
          lo[d] = p[d];
          lo_index[d] = index;
        }
        if (p[d] > hi[d]) {
          hi[d] = p[d];
          hi_index[d] = index;
        }
      }
    }
    ++count;
  }
};

// Sup distance between two axis-aligned boxes, with the witness coordinates
// realizing it: per axis either the facing box edges or any shared value.
double box_gap(const CellBox& a, const CellBox& b, std::vector<std::int64_t>& wa,
               std::vector<std::int64_t>& wb) {
  const std::size_t n = a.lo.size();
  wa.resize(n);
  wb.resize(n);
  std::int64_t gap = 0;
  for (std::size_t d = 0; d < n; ++d) {
    if (b.lo[d] > a.hi[d]) {
      wa[d] = a.hi[d];
      wb[d] = b.lo[d];
      gap = std::max(gap, b.lo[d] - a.hi[d]);
    } else if (a.lo[d] > b.hi[d]) {
      wa[d] = a.lo[d];
      wb[d] = b.hi[d];
      gap = std::max(gap, a.lo[d] - b.hi[d]);
    } else {
      const std::int64_t shared = std::max(a.lo[d], b.lo[d]);
      wa[d] = shared;
      wb[d] = shared;
    }
  }
  return static_cast<double>(gap);
}

bool member_of(const ColoredCover& cover, const CellRef& want,
               std::span<const std::int64_t> p) {
  const auto got = cover.cell_of(p);
  return got.has_value() && *got == want;
}

}  // namespace

CoverReport verify_cover(const MetricSpace& space, const ColoredCover& cover,
                         double separation_scale, double diameter_bound) {
  const LatticeSpace* lattice = space.underlying_lattice();
  if (lattice == nullptr)
    throw std::invalid_argument("verify_cover: space must be backed by a lattice box");
  if (lattice->dimension() != cover.dimension())
    throw std::invalid_argument("verify_cover: cover and lattice dimensions differ");

  CoverReport report;
  report.min_separation = std::numeric_limits<double>::infinity();

  using Key = std::pair<int, std::vector<std::int64_t>>;
  std::map<Key, CellBox> cells;

  // Consecutive lattice indices usually stay in one cell; cache the last hit
  // to keep the scan out of the map.
  Key last_key{-1, {}};
  CellBox* last_box = nullptr;

  const std::size_t n = lattice->size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<std::int64_t> p = lattice->point(i);
    const auto ref = cover.cell_of(p);
    ++report.points_checked;
    if (!ref) {
      if (report.uncovered.size() < 32) report.uncovered.push_back(p);
      continue;
    }
    if (last_box == nullptr || ref->color != last_key.first || ref->cell != last_key.second) {
      last_key = {ref->color, ref->cell};
      last_box = &cells[last_key];
    }
    last_box->absorb(p, i);
  }
  report.cell_count = cells.size();

  // Distance between two points through the space's own metric.
  auto measure = [&](std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    return space.distance(lattice->index_of(a), lattice->index_of(b));
  };

  // Points of a cell, recovered by scanning its bounding box.
  auto cell_points = [&](const CellRef& ref, const CellBox& box) {
    std::vector<std::vector<std::int64_t>> points;
    std::vector<std::int64_t> p = box.lo;
    bool done = false;
    while (!done) {
      if (member_of(cover, ref, p)) points.push_back(p);
      done = true;
      for (std::size_t d = p.size(); d-- > 0;) {
        if (++p[d] <= box.hi[d]) {
          done = false;
          break;
        }
        p[d] = box.lo[d];
      }
    }
    return points;
  };

  // Exact minimum over point pairs of two cells (base geometry), with
  // witnesses. Only invoked for pairs whose box gap undercuts the verified
  // scale, so the quadratic scan stays confined to actual near-misses.
  auto refined_gap = [&](const CellRef& ra, const CellBox& a, const CellRef& rb, const CellBox& b,
                         std::vector<std::int64_t>& wa, std::vector<std::int64_t>& wb) {
    const auto pa = cell_points(ra, a);
    const auto pb = cell_points(rb, b);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pa) {
      for (const auto& q : pb) {
        const double d = LatticeSpace::sup_distance(p, q);
        if (d < best) {
          best = d;
          wa = p;
          wb = q;
        }
      }
    }
    return best;
  };

  for (auto it = cells.begin(); it != cells.end(); ++it) {
    const CellRef ref{it->first.first, it->first.second};
    const CellBox& box = it->second;

    // Sup-metric diameter is the widest axis extent of the bounding box,
    // realized by the two members attaining it.
    std::size_t widest = 0;
    for (std::size_t d = 1; d < box.lo.size(); ++d) {
      if (box.hi[d] - box.lo[d] > box.hi[widest] - box.lo[widest]) widest = d;
    }
    const std::vector<std::int64_t> pa = lattice->point(box.lo_index[widest]);
    const std::vector<std::int64_t> pb = lattice->point(box.hi_index[widest]);
    const double diameter = measure(pa, pb);
    report.max_diameter = std::max(report.max_diameter, diameter);
    if (diameter > diameter_bound + kTol) {
      report.diameter_violations.push_back({ref.color, ref.cell, pa, pb, diameter});
    }

    // Separation against every later same-color cell. The box gap bounds the
    // true gap from below; it is exact once its witness coordinates land in
    // both cells, and near-misses below the verified scale are refined by an
    // exact scan. The recorded gap is exact whenever it matters (at or below
    // the scale) and a certified lower bound otherwise.
    double min_gap = std::numeric_limits<double>::infinity();
    for (auto jt = std::next(it); jt != cells.end() && jt->first.first == ref.color; ++jt) {
      const CellRef other{jt->first.first, jt->first.second};
      std::vector<std::int64_t> wa, wb;
      const double base_gap = box_gap(box, jt->second, wa, wb);
      const bool confirmed = member_of(cover, ref, wa) && member_of(cover, other, wb);
      bool exact = confirmed;
      if (!confirmed && base_gap < separation_scale) {
        refined_gap(ref, box, other, jt->second, wa, wb);
        exact = true;
      }
      const double gap = measure(wa, wb);
      min_gap = std::min(min_gap, gap);
      report.min_separation = std::min(report.min_separation, gap);
      if (exact && gap < separation_scale - kTol) {
        report.separation_violations.push_back({ref.color, ref.cell, other.cell, wa, wb, gap});
      }
    }

    CellStats stats;
    stats.color = ref.color;
    stats.cell = ref.cell;
    stats.point_count = box.count;
    stats.diameter = diameter;
    stats.min_same_color_gap = min_gap;
    report.cells.push_back(std::move(stats));
  }

  return report;
}

std::optional<AffineFit> fit_affine_control(std::span<const ControlSample> samples) {
  if (samples.size() < 2) throw std::invalid_argument("fit_affine_control: need at least 2 samples");
  std::vector<ControlSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ControlSample& a, const ControlSample& b) { return a.r < b.r; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (!(sorted[i].r > sorted[i - 1].r))
      throw std::invalid_argument("fit_affine_control: duplicate sample scales");
  }

  // Superlinear growth pattern: the ratio bound/r climbs monotonically and
  // gains overall, so every affine majorant badly overshoots the left end.
  bool ratio_monotone = true;
  double first_ratio = 0.0, last_ratio = 0.0;
  bool have_ratio = false;
  double prev = 0.0;
  for (const auto& s : sorted) {
    if (s.r <= 0.0) continue;
    const double ratio = s.bound / s.r;
    if (have_ratio && ratio < prev - kTol) ratio_monotone = false;
    if (!have_ratio) first_ratio = ratio;
    last_ratio = ratio;
    prev = ratio;
    have_ratio = true;
  }
  if (ratio_monotone && have_ratio && last_ratio > first_ratio + kTol) return std::nullopt;

  double slope = 0.0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    slope = std::max(slope, (sorted[i].bound - sorted[i - 1].bound) / (sorted[i].r - sorted[i - 1].r));
  }
  double intercept = 0.0;
  for (const auto& s : sorted) intercept = std::max(intercept, s.bound - slope * s.r);
  return AffineFit{slope, intercept};
}

}  // namespace coarse
