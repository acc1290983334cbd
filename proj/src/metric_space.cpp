#include "coarse/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coarse {

namespace {

std::size_t checked_pow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > SIZE_MAX / base) throw std::invalid_argument("lattice too large to index");
    out *= base;
  }
  return out;
}

}  // namespace

LatticeSpace::LatticeSpace(int dimension, std::int64_t box_radius)
    : dim_(dimension), radius_(box_radius) {
  if (dimension < 1) throw std::invalid_argument("LatticeSpace: dimension must be >= 1");
  if (box_radius < 0) throw std::invalid_argument("LatticeSpace: negative box radius");
  side_ = static_cast<std::size_t>(2 * box_radius + 1);
  size_ = checked_pow(side_, dim_);
}

double LatticeSpace::distance(std::size_t i, std::size_t j) const {
  // Mixed-radix decode; the radius offset cancels in the difference.
  std::int64_t best = 0;
  for (int d = 0; d < dim_; ++d) {
    const auto di = static_cast<std::int64_t>(i % side_);
    const auto dj = static_cast<std::int64_t>(j % side_);
    best = std::max(best, std::abs(di - dj));
    i /= side_;
    j /= side_;
  }
  return static_cast<double>(best);
}

std::vector<std::int64_t> LatticeSpace::point(std::size_t index) const {
  if (index >= size_) throw std::out_of_range("LatticeSpace::point: index out of range");
  std::vector<std::int64_t> p(static_cast<std::size_t>(dim_));
  for (int d = dim_ - 1; d >= 0; --d) {
    p[static_cast<std::size_t>(d)] = static_cast<std::int64_t>(index % side_) - radius_;
    index /= side_;
  }
  return p;
}

std::size_t LatticeSpace::index_of(std::span<const std::int64_t> p) const {
  if (!contains(p)) throw std::out_of_range("LatticeSpace::index_of: point outside box");
  std::size_t index = 0;
  for (std::size_t d = 0; d < p.size(); ++d) {
    index = index * side_ + static_cast<std::size_t>(p[d] + radius_);
  }
  return index;
}

bool LatticeSpace::contains(std::span<const std::int64_t> p) const {
  if (p.size() != static_cast<std::size_t>(dim_)) return false;
  return std::all_of(p.begin(), p.end(),
                     [this](std::int64_t v) { return -radius_ <= v && v <= radius_; });
}

double LatticeSpace::sup_distance(std::span<const std::int64_t> a,
                                  std::span<const std::int64_t> b) {
  std::int64_t best = 0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    best = std::max(best, std::abs(a[d] - b[d]));
  }
  return static_cast<double>(best);
}

std::string LatticeSpace::describe() const {
  return "lattice:" + std::to_string(dim_) + "," + std::to_string(radius_);
}

ExplicitSpace::ExplicitSpace(std::vector<double> matrix, std::vector<std::string> labels)
    : matrix_(std::move(matrix)), labels_(std::move(labels)) {
  const std::size_t n = labels_.size();
  if (n == 0) throw std::invalid_argument("ExplicitSpace: empty point set");
  if (matrix_.size() != n * n) throw std::invalid_argument("ExplicitSpace: matrix shape mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(matrix_[i * n + i]) > kTol)
      throw std::invalid_argument("ExplicitSpace: nonzero diagonal entry");
    for (std::size_t j = 0; j < n; ++j) {
      const double d = matrix_[i * n + j];
      if (!std::isfinite(d) || d < 0.0)
        throw std::invalid_argument("ExplicitSpace: invalid distance entry");
      if (i != j && d <= kTol)
        throw std::invalid_argument("ExplicitSpace: zero distance between distinct points");
      if (std::abs(d - matrix_[j * n + i]) > kTol)
        throw std::invalid_argument("ExplicitSpace: asymmetric matrix");
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < n; ++z) {
        if (matrix_[x * n + z] > matrix_[x * n + y] + matrix_[y * n + z] + kTol)
          throw std::invalid_argument("ExplicitSpace: triangle inequality violated");
      }
    }
  }
}

ExplicitSpace ExplicitSpace::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ExplicitSpace::from_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ExplicitSpace::from_csv: empty file");

  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };

  const std::vector<std::string> labels = split(line);
  const std::size_t n = labels.size();
  std::vector<double> matrix;
  matrix.reserve(n * n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    for (const auto& cell : split(line)) matrix.push_back(std::stod(cell));
  }
  if (matrix.size() != n * n)
    throw std::runtime_error("ExplicitSpace::from_csv: expected " + std::to_string(n * n) +
                             " entries, got " + std::to_string(matrix.size()));
  return ExplicitSpace(std::move(matrix), labels);
}

double ExplicitSpace::distance(std::size_t i, std::size_t j) const {
  return matrix_[i * labels_.size() + j];
}

std::string ExplicitSpace::describe() const {
  return "explicit[" + std::to_string(labels_.size()) + " points]";
}

SupProductSpace::SupProductSpace(std::vector<SpacePtr> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("SupProductSpace: no factors");
  strides_.assign(factors_.size(), 1);
  for (std::size_t i = factors_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * factors_[i]->size();
  }
  size_ = strides_[0] * factors_[0]->size();
}

std::vector<std::size_t> SupProductSpace::coordinates(std::size_t index) const {
  std::vector<std::size_t> coords(factors_.size());
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    coords[i] = index / strides_[i];
    index %= strides_[i];
  }
  return coords;
}

double SupProductSpace::distance(std::size_t i, std::size_t j) const {
  double best = 0.0;
  std::size_t ri = i, rj = j;
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    const std::size_t ci = ri / strides_[f], cj = rj / strides_[f];
    ri %= strides_[f];
    rj %= strides_[f];
    best = std::max(best, factors_[f]->distance(ci, cj));
  }
  return best;
}

std::string SupProductSpace::describe() const {
  std::string out = "prod[";
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) out += "|";
    out += factors_[i]->describe();
  }
  return out + "]";
}

TransformedSpace::TransformedSpace(SpacePtr base, PiecewiseLinearFn c)
    : base_(std::move(base)), c_(std::move(c)) {
  if (!base_) throw std::invalid_argument("TransformedSpace: null base");
}

std::string TransformedSpace::describe() const {
  return "xform[" + base_->describe() + "]";
}

namespace {

void check_pair(const MetricSpace& space, std::size_t i, std::size_t j, AxiomReport& report) {
  const double dij = space.distance(i, j);
  const double dji = space.distance(j, i);
  ++report.pairs_checked;
  if (std::abs(dij - dji) > kTol) report.symmetry_violations.emplace_back(i, j);
  if (i != j && dij <= kTol) report.identity_violations.emplace_back(i, j);
}

void check_triple(const MetricSpace& space, std::size_t x, std::size_t y, std::size_t z,
                  AxiomReport& report) {
  const double defect = space.distance(x, z) - space.distance(x, y) - space.distance(y, z);
  ++report.triples_checked;
  report.max_defect = std::max(report.max_defect, defect);
  if (defect > kTol) report.violations.push_back({x, y, z, defect});
}

}  // namespace

AxiomReport verify_metric_axioms(const MetricSpace& space, const SamplePlan& plan) {
  const std::size_t n = space.size();
  AxiomReport report;

  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(space.distance(i, i)) > kTol) report.identity_violations.emplace_back(i, i);
  }

  if (plan.exhaustive) {
    if (n > 1000)
      throw std::invalid_argument("verify_metric_axioms: exhaustive plan limited to 1000 points");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) check_pair(space, i, j, report);
    // Cache the distances once; the cubic scan then touches memory only.
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = space.distance(i, j);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        const double dxy = d[x * n + y];
        for (std::size_t z = 0; z < n; ++z) {
          const double defect = d[x * n + z] - dxy - d[y * n + z];
          ++report.triples_checked;
          report.max_defect = std::max(report.max_defect, defect);
          if (defect > kTol) report.violations.push_back({x, y, z, defect});
        }
      }
    }
  } else {
    Rng rng(plan.seed);
    for (std::size_t s = 0; s < plan.samples; ++s) {
      const std::size_t x = rng.next_index(n), y = rng.next_index(n), z = rng.next_index(n);
      check_pair(space, x, y, report);
      check_triple(space, x, y, z, report);
    }
  }

  std::sort(report.violations.begin(), report.violations.end(),
            [](const TriangleViolation& a, const TriangleViolation& b) {
              return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
            });
  return report;
}

CoarseIdentityReport verify_coarse_identity(const MetricSpace& base, const PiecewiseLinearFn& c,
                                            const SamplePlan& plan) {
  if (!c.unbounded())
    throw std::invalid_argument("verify_coarse_identity: rescaling must be unbounded");
  const FnAnalysis fa = analyze(c, 1.0);
  if (!fa.is_nondecreasing || std::abs(c.eval(0.0)) > kTol)
    throw std::invalid_argument("verify_coarse_identity: rescaling must be nondecreasing with c(0) = 0");

  CoarseIdentityReport report;
  // Continuity at 0: piecewise-linear functions are continuous everywhere, so
  // this reduces to the value at 0 itself.
  report.continuous_at_zero = std::abs(c.eval(0.0)) <= kTol;

  const std::size_t n = base.size();
  auto visit = [&](std::size_t i, std::size_t j) {
    const double d = base.distance(i, j);
    const double roundtrip = c.inverse_or_zero(c.eval(d));
    report.max_roundtrip_defect = std::max(report.max_roundtrip_defect, std::abs(roundtrip - d));
    ++report.pairs_checked;
  };

  if (plan.exhaustive) {
    if (n > 1000)
      throw std::invalid_argument("verify_coarse_identity: exhaustive plan limited to 1000 points");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) visit(i, j);
  } else {
    Rng rng(plan.seed);
    for (std::size_t s = 0; s < plan.samples; ++s) visit(rng.next_index(n), rng.next_index(n));
  }
  return report;
}

}  // namespace coarse
