#include "coarse/pl_function.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace coarse {

namespace {

// Slope of the segment ending at bps[i] (i >= 1).
double segment_slope(const std::vector<Breakpoint>& bps, std::size_t i) {
  return (bps[i].y - bps[i - 1].y) / (bps[i].x - bps[i - 1].x);
}

// Worst deviation of ln from its chord over [u0, u1], 0 < u0 <= u1. The
// maximum sits at the logarithmic mean of the endpoints; substituting it gives
// the closed form below in terms of the ratio rho = u1/u0.
double ln_chord_deviation(double u0, double u1) {
  const double rho = u1 / u0;
  if (rho <= 1.0 + kTol) return 0.0;
  const double lr = std::log(rho);
  return std::log((rho - 1.0) / lr) - 1.0 + lr / (rho - 1.0);
}

}  // namespace

PiecewiseLinearFn::PiecewiseLinearFn(std::vector<Breakpoint> breakpoints, double tail_slope)
    : bps_(std::move(breakpoints)), tail_slope_(tail_slope) {
  if (bps_.empty()) throw std::invalid_argument("PiecewiseLinearFn: no breakpoints");
  if (std::abs(bps_.front().x) > 0.0)
    throw std::invalid_argument("PiecewiseLinearFn: first breakpoint must sit at x = 0");
  if (!(tail_slope_ >= 0.0) || !std::isfinite(tail_slope_))
    throw std::invalid_argument("PiecewiseLinearFn: tail slope must be finite and nonnegative");
  for (std::size_t i = 0; i < bps_.size(); ++i) {
    if (!std::isfinite(bps_[i].x) || !std::isfinite(bps_[i].y))
      throw std::invalid_argument("PiecewiseLinearFn: non-finite breakpoint");
    if (bps_[i].y < 0.0)
      throw std::invalid_argument("PiecewiseLinearFn: negative value");
    if (i > 0) {
      if (!(bps_[i].x > bps_[i - 1].x))
        throw std::invalid_argument("PiecewiseLinearFn: breakpoints must be strictly increasing in x");
      if (bps_[i].y < bps_[i - 1].y - kTol)
        throw std::invalid_argument("PiecewiseLinearFn: values must be nondecreasing");
    }
  }
}

PiecewiseLinearFn PiecewiseLinearFn::identity() {
  return PiecewiseLinearFn({{0.0, 0.0}, {1.0, 1.0}}, 1.0);
}

PiecewiseLinearFn PiecewiseLinearFn::affine(double slope, double intercept) {
  if (slope < 0.0 || intercept < 0.0)
    throw std::invalid_argument("PiecewiseLinearFn::affine: negative coefficient");
  return PiecewiseLinearFn({{0.0, intercept}, {1.0, slope + intercept}}, slope);
}

double PiecewiseLinearFn::eval(double r) const {
  if (!(r >= 0.0)) throw std::domain_error("PiecewiseLinearFn::eval: negative argument");
  if (r >= bps_.back().x) return bps_.back().y + tail_slope_ * (r - bps_.back().x);
  // First breakpoint with x > r; r < back().x so it exists past index 0.
  const auto it = std::upper_bound(bps_.begin(), bps_.end(), r,
                                   [](double v, const Breakpoint& b) { return v < b.x; });
  const std::size_t i = static_cast<std::size_t>(it - bps_.begin());
  return bps_[i - 1].y + segment_slope(bps_, i) * (r - bps_[i - 1].x);
}

double PiecewiseLinearFn::inverse_or_zero(double y) const {
  if (!(y >= 0.0)) throw std::domain_error("PiecewiseLinearFn::inverse_or_zero: negative argument");
  if (y <= bps_.front().y) return 0.0;
  for (std::size_t i = 1; i < bps_.size(); ++i) {
    if (bps_[i].y >= y) {
      // bps_[i-1].y < y <= bps_[i].y, so the segment rises.
      return bps_[i - 1].x + (y - bps_[i - 1].y) / segment_slope(bps_, i);
    }
  }
  if (tail_slope_ <= 0.0)
    throw std::range_error("PiecewiseLinearFn::inverse_or_zero: value above a bounded image");
  return bps_.back().x + (y - bps_.back().y) / tail_slope_;
}

double PiecewiseLinearFn::sup_preimage_le(double y) const {
  if (!(y >= 0.0)) throw std::domain_error("PiecewiseLinearFn::sup_preimage_le: negative argument");
  if (y < bps_.front().y) return 0.0;
  if (y >= bps_.back().y) {
    if (tail_slope_ <= 0.0)
      throw std::range_error("PiecewiseLinearFn::sup_preimage_le: unbounded preimage of a bounded function");
    return bps_.back().x + (y - bps_.back().y) / tail_slope_;
  }
  // Scan from the right for the last crossing. At the first index from the
  // right with bps[i-1].y <= y the segment must rise past y, so a flat run at
  // level y resolves to its right endpoint.
  for (std::size_t i = bps_.size() - 1; i >= 1; --i) {
    if (bps_[i - 1].y <= y) {
      return bps_[i - 1].x + (y - bps_[i - 1].y) / segment_slope(bps_, i);
    }
  }
  return 0.0;
}

PiecewiseLinearFn PiecewiseLinearFn::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::domain_error("PiecewiseLinearFn::scaled: factor must be positive");
  std::vector<Breakpoint> out = bps_;
  for (auto& b : out) b.y *= factor;
  return PiecewiseLinearFn(std::move(out), tail_slope_ * factor);
}

namespace {

// Node abscissae for the log correction: every breakpoint of f plus
// extra_nodes points past the last one with x+1 doubling each time.
std::vector<double> log_nodes(const PiecewiseLinearFn& f, int extra_nodes) {
  if (extra_nodes < 0) throw std::invalid_argument("log correction: negative node count");
  std::vector<double> xs;
  xs.reserve(f.breakpoints().size() + static_cast<std::size_t>(extra_nodes));
  for (const auto& b : f.breakpoints()) xs.push_back(b.x);
  double shifted = f.last_x() + 1.0;
  for (int j = 0; j < extra_nodes; ++j) {
    shifted *= 2.0;
    xs.push_back(shifted - 1.0);
  }
  return xs;
}

}  // namespace

PiecewiseLinearFn PiecewiseLinearFn::log_corrected(int extra_nodes) const {
  const std::vector<double> xs = log_nodes(*this, extra_nodes);
  std::vector<Breakpoint> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back({x, std::log1p(eval(x))});
  // Right derivative of ln(eval+1) at the final node.
  const double end_slope = tail_slope_ / (1.0 + eval(xs.back()));
  return PiecewiseLinearFn(std::move(out), end_slope);
}

double log_chord_error_bound(const PiecewiseLinearFn& f, int extra_nodes) {
  const std::vector<double> xs = log_nodes(f, extra_nodes);
  double worst = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    worst = std::max(worst, ln_chord_deviation(f.eval(xs[i - 1]) + 1.0, f.eval(xs[i]) + 1.0));
  }
  return worst;
}

FnAnalysis analyze(const PiecewiseLinearFn& f, double grid_step) {
  if (!(grid_step > 0.0)) throw std::domain_error("analyze: grid step must be positive");
  const auto& bps = f.breakpoints();

  std::vector<double> slopes;
  slopes.reserve(bps.size());
  for (std::size_t i = 1; i < bps.size(); ++i) slopes.push_back(segment_slope(bps, i));
  slopes.push_back(f.tail_slope());

  FnAnalysis out;
  out.is_nondecreasing = std::all_of(slopes.begin(), slopes.end(),
                                     [](double s) { return s >= -kTol; });
  out.is_concave = true;
  for (std::size_t i = 1; i < slopes.size(); ++i) {
    if (slopes[i] > slopes[i - 1] + kTol) {
      out.is_concave = false;
      break;
    }
  }
  out.is_unbounded = f.unbounded();
  out.vanishes_only_at_zero = std::abs(bps.front().y) <= kTol && slopes.front() > kTol;

  if (out.is_concave) {
    // Nonnegative concave with f(0) >= 0: chords from 0 dominate, so
    // f(a) + f(b) >= f(0) + f(a+b) >= f(a+b).
    out.is_subadditive = true;
    return out;
  }

  std::set<double> grid;
  grid.insert(0.0);
  const double limit = 2.0 * f.last_x();
  for (double g = grid_step; g <= limit + kTol; g += grid_step) grid.insert(g);
  for (const auto& b : bps) grid.insert(b.x);

  out.is_subadditive = true;
  for (auto ia = grid.begin(); ia != grid.end() && out.is_subadditive; ++ia) {
    for (auto ib = ia; ib != grid.end(); ++ib) {
      const double a = *ia, b = *ib;
      if (f.eval(a + b) > f.eval(a) + f.eval(b) + kTol) {
        out.is_subadditive = false;
        out.witness = SubadditivityWitness{a, b};
        break;
      }
    }
  }
  return out;
}

PiecewiseLinearFn compose(const PiecewiseLinearFn& outer, const PiecewiseLinearFn& inner) {
  // Nodes: inner's breakpoints plus every point where inner crosses a
  // breakpoint level of outer; between nodes both maps are affine.
  std::set<double> xs;
  for (const auto& b : inner.breakpoints()) xs.insert(b.x);
  const auto& ib = inner.breakpoints();
  for (const auto& ob : outer.breakpoints()) {
    const double level = ob.x;
    for (std::size_t i = 1; i < ib.size(); ++i) {
      if (ib[i - 1].y < level && level < ib[i].y) {
        const double slope = (ib[i].y - ib[i - 1].y) / (ib[i].x - ib[i - 1].x);
        xs.insert(ib[i - 1].x + (level - ib[i - 1].y) / slope);
      }
    }
    if (inner.tail_slope() > 0.0 && level > inner.last_y()) {
      xs.insert(inner.last_x() + (level - inner.last_y()) / inner.tail_slope());
    }
  }

  std::vector<Breakpoint> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back({x, outer.eval(inner.eval(x))});

  // Past the last node an unbounded inner has already climbed through every
  // breakpoint level of outer, so only the two tail slopes remain; a bounded
  // inner makes the composition eventually constant.
  const double tail =
      inner.tail_slope() > 0.0 ? outer.tail_slope() * inner.tail_slope() : 0.0;
  return PiecewiseLinearFn(std::move(out), tail);
}

}  // namespace coarse
