#include "coarse/fn_expr.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <optional>
#include <string_view>

#include "coarse/hyperbolicity.hpp"
#include "coarse/io.hpp"

namespace coarse {

namespace {

double parse_real(const std::string& expr, std::size_t from, std::size_t to) {
  double v = 0.0;
  const auto res = std::from_chars(expr.data() + from, expr.data() + to, v);
  if (res.ec != std::errc{} || res.ptr != expr.data() + to)
    throw ExprParseError(from, "expected a number");
  return v;
}

long parse_int(const std::string& expr, std::size_t from, std::size_t to) {
  long v = 0;
  const auto res = std::from_chars(expr.data() + from, expr.data() + to, v);
  if (res.ec != std::errc{} || res.ptr != expr.data() + to)
    throw ExprParseError(from, "expected an integer");
  return v;
}

PiecewiseLinearFn chordal_nodes(long count, const std::function<double(double)>& fn,
                                double tail_slope) {
  std::vector<Breakpoint> bps;
  bps.reserve(static_cast<std::size_t>(count) + 1);
  for (long k = 0; k <= count; ++k) {
    const double x = static_cast<double>(k);
    bps.push_back({x, fn(x)});
  }
  return PiecewiseLinearFn(std::move(bps), tail_slope);
}

// Top-level '|' separators of a bracketed list, skipping nested brackets.
std::vector<std::pair<std::size_t, std::size_t>> split_args(const std::string& expr,
                                                            std::size_t from, std::size_t to) {
  std::vector<std::pair<std::size_t, std::size_t>> parts;
  int depth = 0;
  std::size_t start = from;
  for (std::size_t i = from; i < to; ++i) {
    if (expr[i] == '[') ++depth;
    if (expr[i] == ']') --depth;
    if (expr[i] == '|' && depth == 0) {
      parts.emplace_back(start, i);
      start = i + 1;
    }
  }
  parts.emplace_back(start, to);
  return parts;
}

SpacePtr parse_space_at(const std::string& expr, std::size_t from, std::size_t to);

}  // namespace

PiecewiseLinearFn parse_fn(const std::string& expr) {
  if (expr == "id") return PiecewiseLinearFn::identity();

  const std::size_t colon = expr.find(':');
  if (colon == std::string::npos)
    throw ExprParseError(0, "expected one of affine:A,B | id | sqrt:N | sq:N | log1p:N | pl:PATH");
  const std::string head = expr.substr(0, colon);
  const std::size_t body = colon + 1;
  if (body >= expr.size()) throw ExprParseError(body, "missing argument after ':'");

  if (head == "affine") {
    const std::size_t comma = expr.find(',', body);
    if (comma == std::string::npos) throw ExprParseError(body, "affine needs two numbers A,B");
    const double slope = parse_real(expr, body, comma);
    const double intercept = parse_real(expr, comma + 1, expr.size());
    if (slope < 0.0 || intercept < 0.0)
      throw ExprParseError(body, "affine coefficients must be nonnegative");
    return PiecewiseLinearFn::affine(slope, intercept);
  }
  if (head == "sqrt" || head == "sq" || head == "log1p") {
    const long nodes = parse_int(expr, body, expr.size());
    if (nodes < 1) throw ExprParseError(body, "node count must be >= 1");
    const double n = static_cast<double>(nodes);
    if (head == "sqrt")
      return chordal_nodes(
          nodes, [](double x) { return std::sqrt(x); }, std::sqrt(n) - std::sqrt(n - 1.0));
    if (head == "sq")
      return chordal_nodes(
          nodes, [](double x) { return x * x; }, 2.0 * n - 1.0);
    return chordal_nodes(
        nodes, [](double x) { return std::log1p(x); }, std::log1p(n) - std::log(n));
  }
  if (head == "pl") {
    return load_pl_fn(expr.substr(body));
  }
  throw ExprParseError(0, "unknown function kind '" + head + "'");
}

namespace {

SpacePtr parse_space_at(const std::string& expr, std::size_t from, std::size_t to) {
  const std::string_view view(expr.data() + from, to - from);
  if (view.empty()) throw ExprParseError(from, "empty space expression");

  auto bracketed = [&](std::string_view keyword) -> std::optional<std::pair<std::size_t, std::size_t>> {
    if (!view.starts_with(keyword) || view.size() < keyword.size() + 2) return std::nullopt;
    if (view[keyword.size()] != '[') return std::nullopt;
    if (view.back() != ']')
      throw ExprParseError(to - 1, std::string("expected ']' closing ") + std::string(keyword));
    return std::make_pair(from + keyword.size() + 1, to - 1);
  };

  if (view.starts_with("lattice:")) {
    const std::size_t body = from + 8;
    const std::size_t comma = expr.find(',', body);
    if (comma == std::string::npos || comma >= to)
      throw ExprParseError(body, "lattice needs dimension,box_radius");
    const long dim = parse_int(expr, body, comma);
    const long radius = parse_int(expr, comma + 1, to);
    return std::make_shared<LatticeSpace>(static_cast<int>(dim), radius);
  }
  if (view.starts_with("csv:")) {
    return std::make_shared<ExplicitSpace>(ExplicitSpace::from_csv(expr.substr(from + 4, to - from - 4)));
  }
  if (const auto inner = bracketed("prod")) {
    std::vector<SpacePtr> factors;
    for (const auto& [s, e] : split_args(expr, inner->first, inner->second)) {
      factors.push_back(parse_space_at(expr, s, e));
    }
    return std::make_shared<SupProductSpace>(std::move(factors));
  }
  if (const auto inner = bracketed("xform")) {
    const auto parts = split_args(expr, inner->first, inner->second);
    if (parts.size() != 2)
      throw ExprParseError(inner->first, "xform needs xform[SPACE|FN]");
    SpacePtr base = parse_space_at(expr, parts[0].first, parts[0].second);
    PiecewiseLinearFn fn = parse_fn(expr.substr(parts[1].first, parts[1].second - parts[1].first));
    return std::make_shared<TransformedSpace>(std::move(base), std::move(fn));
  }
  if (const auto inner = bracketed("log")) {
    return std::make_shared<LogScaledSpace>(parse_space_at(expr, inner->first, inner->second));
  }
  throw ExprParseError(from, "unknown space expression");
}

}  // namespace

SpacePtr parse_space(const std::string& expr) { return parse_space_at(expr, 0, expr.size()); }

}  // namespace coarse
