#pragma once

#include <stdexcept>
#include <string>

#include "coarse/metric_space.hpp"
#include "coarse/pl_function.hpp"

namespace coarse {

struct ExprParseError : std::runtime_error {
  ExprParseError(std::size_t position, const std::string& reason)
      : std::runtime_error("parse error at position " + std::to_string(position) + ": " + reason),
        position(position),
        reason(reason) {}
  std::size_t position;
  std::string reason;
};

/// Function expressions:
///   affine:A,B   -> A*r + B
///   id           -> identity
///   sqrt:N       -> chordal encoding of sqrt(r), exact at integers 0..N
///   sq:N         -> chordal encoding of r^2, exact at integers 0..N
///   log1p:N      -> chordal encoding of ln(r+1), exact at integers 0..N
///   pl:PATH      -> JSON file ({"breakpoints": [[x,y],...], "tail_slope": s})
PiecewiseLinearFn parse_fn(const std::string& expr);

/// Space expressions:
///   lattice:N,R               integer box {-R..R}^N with the sup metric
///   csv:PATH                  explicit distance matrix
///   prod[S|S|...]             sup product
///   xform[S|FN]               metric composed with a function expression
///   log[S]                    metric replaced by ln(1 + d), exact
SpacePtr parse_space(const std::string& expr);

}  // namespace coarse
