#include "coarse/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace coarse {

std::string format_number(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

double round12(double v) {
  const std::string s = format_number(v);
  double out = v;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

nlohmann::json to_json(const PiecewiseLinearFn& f) {
  nlohmann::json bps = nlohmann::json::array();
  for (const auto& b : f.breakpoints()) {
    bps.push_back(nlohmann::json::array({round12(b.x), round12(b.y)}));
  }
  return nlohmann::json{{"breakpoints", std::move(bps)}, {"tail_slope", round12(f.tail_slope())}};
}

PiecewiseLinearFn pl_fn_from_json(const nlohmann::json& j) {
  if (!j.contains("breakpoints") || !j.contains("tail_slope"))
    throw std::invalid_argument("piecewise-linear JSON: missing breakpoints or tail_slope");
  std::vector<Breakpoint> bps;
  for (const auto& pair : j.at("breakpoints")) {
    if (!pair.is_array() || pair.size() != 2)
      throw std::invalid_argument("piecewise-linear JSON: breakpoints must be [x, y] pairs");
    bps.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return PiecewiseLinearFn(std::move(bps), j.at("tail_slope").get<double>());
}

nlohmann::json to_json(const FlatteningSchedule& schedule) {
  nlohmann::json a = nlohmann::json::array();
  for (const double v : schedule.anchors()) a.push_back(round12(v));
  return nlohmann::json{
      {"a", std::move(a)}, {"c", to_json(schedule.fn())}, {"source", schedule.source()}};
}

nlohmann::json to_json(const QISchedulePair& pair) {
  nlohmann::json a = nlohmann::json::array();
  for (const double v : pair.domain_anchors()) a.push_back(round12(v));
  nlohmann::json b = nlohmann::json::array();
  for (const double v : pair.codomain_anchors()) b.push_back(round12(v));
  return nlohmann::json{{"a", std::move(a)},
                        {"b", std::move(b)},
                        {"c_X", to_json(pair.domain_fn())},
                        {"c_Y", to_json(pair.codomain_fn())}};
}

PiecewiseLinearFn load_pl_fn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  // Schedule files carry the function under "c"; accept both layouts.
  if (j.contains("c")) return pl_fn_from_json(j.at("c"));
  return pl_fn_from_json(j);
}

void save_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace coarse
