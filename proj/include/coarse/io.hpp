#pragma once

#include <string>

#include <json.hpp>

#include "coarse/flattening.hpp"
#include "coarse/pl_function.hpp"
#include "coarse/qi_repair.hpp"

namespace coarse {

/// Locale-independent decimal rendering with at most 12 significant digits
/// ('.' decimal point, no grouping). Shared by every CSV and JSON writer so
/// identical runs produce identical bytes.
std::string format_number(double v);

/// The double nearest to the 12-significant-digit decimal rendering of v.
double round12(double v);

nlohmann::json to_json(const PiecewiseLinearFn& f);
PiecewiseLinearFn pl_fn_from_json(const nlohmann::json& j);

/// {"a": [...], "c": {...}, "source": "..."}
nlohmann::json to_json(const FlatteningSchedule& schedule);

/// {"a": [...], "b": [...], "c_X": {...}, "c_Y": {...}}
nlohmann::json to_json(const QISchedulePair& pair);

PiecewiseLinearFn load_pl_fn(const std::string& path);
void save_json(const nlohmann::json& j, const std::string& path);

}  // namespace coarse
