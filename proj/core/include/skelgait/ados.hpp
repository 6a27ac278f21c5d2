#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "skelgait/skeleton.hpp"

namespace skelgait {

enum class AdosClass { NS, ASD, AUT, Unclassifiable };

std::string_view to_string(AdosClass c);
std::optional<AdosClass> parse_ados_class(std::string_view text);

/// Rule table for ADOS modules 1 and 2. Combinations the table does not cover give
/// Unclassifiable. Throws ValidationError for a module other than 1 or 2.
///
/// Module 2, age 3-4, score 6-7 reads NS even though 6 < 7 <= 9 also matches the ASD
/// row; NS is checked first.
AdosClass ados_classify(const AdosRecord& record);

/// Classes reachable from a predicted score within +-tolerance: every integer score in
/// [predicted - tolerance, predicted + tolerance] (clamped at 0) is classified with the
/// record's module and age. When the window holds no integer, round(predicted) is used.
std::vector<AdosClass> tolerant_classes(double predicted, int module_id, int age_years,
                                        double tolerance);

/// Class of round(predicted), clamped at 0.
AdosClass classify_prediction(double predicted, int module_id, int age_years);

/// True when the clinician record's class is among tolerant_classes(predicted, ...).
bool tolerant_match(double predicted, const AdosRecord& truth, double tolerance);

}  // namespace skelgait
