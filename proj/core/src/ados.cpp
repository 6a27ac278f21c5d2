#include "skelgait/ados.hpp"

#include <algorithm>
#include <cmath>

#include "skelgait/errors.hpp"

namespace skelgait {

std::string_view to_string(AdosClass c) {
  switch (c) {
    case AdosClass::NS: return "NS";
    case AdosClass::ASD: return "ASD";
    case AdosClass::AUT: return "AUT";
    case AdosClass::Unclassifiable: return "Unclassifiable";
  }
  return "Unclassifiable";
}

std::optional<AdosClass> parse_ados_class(std::string_view text) {
  for (AdosClass c : {AdosClass::NS, AdosClass::ASD, AdosClass::AUT, AdosClass::Unclassifiable}) {
    if (text == to_string(c)) return c;
  }
  return std::nullopt;
}

AdosClass ados_classify(const AdosRecord& r) {
  const int s = r.score;
  const int a = r.age_years;
  if (r.module_id == 1) {
    if (a >= 3 && a <= 6 && s <= 10) return AdosClass::NS;
    if (a >= 6 && s > 10 && s <= 15) return AdosClass::ASD;
    if (a >= 3 && a <= 6 && s > 15) return AdosClass::AUT;
    return AdosClass::Unclassifiable;
  }
  if (r.module_id == 2) {
    const bool young = a == 3 || a == 4;
    const bool older = a == 5 || a == 6;
    if (young && (s == 6 || s == 7)) return AdosClass::NS;
    if (older && s <= 6) return AdosClass::NS;
    if (young && s > 6 && s <= 9) return AdosClass::ASD;
    if (older && s == 8) return AdosClass::ASD;
    if (young && s > 9) return AdosClass::AUT;
    if (older && s > 8) return AdosClass::AUT;
    return AdosClass::Unclassifiable;
  }
  throw ValidationError("ados_classify: module must be 1 or 2, got " + std::to_string(r.module_id));
}

namespace {
int clamp_score(double s) { return static_cast<int>(std::max(0.0, s)); }
}  // namespace

AdosClass classify_prediction(double predicted, int module_id, int age_years) {
  return ados_classify({clamp_score(std::round(predicted)), module_id, age_years});
}

std::vector<AdosClass> tolerant_classes(double predicted, int module_id, int age_years,
                                        double tolerance) {
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be >= 0");
  std::vector<AdosClass> out;
  const double lo = std::max(0.0, std::ceil(predicted - tolerance));
  const double hi = std::floor(predicted + tolerance);
  for (double s = lo; s <= hi; s += 1.0) {
    const AdosClass c = ados_classify({static_cast<int>(s), module_id, age_years});
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  if (out.empty()) out.push_back(classify_prediction(predicted, module_id, age_years));
  return out;
}

bool tolerant_match(double predicted, const AdosRecord& truth, double tolerance) {
  const AdosClass want = ados_classify(truth);
  const auto got = tolerant_classes(predicted, truth.module_id, truth.age_years, tolerance);
  return std::find(got.begin(), got.end(), want) != got.end();
}

}  // namespace skelgait
