#include "mevir/profiles.hpp"

#include <algorithm>
#include <cctype>

namespace mevir {
namespace {

constexpr std::array<std::string_view, kFoundationCount> kFoundationNames = {
    "care", "fairness_equity", "fairness_proportionality", "liberty", "loyalty", "authority", "purity"};

constexpr std::array<std::string_view, kMacDomainCount> kMacNames = {
    "kin", "group", "reciprocity", "heroism", "deference", "fairness", "property", "pathogen"};

std::string lowered(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string_view to_string(Foundation f) { return kFoundationNames[static_cast<std::size_t>(f)]; }
std::string_view to_string(MacDomain d) { return kMacNames[static_cast<std::size_t>(d)]; }

std::optional<Foundation> parse_foundation(std::string_view name) {
  const std::string key = lowered(name);
  for (std::size_t i = 0; i < kFoundationNames.size(); ++i)
    if (kFoundationNames[i] == key) return static_cast<Foundation>(i);
  return std::nullopt;
}

std::optional<MacDomain> parse_mac_domain(std::string_view name) {
  const std::string key = lowered(name);
  for (std::size_t i = 0; i < kMacNames.size(); ++i)
    if (kMacNames[i] == key) return static_cast<MacDomain>(i);
  return std::nullopt;
}

FramingVector::FramingVector(const Values& values) : values_(values) {
  for (double v : values_)
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("framing component outside [0,1]");
}

bool FramingVector::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

}  // namespace mevir
