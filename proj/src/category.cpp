#include "normcluster/category.hpp"

#include <algorithm>
#include <cctype>

namespace normcluster {

namespace {
constexpr std::array<std::pair<Category, std::string_view>, 5> kNames = {{
    {Category::Deontological, "Deontological"},
    {Category::Rawlsian, "Rawlsian"},
    {Category::Procedural, "Procedural"},
    {Category::Libertarian, "Libertarian"},
    {Category::NonNormative, "NonNormative"},
}};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}
}  // namespace

std::string_view to_string(Category c) noexcept {
  for (const auto& [cat, name] : kNames) {
    if (cat == c) return name;
  }
  return "?";
}

std::optional<Category> parse_category(std::string_view name) noexcept {
  for (const auto& [cat, n] : kNames) {
    if (n == name) return cat;
  }
  return std::nullopt;
}

std::optional<Category> parse_category_icase(std::string_view name) noexcept {
  for (const auto& [cat, n] : kNames) {
    if (iequals(n, name)) return cat;
  }
  return std::nullopt;
}

std::size_t normative_index(Category c) noexcept {
  const auto it = std::find(kNormativeCategories.begin(), kNormativeCategories.end(), c);
  return static_cast<std::size_t>(it - kNormativeCategories.begin());
}

}  // namespace normcluster
