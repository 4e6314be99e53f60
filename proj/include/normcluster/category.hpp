#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace normcluster {

/// The four normative theories of tax justice, plus a marker for sentences
/// that the classifier gate rejects.
enum class Category {
  Deontological,
  Rawlsian,
  Procedural,
  Libertarian,
  NonNormative,
};

inline constexpr std::size_t kNormativeCategoryCount = 4;

/// Normative categories in lexicographic order of their names. Reports use
/// this order for columns and for breaking majority ties.
inline constexpr std::array<Category, kNormativeCategoryCount> kNormativeCategories = {
    Category::Deontological, Category::Libertarian, Category::Procedural, Category::Rawlsian};

std::string_view to_string(Category c) noexcept;

/// Exact (case-sensitive) name lookup; returns nullopt for unknown names.
std::optional<Category> parse_category(std::string_view name) noexcept;

/// Like parse_category but ignores ASCII case.
std::optional<Category> parse_category_icase(std::string_view name) noexcept;

inline bool is_normative(Category c) noexcept { return c != Category::NonNormative; }

/// Dense index 0..3 into kNormativeCategories. Precondition: is_normative(c).
std::size_t normative_index(Category c) noexcept;

}  // namespace normcluster
