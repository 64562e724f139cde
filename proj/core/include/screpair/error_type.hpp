#pragma once

#include <array>
#include <string_view>

namespace screpair {

enum class ErrorType { kME1 = 1, kME2, kME3, kME4, kME5, kME6, kME7, kME8, kME9, kME10 };

inline constexpr std::array<ErrorType, 10> kAllErrorTypes{
    ErrorType::kME1, ErrorType::kME2, ErrorType::kME3, ErrorType::kME4, ErrorType::kME5,
    ErrorType::kME6, ErrorType::kME7, ErrorType::kME8, ErrorType::kME9, ErrorType::kME10};

enum class Difficulty { kEasy, kMedium, kHard };

std::string_view error_type_name(ErrorType type);   // "ME1" .. "ME10"
std::string_view error_type_label(ErrorType type);  // e.g. "Capacity Reduction"
Difficulty error_type_difficulty(ErrorType type);
std::string_view difficulty_name(Difficulty d);     // "easy" | "medium" | "hard"
// Accepts "ME4", "me4", "ME-4" and "4". Throws InvalidInput otherwise.
ErrorType parse_error_type(std::string_view text);
inline int error_type_index(ErrorType type) { return static_cast<int>(type) - 1; }

}  // namespace screpair
