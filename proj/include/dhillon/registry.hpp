#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dhillon/dataset.hpp"

namespace dhillon {

/// Names of the embedded failure-time samples.
std::vector<std::string> builtin_names();

/// "diesel_engine" (62 values) or "line_divider" (82 values); nullopt otherwise.
std::optional<Dataset> builtin_dataset(std::string_view name);

/// Parses a single column of times, either headerless or under a `time`
/// header. Blank lines are skipped. Throws DomainError naming the 1-based row
/// of the first value that is not a positive finite number.
Dataset parse_times_csv(std::string_view text, std::string label = {});

/// Builtin name first, then a CSV path. Throws DomainError when neither works.
Dataset resolve_dataset(const std::string& name_or_path);

}  // namespace dhillon
