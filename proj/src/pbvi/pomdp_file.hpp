#pragma once

#include <string>
#include <string_view>

#include "pbvi/model.hpp"

namespace pbvi {

/// Rows whose mass is off by at most this much are renormalized; larger
/// deviations are rejected with ModelError.
inline constexpr double kFileRowTolerance = 1e-6;

/// Parses the community `.pomdp` text format.
///
/// Rewards keyed on (a, s, s', z) are collapsed to R(s, a) by taking the
/// expectation over s' and z. `values: cost` negates all rewards. Goal states
/// are taken from `#! goal-states:` directives when present, otherwise from
/// reward lines that name a specific end state with a positive value.
PomdpModel parse_pomdp(std::string_view text);

PomdpModel load_pomdp_file(const std::string& path);

/// Canonical serialization: sparse `T:`/`O:` entries, one `R: a : s : * : *`
/// line per nonzero reward, 17 significant digits, `#!` directives for goal and
/// terminal states. parse_pomdp(write_pomdp(m)) reproduces m exactly.
std::string write_pomdp(const PomdpModel& model);

/// Policy text: `discount:` and `states:` header lines, then one block per
/// alpha vector made of an action-index line and a coefficient line.
std::string write_policy(const ValueFunction& vf, const PomdpModel& model);
ValueFunction read_policy(std::string_view text, const PomdpModel& model);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace pbvi
