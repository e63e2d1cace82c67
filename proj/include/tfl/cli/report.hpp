#pragma once

#include <json.hpp>

#include <optional>
#include <string>

#include "tfl/cli/problem.hpp"

namespace tfl::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "tfl-report/1";

enum class Status { Ok, ConditionsFailed, IntegrationFailed, AdaptationFailed, InvalidProblem, InternalError };
const char* to_string(Status s);

// Report tree. Field order is fixed so serialized reports are stable.
// `analysis` is absent when the problem could not be analyzed and
// `solution` when Algorithm 1 was not run or did not finish.
Json make_report(const std::string& command, const Problem* problem, const algo::Analysis* analysis,
                 const algo::TFLReport* solution, Status status, const std::string& error = {});

// Human-readable summary of a report tree.
std::string render_text(const Json& report);

} // namespace tfl::cli
