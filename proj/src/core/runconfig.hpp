#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "core/harness.hpp"

namespace ptcov {

using Json = nlohmann::json;

// Strict config helpers: unknown keys are rejected, types are checked, and
// every message names the offending key.
namespace cfg {

void check_keys(const Json& object, const std::string& context,
                const std::vector<std::string>& allowed);
double get_number(const Json& object, const std::string& key, double fallback);
double require_number(const Json& object, const std::string& key, const std::string& context);
long get_integer(const Json& object, const std::string& key, long fallback);
std::string require_string(const Json& object, const std::string& key,
                           const std::string& context);
std::string get_string(const Json& object, const std::string& key, const std::string& fallback);

Window parse_window(const Json& spec);
ShiftTestConfig parse_test_spec(const Json& spec, const std::string& context);
TestEntry parse_test_entry(const Json& spec, const std::string& context);

}  // namespace cfg

}  // namespace ptcov
