#pragma once

#include <string>

#include <json.hpp>

namespace oshi::util {

// Throws Error{FileNotFound}.
std::string readTextFile(const std::string& path);
// Throws Error{FileNotFound} or Error{SchemaViolation} on malformed JSON.
nlohmann::json readJsonFile(const std::string& path);
// Throws Error{InvalidArgument} if the file cannot be written.
void writeTextFile(const std::string& path, const std::string& text);

}  // namespace oshi::util
