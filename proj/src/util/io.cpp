#include "oshi/util/io.hpp"

#include <fstream>
#include <sstream>

#include "oshi/error.hpp"

namespace oshi::util {

std::string readTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json readJsonFile(const std::string& path) {
  const auto text = readTextFile(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, path + ": " + e.what(), "/");
  }
}

void writeTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path, path);
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, "write failed: " + path, path);
}

}  // namespace oshi::util
