#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace coopfarm {

enum class ScenarioErrorKind { missing_file, parse, validation };

// Raised while reading a scenario or report. For validation errors,
// field_path names the offending value, e.g. "farms[0].quality".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(ScenarioErrorKind kind, std::string field_path, const std::string& message)
      : std::runtime_error(message), kind_(kind), field_path_(std::move(field_path)) {}

  ScenarioErrorKind kind() const { return kind_; }
  const std::string& field_path() const { return field_path_; }

 private:
  ScenarioErrorKind kind_;
  std::string field_path_;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace coopfarm
