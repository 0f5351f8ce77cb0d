#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kswave/serialize.hpp"

namespace kswave::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);
std::string utc_timestamp();

/// Output directory of one command invocation. Every file written through
/// write() is listed in manifest.json with its SHA-256.
class RunDirectory {
 public:
  RunDirectory(std::filesystem::path root, const std::string& command, const Json& config,
               const std::string& explicit_dir = "");

  const std::filesystem::path& path() const { return path_; }
  void write(const std::string& relative, const std::string& content);
  void add_input(const std::filesystem::path& file);
  /// Writes manifest.json; `summary` is stored under "summary".
  void finish(const Json& summary = Json::object());

 private:
  std::filesystem::path path_;
  std::string command_;
  Json config_;
  std::string started_;
  Json inputs_ = Json::array();
  Json outputs_ = Json::array();
};

}  // namespace kswave::cli
