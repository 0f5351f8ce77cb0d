#include "run_dir.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "kswave/error.hpp"

#ifndef KSWAVE_VERSION
#define KSWAVE_VERSION "0.0.0"
#endif

namespace kswave::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::ConfigError, "SHA-256 computation failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunDirectory::RunDirectory(std::filesystem::path root, const std::string& command, const Json& config,
                           const std::string& explicit_dir)
    : command_(command), config_(config), started_(utc_timestamp()) {
  namespace fs = std::filesystem;
  if (!explicit_dir.empty()) {
    path_ = explicit_dir;
  } else {
    std::string stamp = started_;
    stamp.erase(std::remove(stamp.begin(), stamp.end(), ':'), stamp.end());
    const std::string base = command + "_" + stamp + "_" + sha256_hex(config.dump()).substr(0, 8);
    path_ = root / base;
    for (int k = 1; fs::exists(path_); ++k) path_ = root / (base + "_" + std::to_string(k));
  }
  fs::create_directories(path_);
}

void RunDirectory::write(const std::string& relative, const std::string& content) {
  const auto full = path_ / relative;
  std::filesystem::create_directories(full.parent_path());
  std::ofstream out(full, std::ios::binary);
  out << content;
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + full.string());
  outputs_.push_back({{"path", relative}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
}

void RunDirectory::add_input(const std::filesystem::path& file) {
  inputs_.push_back({{"path", file.string()}, {"sha256", sha256_file(file)}});
}

void RunDirectory::finish(const Json& summary) {
  Json m{{"command", command_},
         {"tool_version", KSWAVE_VERSION},
         {"schema_versions", {{"sweep_csv", 1}, {"profile_csv", 1}, {"snapshot_csv", 1}}},
         {"started", started_},
         {"finished", utc_timestamp()},
         {"config", config_},
         {"inputs", inputs_},
         {"outputs", outputs_},
         {"summary", summary}};
  std::ofstream out(path_ / "manifest.json");
  out << m.dump(2) << '\n';
}

}  // namespace kswave::cli
