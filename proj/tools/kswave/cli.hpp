#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kswave/error.hpp"
#include "kswave/serialize.hpp"

namespace kswave::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCertification = 3;
inline constexpr int kExitNumerical = 4;

/// Default output root when --out is not given.
inline constexpr const char* kOutputRootEnv = "KSWAVE_OUTPUT_ROOT";

inline constexpr const char* kSweepHeader =
    "mu,beta,D,chi_id,c_star_closed,c_star_empirical,abs_err,outcome_counts";

/// const:<k> | affine:<a>,<b> | table:<path> | rel:<f> (constant f * mu).
/// Table files hold "v,value" rows; blank lines, '#' comments and a
/// non-numeric header are skipped.
ChiFunction parse_chi(const std::string& spec, double mu = 1.0);

/// Exit code for a library error: 2 for configuration problems, 4 otherwise.
int exit_code_for(ErrorCode code);

/// Output of `speed --json`.
Json speed_json(const ModelParams& p);

struct SweepSpec {
  std::vector<double> mu;
  std::vector<double> beta;
  std::vector<double> diff;
  std::vector<std::string> chi;
  double tol = 1e-3;
  int parallelism = 1;
  std::size_t cap = 10000;
};

struct SweepRow {
  double mu = 0.0;
  double beta = 0.0;
  double diff = 0.0;
  std::string chi_id;
  double c_star_closed = 0.0;
  std::optional<double> c_star_empirical;  // empty when the row failed
  std::string outcome_counts;              // "Kind:count;..." over all shots
  std::string error;
  Json detail;  // bracket, trials

  double abs_err() const;
};

/// Throws ConfigError for an empty axis or a grid larger than the cap.
void validate_sweep(const SweepSpec& spec);

/// One row per grid point, mu outermost and chi innermost.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Full command-line entry point; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kswave::cli
