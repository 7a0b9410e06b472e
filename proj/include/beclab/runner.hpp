#pragma once

// Command orchestration for the beclab executable: every command validates the
// configuration first, then writes CSV / JSON artifacts and a manifest.

#include "beclab/config.hpp"
#include "beclab/decoupling.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace beclab {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitVerification = 4,
};

/// Environment variable that overrides --out and the config's output directory.
inline constexpr const char* kOutDirEnv = "BECLAB_OUT_DIR";

struct RunOptions {
  std::string command;
  std::string config_path;  // empty: built-in defaults
  std::string out_dir;      // empty: config output.directory
  std::vector<std::string> overrides;
  int threads = 1;
};

const std::vector<std::string>& command_names();

/// Runs one command; diagnostics go to `err`. Never throws.
int run(const RunOptions& options, std::ostream& err);

/// printf("%.17g"), used for every CSV float.
std::string format_double(double x);

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once; callers write into preallocated slots so results do
/// not depend on scheduling. The first exception is rethrown after joining.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Seeded random (A_e, f) pairs for the factorization check: A_e Hermitian on
/// the fermion sector with entries of order one, f with |f_j| <= 0.6.
std::vector<FactorizationCase> random_factorization_cases(const CoupledSystem& sys, int count,
                                                          std::uint64_t seed);

/// Collects artifacts and the operation log for one run.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  const std::filesystem::path& directory() const { return dir_; }

  /// Marks the operation that subsequent numbers come from.
  void begin(const std::string& operation, Json parameters = Json::object());
  const std::string& current_operation() const { return current_; }

  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);
  void write_json(const std::string& name, const Json& value);

  /// manifest.json: config hash, seed, command, the operation log and outputs.
  void write_manifest(const ExperimentConfig& config, const std::string& command, int exit_code);

 private:
  std::filesystem::path dir_;
  std::string current_;
  Json log_ = Json::array();
};

}  // namespace beclab
