#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace specclust {

/// A bad key, value or combination. line is 0 when the problem is not tied
/// to one config line (e.g. a missing key or a command-line flag).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, std::size_t line, std::string field, const std::string& what);
  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string field_;
};

enum class ExperimentKind { RatioSurface, SweepGammaAlpha, SweepN, ZeroComm, LinkPred, AnalyticAccuracy };

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(const std::string& text);

/// Raw key=value pairs with the line each came from. Later lines override
/// earlier ones.
struct KeyValues {
  struct Entry {
    std::string value;
    std::string source;
    std::size_t line = 0;
  };
  std::map<std::string, Entry> entries;

  void set(const std::string& key, std::string value, std::string source, std::size_t line);
};

/// `key = value` per line; '#' starts a comment, blank lines are ignored.
KeyValues parse_key_values(std::istream& in, const std::string& source);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::RatioSurface;
  std::uint64_t seed = 1;
  std::size_t replicates = 20;
  std::string out;

  // single-model keys
  std::size_t n = 1000;
  double pi = 0.5;
  double alpha = 0.01;
  double beta = 0.01;
  double gamma = 0.002;

  // grids
  std::vector<double> alpha_grid;
  std::vector<double> beta_grid;
  std::vector<double> ratio_grid;  // gamma / alpha
  std::vector<std::size_t> n_grid;

  // sweep
  std::string transfer = "procrustes";  // or "refit"
  double lcc_fraction = 0.95;

  // link prediction
  std::string snapshots;  // manifest path; empty uses a synthetic stream
  std::size_t snapshot_count = 3;
  double persistence = 0.5;
  std::size_t sample_nodes = 100;
  std::size_t runs = 5;
  std::vector<int> k_grid;
  double katz_theta = 0;  // <= 0 picks 0.8 / lambda_1

  // analytic accuracy
  double min_separation = 0;  // skip cells with |lambda_2| below this multiple of 2 sqrt(n rho (1 - rho))
};

/// Just the blockmodel keys (n, pi, alpha, beta, gamma, seed) for one-shot
/// commands. Other keys are rejected.
struct ModelConfig {
  std::size_t n = 1000;
  double pi = 0.5;
  double alpha = 0.01;
  double beta = 0.01;
  double gamma = 0.002;
  std::uint64_t seed = 1;
};

ModelConfig build_model_config(const KeyValues& kv);

/// Every recognised key; flags on the command line use the same names.
const std::vector<std::string>& config_keys();

/// Fills a config from key=value pairs on top of the kind's defaults and
/// validates it. Throws ConfigError naming the offending line and key.
ExperimentConfig build_config(const KeyValues& kv, std::optional<ExperimentKind> forced_kind = std::nullopt);

/// Grid and range checks; throws ConfigError.
void validate(const ExperimentConfig& cfg);

/// Defaults for the grids of one experiment kind.
ExperimentConfig default_config(ExperimentKind kind);

/// `key=value` lines that rebuild the config.
std::string describe(const ExperimentConfig& cfg);

}  // namespace specclust
