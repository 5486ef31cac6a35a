#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lossbal/balancing/weights.hpp"
#include "lossbal/network/mlp.hpp"
#include "lossbal/problems/poisson.hpp"
#include "lossbal/problems/sobolev.hpp"
#include "lossbal/training/trainer.hpp"

namespace lossbal::cli {

enum class ProblemKind { Sobolev, Poisson, StiffnessProbe, Forgetting };

std::string_view to_string(ProblemKind p);
ProblemKind parse_problem(std::string_view name);

struct ForgettingConfig {
    /// Stage s (0-based) starts at s * stage_length and activates objectives 0..s.
    std::size_t stage_length = 600;
    bool reset_lambda = true;
};

struct ProbeConfig {
    std::vector<int> orders{1, 2};
    std::vector<int> wavenumbers{2, 4, 8};
    std::size_t grid = 64;
    bool target_driven = true;
    int max_retries = 5;
    /// Grid side for the spectral-sensitivity table; 0 disables it.
    std::size_t sensitivity_grid = 32;
};

struct OutputConfig {
    std::filesystem::path dir = "runs/default";
    /// Epochs at which gradient histograms and residual spectra are recorded.
    std::vector<std::size_t> snapshot_epochs;
    /// Epochs at which checkpoints are written, in addition to the final one.
    std::vector<std::size_t> checkpoint_epochs;
    std::size_t histogram_bins = 60;
    bool spectra = true;
};

struct RunConfig {
    /// Preset chain, outermost last.
    std::vector<std::string> presets;
    ProblemKind problem = ProblemKind::Sobolev;
    balance::Strategy strategy = balance::Strategy::InverseDirichlet;
    nn::MlpConfig network;
    train::TrainingConfig training;
    problems::SobolevConfig sobolev;
    problems::PoissonConfig poisson;
    ForgettingConfig forgetting;
    ProbeConfig probe;
    OutputConfig output;
    std::vector<std::uint64_t> seeds{0};

    /// Cross-field checks; throws ConfigError naming the field.
    void validate() const;
};

/// Names of the built-in presets.
std::vector<std::string> preset_names();
/// YAML text of a built-in preset.
std::string preset_source(std::string_view name);

RunConfig load_preset(std::string_view name);
/// Parses YAML text. `origin` labels errors.
RunConfig parse_config_string(const std::string& text, const std::string& origin = "<string>");
RunConfig parse_config(const std::filesystem::path& path);

/// Seeds seed, seed + 1, ..., seed + count - 1.
void set_repetitions(RunConfig& cfg, std::uint64_t first_seed, std::size_t count);

/// Canonical YAML rendering of every field.
std::string to_yaml(const RunConfig& cfg);

}  // namespace lossbal::cli
