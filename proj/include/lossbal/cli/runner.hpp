#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lossbal/cli/config.hpp"
#include "lossbal/diagnostics/spectrum.hpp"
#include "lossbal/diagnostics/stiffness.hpp"
#include "lossbal/problems/problem.hpp"
#include "lossbal/training/trainer.hpp"

namespace lossbal::cli {

/// Problem instance for one seed. The Sobolev target, splits and Poisson
/// samples all derive from the seed.
problems::ProblemData build_problem(const RunConfig& cfg, std::uint64_t seed);
nn::MlpConfig network_config(const RunConfig& cfg, std::uint64_t seed);
/// Training settings for one seed, including the forgetting stage schedule.
train::TrainingConfig training_config(const RunConfig& cfg, std::uint64_t seed);

struct SeedResult {
    std::uint64_t seed = 0;
    problems::ProblemData problem;
    train::TrainingTrace trace;
};

SeedResult run_seed(const RunConfig& cfg, std::uint64_t seed, const train::EpochCallback& on_epoch = {});

/// Power spectra of the target and of the trained network on the problem's grid.
struct SpectrumPair {
    diag::SpectrumResult target;
    diag::SpectrumResult model;
};
std::optional<SpectrumPair> final_spectra(const SeedResult& result);

/// Writes metrics, lambda trajectory, spectra, histograms and checkpoints for
/// one seed into `dir`; returns the file names written.
std::vector<std::string> write_seed_outputs(const RunConfig& cfg, const SeedResult& result,
                                            const std::filesystem::path& dir);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct ManifestEntry {
    std::string file;
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunReport {
    std::filesystem::path dir;
    std::vector<ManifestEntry> files;
    /// Failed seeds with their diagnostics; a non-empty list marks the run partial.
    std::vector<std::pair<std::uint64_t, std::string>> failures;
    bool complete() const { return failures.empty(); }
};

/// Runs every seed (in parallel over `jobs` workers), writes all artifacts and
/// manifest.json into cfg.output.dir. Progress lines go to `log`.
RunReport run(const RunConfig& cfg, std::size_t jobs, std::ostream& log);

/// Stiffness probe for every configured order; writes stiffness_probe.csv,
/// per-seed ratios, the sensitivity table and manifest.json.
RunReport probe(const RunConfig& cfg, std::ostream& log);

/// Output directory after applying the LOSSBAL_OUTPUT_ROOT override to a relative path.
std::filesystem::path resolve_output_dir(const std::filesystem::path& dir);

struct CompareRow {
    std::string run;
    std::string problem;
    std::string strategy;
    std::size_t seeds = 0;
    double l2_mean = 0, l2_std = 0;
    std::optional<double> l1_mean, l1_std;
};

/// Reads finished run directories. Throws on missing or partial runs and on
/// mixed problems or seed sets.
std::vector<CompareRow> compare(const std::vector<std::filesystem::path>& dirs);
void write_compare_csv(const std::filesystem::path& path, const std::vector<CompareRow>& rows);
void print_compare_table(std::ostream& out, const std::vector<CompareRow>& rows);

/// Checks "[l1:|l2:]A<B" (strategy names; "<=" also accepted) against the rows.
/// Returns false when the ordering does not hold.
bool check_ordering(const std::vector<CompareRow>& rows, const std::string& expectation, std::string& detail);

}  // namespace lossbal::cli
