#pragma once

#include <filesystem>
#include <string>

#include "lossbal/network/mlp.hpp"

namespace lossbal::nn {

struct Checkpoint {
    MlpParams params;
    NormStats stats;
};

inline constexpr int kCheckpointFormatVersion = 1;
inline constexpr const char* kParameterOrdering = "layer-major/weights-row-major/then-bias";

/// JSON document with format version, config, seed, norm stats, ordering tag
/// and the flattened parameters. Doubles round-trip exactly.
std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace lossbal::nn
