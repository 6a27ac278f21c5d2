#pragma once

#include <filesystem>
#include <optional>

#include "skelgait/clip_features.hpp"
#include "skelgait/network.hpp"
#include "skelgait/svr.hpp"

namespace skelgait {

/// Everything `predict` needs: the network, and optionally the clip layout and the score
/// regressor fitted on top of it.
struct Checkpoint {
  Network network;
  std::optional<ClipConfig> clips;
  std::optional<SvrModel> svr;
};

inline constexpr int kCheckpointVersion = 1;

/// JSON document: a config echo plus named, shaped, flat parameter arrays (row-major).
/// Identical checkpoints serialize to identical bytes.
std::string checkpoint_to_string(const Checkpoint& ckpt);
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
/// Throws IoError, ParseError, or ValidationError when names or shapes disagree with the config.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace skelgait
