#pragma once

namespace lnsforge {

// Bumped whenever the node/edge feature layout changes (see docs/features.md).
// Checkpoints record the version they were trained with; a mismatch at load
// time is an error.
inline constexpr int kFeatureVersion = 1;

// Version of the on-disk record schemas (instances, trajectories, episodes).
inline constexpr int kSchemaVersion = 1;

}  // namespace lnsforge
