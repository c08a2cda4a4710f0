#ifndef SPELLRING_CHECKPOINT_HPP
#define SPELLRING_CHECKPOINT_HPP

#include <string>

#include "spellring/model.hpp"

namespace spellring {

// Checkpoint layout: magic "SPRM", u32 format version, u32 tensor count,
// then per tensor: u32 name length, name bytes, u32 ndim, u32 dims[ndim],
// little-endian f32 payload. Model metadata (modality, dropout, acoustic
// bin count) travels as one-element meta/ tensors.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_model(const ModelParams& params, const std::string& path);
ModelParams load_model(const std::string& path);

}  // namespace spellring

#endif
