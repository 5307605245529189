#pragma once

#include <string>
#include <vector>

#include "fbmg/core.hpp"

namespace fbmg {

/// Loads an 8- or 16-bit grayscale or RGB PNG as one field per channel with
/// values in [0, 1]. An alpha channel is dropped.
std::vector<ImageField> load_image(const std::string& path);

/// Writes one (gray) or three (RGB) channels as an 8-bit PNG. Values are
/// clamped to [0, 1] before quantisation.
void save_image(const std::string& path, const std::vector<ImageField>& channels);
void save_image(const std::string& path, const ImageField& gray);

}  // namespace fbmg
