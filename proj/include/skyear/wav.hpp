#pragma once

#include <filesystem>

#include "skyear/scene.hpp"

namespace skyear {

// 16-bit PCM, little-endian, interleaved. Sample value s maps to
// s / full_scale_pa * 32767, clipped to the int16 range.
void write_wav(const std::filesystem::path& path, const MultiChannelClip& clip, double full_scale_pa);

struct WavData {
  MultiChannelClip clip;
  int bits_per_sample = 16;
};

// Samples come back scaled by full_scale_pa / 32767.
WavData read_wav(const std::filesystem::path& path, double full_scale_pa);

// Smallest full scale that avoids clipping, for per-file scaling.
double peak_full_scale(const MultiChannelClip& clip);

}  // namespace skyear
