#include "skyear/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "skyear/error.hpp"

namespace skyear {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

std::uint16_t get_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | p[1] << 8); }

}  // namespace

double peak_full_scale(const MultiChannelClip& clip) {
  double peak = 0.0;
  for (const Waveform& ch : clip.channels) {
    for (double v : ch.samples) peak = std::max(peak, std::abs(v));
  }
  return peak > 0.0 ? peak : 1.0;
}

void write_wav(const std::filesystem::path& path, const MultiChannelClip& clip, double full_scale_pa) {
  clip.validate();
  const auto channels = static_cast<std::uint16_t>(clip.count());
  const auto frames = static_cast<std::uint32_t>(clip.length());
  const auto rate = static_cast<std::uint32_t>(std::lround(clip.fs()));
  const std::uint32_t data_bytes = frames * channels * 2U;

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  for (char c : std::string_view("RIFF")) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, 36 + data_bytes);
  for (char c : std::string_view("WAVEfmt ")) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, channels);
  put_u32(out, rate);
  put_u32(out, rate * channels * 2U);
  put_u16(out, static_cast<std::uint16_t>(channels * 2U));
  put_u16(out, 16);
  for (char c : std::string_view("data")) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, data_bytes);

  const double scale = 32767.0 / full_scale_pa;
  for (std::uint32_t i = 0; i < frames; ++i) {
    for (std::uint16_t m = 0; m < channels; ++m) {
      const double v = std::clamp(std::round(clip.channels[m].samples[i] * scale), -32768.0, 32767.0);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

WavData read_wav(const std::filesystem::path& path, double full_scale_pa) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::string_view(reinterpret_cast<const char*>(bytes.data()), 4) != "RIFF" ||
      std::string_view(reinterpret_cast<const char*>(bytes.data() + 8), 4) != "WAVE") {
    throw Error(ErrorCode::FormatError, path.string() + " is not a RIFF/WAVE file");
  }
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  const std::uint8_t* data = nullptr;
  std::uint32_t data_size = 0;
  while (pos + 8 <= bytes.size()) {
    const std::string_view id(reinterpret_cast<const char*>(bytes.data() + pos), 4);
    const std::uint32_t size = get_u32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw Error(ErrorCode::FormatError, "truncated chunk in " + path.string());
    if (id == "fmt ") {
      if (get_u16(bytes.data() + body) != 1) throw Error(ErrorCode::FormatError, "only PCM WAV is supported");
      channels = get_u16(bytes.data() + body + 2);
      rate = get_u32(bytes.data() + body + 4);
      bits = get_u16(bytes.data() + body + 14);
    } else if (id == "data") {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1U);
  }
  if (data == nullptr || channels == 0 || bits != 16) {
    throw Error(ErrorCode::FormatError, path.string() + ": expected 16-bit PCM with a data chunk");
  }
  const std::size_t frames = data_size / (2U * channels);
  WavData out;
  out.clip.channels.assign(channels, Waveform{std::vector<double>(frames), static_cast<double>(rate)});
  const double scale = full_scale_pa / 32767.0;
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::uint16_t m = 0; m < channels; ++m) {
      const auto raw = static_cast<std::int16_t>(get_u16(data + 2 * (i * channels + m)));
      out.clip.channels[m].samples[i] = raw * scale;
    }
  }
  return out;
}

}  // namespace skyear
