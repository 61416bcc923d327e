#pragma once

#include <cstdint>
#include <vector>

#include "skyear/scene.hpp"

namespace skyear {

// Fixed-capacity M-channel circular audio store. Sample i of the stream
// (counting from the first push) is stamped origin + i / fs.
class RingBuffer {
 public:
  RingBuffer(int channels, double fs, double capacity_s, double origin = 0.0);

  int channels() const { return static_cast<int>(store_.size()); }
  double fs() const { return fs_; }
  double capacity() const { return static_cast<double>(capacity_) / fs_; }
  // Time stamp one past the newest stored sample.
  double clock() const { return origin_ + static_cast<double>(written_) / fs_; }
  double stored_span() const { return static_cast<double>(stored()) / fs_; }
  std::uint64_t samples_written() const { return written_; }

  void push(const MultiChannelClip& frame);

  // Copy of [t_trig - retro, t_trig + post), sample-exact. The buffer is not modified.
  MultiChannelClip extract(double t_trig, double retro, double post) const;

 private:
  std::size_t stored() const { return written_ < capacity_ ? static_cast<std::size_t>(written_) : capacity_; }

  double fs_;
  double origin_;
  std::size_t capacity_;
  std::uint64_t written_ = 0;
  std::vector<std::vector<double>> store_;
};

}  // namespace skyear
