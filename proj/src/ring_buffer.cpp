#include "skyear/ring_buffer.hpp"

#include <cmath>
#include <string>

#include "skyear/error.hpp"

namespace skyear {

RingBuffer::RingBuffer(int channels, double fs, double capacity_s, double origin)
    : fs_(fs),
      origin_(origin),
      capacity_(static_cast<std::size_t>(std::llround(capacity_s * fs))),
      store_(static_cast<std::size_t>(channels), std::vector<double>(capacity_, 0.0)) {}

void RingBuffer::push(const MultiChannelClip& frame) {
  frame.validate();
  if (frame.count() != channels() || frame.fs() != fs_) {
    throw Error(ErrorCode::ChannelMismatch, "frame has " + std::to_string(frame.count()) + " channels, buffer has " +
                                                std::to_string(channels()));
  }
  const std::size_t n = frame.length();
  // Only the newest `capacity_` samples of an oversized frame survive.
  const std::size_t skip = n > capacity_ ? n - capacity_ : 0;
  for (std::size_t m = 0; m < store_.size(); ++m) {
    const auto& src = frame.channels[m].samples;
    auto& dst = store_[m];
    std::size_t slot = static_cast<std::size_t>((written_ + skip) % capacity_);
    for (std::size_t i = skip; i < n; ++i) {
      dst[slot] = src[i];
      if (++slot == capacity_) slot = 0;
    }
  }
  written_ += n;
}

MultiChannelClip RingBuffer::extract(double t_trig, double retro, double post) const {
  const double window = retro + post;
  if (window > capacity() + 0.5 / fs_) {
    throw Error(ErrorCode::WindowTooLong, "window of " + std::to_string(window) + " s exceeds buffer of " +
                                              std::to_string(capacity()) + " s");
  }
  const long long start = std::llround((t_trig - retro - origin_) * fs_);
  const long long count = std::llround(window * fs_);
  const long long oldest = static_cast<long long>(written_) - static_cast<long long>(stored());
  if (start < oldest || start + count > static_cast<long long>(written_)) {
    throw Error(ErrorCode::WindowNotBuffered, "window starting at " + std::to_string(t_trig - retro) +
                                                  " s is not inside the buffered span");
  }
  MultiChannelClip out;
  out.start_time = origin_ + static_cast<double>(start) / fs_;
  out.channels.reserve(store_.size());
  for (const auto& ring : store_) {
    Waveform w{std::vector<double>(static_cast<std::size_t>(count)), fs_};
    std::size_t slot = static_cast<std::size_t>(start % static_cast<long long>(capacity_));
    for (auto& v : w.samples) {
      v = ring[slot];
      if (++slot == capacity_) slot = 0;
    }
    out.channels.push_back(std::move(w));
  }
  return out;
}

}  // namespace skyear
