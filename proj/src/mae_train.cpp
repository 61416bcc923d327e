#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "skyear/error.hpp"
#include "skyear/mae.hpp"
#include "skyear/rng.hpp"

namespace skyear {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

void set_zero(MaeParams& p) {
  p.visit([](const std::string&, Eigen::MatrixXd& t) { t.setZero(); });
}

// Flat list of tensor pointers in declaration order, so three parameter sets can be walked in lockstep.
std::vector<Eigen::MatrixXd*> tensors(MaeParams& p) {
  std::vector<Eigen::MatrixXd*> out;
  p.visit([&](const std::string&, Eigen::MatrixXd& t) { out.push_back(&t); });
  return out;
}

}  // namespace

TrainResult pretrain(MaeParams params, const std::vector<PatchGrid>& clips, const TrainHyper& hyper) {
  if (clips.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training clips");
  const MaeConfig& cfg = params.config;
  MaeParams grads = MaeParams::zeros(cfg);
  MaeParams first = MaeParams::zeros(cfg);
  MaeParams second = MaeParams::zeros(cfg);
  const auto p_list = tensors(params), g_list = tensors(grads), m_list = tensors(first), v_list = tensors(second);

  TrainResult result;
  result.optimizer = "adam(beta1=0.9,beta2=0.999,eps=1e-8,cosine)";
  Rng order_rng(derive_seed(hyper.seed, 0x0dde));
  std::vector<std::size_t> order(clips.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  const int batch = std::max(1, hyper.batch);
  const long steps_per_epoch = static_cast<long>((clips.size() + static_cast<std::size_t>(batch) - 1) / static_cast<std::size_t>(batch));
  const long total_steps = steps_per_epoch * std::max(1, hyper.epochs);
  long step = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(order_rng, i)]);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch));
      set_zero(grads);
      for (std::size_t b = start; b < end; ++b) {
        const std::uint64_t mask_seed = derive_seed(hyper.seed, static_cast<std::uint64_t>(epoch) * 1000003ULL + b);
        const MaskPartition mask = sample_mask(cfg.tokens(), cfg.mask_ratio, mask_seed);
        const double loss = loss_and_gradient(params, clips[order[b]], mask, grads, hyper.loss_patches);
        if (!std::isfinite(loss)) {
          throw Error(ErrorCode::DivergedLoss, "non-finite loss at epoch " + std::to_string(epoch));
        }
        epoch_loss += loss;
      }
      ++step;
      const double inv = 1.0 / static_cast<double>(end - start);
      const double progress = static_cast<double>(step) / static_cast<double>(total_steps);
      const double lr = hyper.learning_rate * (0.1 + 0.9 * 0.5 * (1.0 + std::cos(std::numbers::pi * progress)));
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      for (std::size_t t = 0; t < p_list.size(); ++t) {
        auto g = g_list[t]->array() * inv;
        auto& m = *m_list[t];
        auto& v = *v_list[t];
        m.array() = kBeta1 * m.array() + (1.0 - kBeta1) * g;
        v.array() = kBeta2 * v.array() + (1.0 - kBeta2) * g.square();
        p_list[t]->array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kAdamEps);
      }
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(clips.size()));
  }
  result.params = std::move(params);
  return result;
}

std::vector<PatchGrid> prepare_training_set(const std::vector<Waveform>& clips, const MelConfig& mel, int patch) {
  MelSpectrogram front(mel);
  std::vector<PatchGrid> out;
  out.reserve(clips.size());
  for (const Waveform& w : clips) out.push_back(patchify(standardize(front(w.samples)), patch));
  return out;
}

}  // namespace skyear
