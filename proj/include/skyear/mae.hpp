#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "skyear/features.hpp"

namespace skyear {

struct MaeConfig {
  int patch = 8;
  int grid_rows = 8;   // F / P
  int grid_cols = 16;  // T / P
  int embed_dim = 64;
  int enc_depth = 2;
  int enc_heads = 4;
  int dec_dim = 32;
  int dec_depth = 1;
  int dec_heads = 2;
  int mlp_ratio = 4;
  double mask_ratio = 0.10;
  double top_k = 0.10;  // fraction of patches in the Top-K score

  int tokens() const { return grid_rows * grid_cols; }
  int patch_dim() const { return patch * patch; }
  // Throws ShapeMismatch on an inconsistent configuration.
  void validate() const;
};

// Pre-norm transformer block: x += MHSA(LN(x)); x += MLP(LN(x)).
struct BlockParams {
  Eigen::MatrixXd ln1_gamma, ln1_beta;
  Eigen::MatrixXd qkv_w, qkv_b;
  Eigen::MatrixXd proj_w, proj_b;
  Eigen::MatrixXd ln2_gamma, ln2_beta;
  Eigen::MatrixXd fc1_w, fc1_b;
  Eigen::MatrixXd fc2_w, fc2_b;

  static BlockParams zeros(int dim, int hidden);

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + "ln1_gamma", self.ln1_gamma);
    f(prefix + "ln1_beta", self.ln1_beta);
    f(prefix + "qkv_w", self.qkv_w);
    f(prefix + "qkv_b", self.qkv_b);
    f(prefix + "proj_w", self.proj_w);
    f(prefix + "proj_b", self.proj_b);
    f(prefix + "ln2_gamma", self.ln2_gamma);
    f(prefix + "ln2_beta", self.ln2_beta);
    f(prefix + "fc1_w", self.fc1_w);
    f(prefix + "fc1_b", self.fc1_b);
    f(prefix + "fc2_w", self.fc2_w);
    f(prefix + "fc2_b", self.fc2_b);
  }
};

// Every learnable tensor, stored as row-vector-convention matrices (tokens are rows).
struct MaeParams {
  MaeConfig config;
  Eigen::MatrixXd patch_embed;  // E, P^2 x D
  Eigen::MatrixXd enc_pos;      // N x D
  Eigen::MatrixXd cls_token;    // 1 x D
  std::vector<BlockParams> encoder;
  Eigen::MatrixXd enc_norm_gamma, enc_norm_beta;
  Eigen::MatrixXd dec_embed;    // W_dec, D x D_dec
  Eigen::MatrixXd mask_token;   // 1 x D_dec
  Eigen::MatrixXd dec_pos;      // (N + 1) x D_dec
  std::vector<BlockParams> decoder;
  Eigen::MatrixXd dec_norm_gamma, dec_norm_beta;
  Eigen::MatrixXd pred_w;       // D_dec x P^2
  Eigen::MatrixXd pred_b;       // 1 x P^2

  static MaeParams zeros(const MaeConfig& cfg);

  // Visits (name, tensor) in declaration order; this order is the checkpoint order.
  template <class F>
  void visit(F&& f) { visit_impl(*this, f); }
  template <class F>
  void visit(F&& f) const { visit_impl(*this, f); }

  std::size_t parameter_count() const;

 private:
  template <class Self, class F>
  static void visit_impl(Self& self, F& f) {
    f(std::string("patch_embed"), self.patch_embed);
    f(std::string("enc_pos"), self.enc_pos);
    f(std::string("cls_token"), self.cls_token);
    for (std::size_t i = 0; i < self.encoder.size(); ++i) {
      BlockParams::visit(self.encoder[i], "encoder." + std::to_string(i) + ".", f);
    }
    f(std::string("enc_norm_gamma"), self.enc_norm_gamma);
    f(std::string("enc_norm_beta"), self.enc_norm_beta);
    f(std::string("dec_embed"), self.dec_embed);
    f(std::string("mask_token"), self.mask_token);
    f(std::string("dec_pos"), self.dec_pos);
    for (std::size_t i = 0; i < self.decoder.size(); ++i) {
      BlockParams::visit(self.decoder[i], "decoder." + std::to_string(i) + ".", f);
    }
    f(std::string("dec_norm_gamma"), self.dec_norm_gamma);
    f(std::string("dec_norm_beta"), self.dec_norm_beta);
    f(std::string("pred_w"), self.pred_w);
    f(std::string("pred_b"), self.pred_b);
  }
};

MaeParams init_params(const MaeConfig& cfg, std::uint64_t seed);

// Encoder output: row 0 is the class token, row j + 1 belongs to mask.visible[j].
Eigen::MatrixXd encode(const PatchGrid& grid, const MaskPartition& mask, const MaeParams& params);

// Decoder output: all N reconstructed patches, same layout as the input grid.
PatchGrid decode(const Eigen::MatrixXd& encoded, const MaskPartition& mask, const MaeParams& params);

PatchGrid reconstruct(const PatchGrid& grid, const MaskPartition& mask, const MaeParams& params);

enum class LossPatches { Masked, All };

// Mean squared error between the reconstruction and the per-patch normalized
// input, over masked patches (or all patches when none are masked or when
// `which` is All). Gradients are accumulated into `grads`, which must have
// the shapes of `params`.
double loss_and_gradient(const MaeParams& params, const PatchGrid& grid, const MaskPartition& mask,
                         MaeParams& grads, LossPatches which = LossPatches::Masked);
double loss_only(const MaeParams& params, const PatchGrid& grid, const MaskPartition& mask,
                 LossPatches which = LossPatches::Masked);

struct ScoreResult {
  double score = 0.0;
  std::vector<double> errors;  // per patch, mean over P^2 cells
  std::vector<int> top;        // indices of the Top-K set
};

int top_k_count(int n, double fraction);

// Top-K reconstruction score between normalized input patches and raw decoder output.
ScoreResult anomaly_score(const PatchGrid& input, const PatchGrid& reconstruction, double top_k);

struct AnomalyVerdict {
  double score = 0.0;
  double threshold = 0.0;
  bool triggered = false;
  std::vector<double> errors;
};

AnomalyVerdict make_verdict(double score, double threshold, std::vector<double> errors = {});

// Trained model bundled with the front end it was trained on.
class Sentinel {
 public:
  Sentinel(MaeParams params, const MelConfig& mel);

  const MaeParams& params() const { return params_; }
  const MelConfig& mel_config() const { return mel_.config(); }

  // Mel -> standardize -> patchify -> mask(seed) -> encode -> decode -> Top-K score.
  AnomalyVerdict detect(const Waveform& clip, double threshold, std::uint64_t seed) const;
  PatchGrid features(const Waveform& clip) const;

 private:
  MaeParams params_;
  MelSpectrogram mel_;
};

AnomalyVerdict sentinel_detect(const Waveform& clip, const Sentinel& model, double threshold, std::uint64_t seed);

struct TrainHyper {
  double learning_rate = 1e-3;
  int epochs = 30;
  int batch = 8;
  std::uint64_t seed = 1;
  LossPatches loss_patches = LossPatches::All;
};

struct TrainResult {
  MaeParams params;
  std::vector<double> epoch_loss;  // mean training loss per epoch
  std::string optimizer;
};

// Adam on the reconstruction loss (patch set chosen by hyper.loss_patches); single-threaded
// and deterministic per seed.
TrainResult pretrain(MaeParams params, const std::vector<PatchGrid>& clips, const TrainHyper& hyper);

// Features for a batch of noise clips, ready for pretrain().
std::vector<PatchGrid> prepare_training_set(const std::vector<Waveform>& clips, const MelConfig& mel, int patch);

struct Checkpoint {
  MaeParams params;
  MelConfig mel;
  double threshold = 0.0;  // calibrated D_th stored with the model
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace skyear
