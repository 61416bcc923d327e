#include "skyear/mae.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "skyear/error.hpp"
#include "skyear/rng.hpp"

namespace skyear {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)

// ---------------------------------------------------------------- layers

struct LnCache {
  MatrixXd xhat;
  VectorXd rstd;
};

MatrixXd ln_forward(const MatrixXd& x, const MatrixXd& gamma, const MatrixXd& beta, LnCache* cache) {
  const VectorXd mean = x.rowwise().mean();
  MatrixXd xc = x.colwise() - mean;
  const VectorXd rstd = ((xc.array().square().rowwise().mean()) + kLnEps).rsqrt();
  xc = xc.array().colwise() * rstd.array();
  MatrixXd y = (xc.array().rowwise() * gamma.row(0).array()).rowwise() + beta.row(0).array();
  if (cache) {
    cache->xhat = std::move(xc);
    cache->rstd = rstd;
  }
  return y;
}

MatrixXd ln_backward(const MatrixXd& dy, const MatrixXd& gamma, const LnCache& c, MatrixXd& dgamma, MatrixXd& dbeta) {
  dgamma += (dy.array() * c.xhat.array()).colwise().sum().matrix();
  dbeta += dy.colwise().sum();
  const MatrixXd dxhat = dy.array().rowwise() * gamma.row(0).array();
  const VectorXd m1 = dxhat.rowwise().mean();
  const VectorXd m2 = (dxhat.array() * c.xhat.array()).rowwise().mean();
  MatrixXd dx = (dxhat.colwise() - m1) - (c.xhat.array().colwise() * m2.array()).matrix();
  return dx.array().colwise() * c.rstd.array();
}

MatrixXd linear(const MatrixXd& x, const MatrixXd& w, const MatrixXd& b) {
  MatrixXd y = x * w;
  y.rowwise() += b.row(0);
  return y;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + 0.044715 * x * x * x))); }

double gelu_grad(double x) {
  const double t = std::tanh(kGeluC * (x + 0.044715 * x * x * x));
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * 0.044715 * x * x);
}

void softmax_rows(MatrixXd& s) {
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double mx = s.row(i).maxCoeff();
    s.row(i) = (s.row(i).array() - mx).exp();
    s.row(i) /= s.row(i).sum();
  }
}

// ---------------------------------------------------------------- blocks

struct BlockCache {
  LnCache ln1, ln2;
  MatrixXd a;       // LN1 output
  MatrixXd qkv;
  std::vector<MatrixXd> probs;
  MatrixXd heads;   // concatenated per-head attention outputs
  MatrixXd b;       // LN2 output
  MatrixXd pre;     // fc1 pre-activation
  MatrixXd act;
};

MatrixXd block_forward(const BlockParams& p, int n_heads, const MatrixXd& x, BlockCache* cache) {
  const Eigen::Index L = x.rows(), D = x.cols(), dh = D / n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  LnCache ln1;
  MatrixXd a = ln_forward(x, p.ln1_gamma, p.ln1_beta, cache ? &ln1 : nullptr);
  MatrixXd qkv = linear(a, p.qkv_w, p.qkv_b);
  MatrixXd heads(L, D);
  std::vector<MatrixXd> probs;
  for (int h = 0; h < n_heads; ++h) {
    const auto q = qkv.middleCols(h * dh, dh);
    const auto k = qkv.middleCols(D + h * dh, dh);
    const auto v = qkv.middleCols(2 * D + h * dh, dh);
    MatrixXd s = (q * k.transpose()) * scale;
    softmax_rows(s);
    heads.middleCols(h * dh, dh) = s * v;
    if (cache) probs.push_back(std::move(s));
  }
  MatrixXd mid = x + linear(heads, p.proj_w, p.proj_b);

  LnCache ln2;
  MatrixXd b = ln_forward(mid, p.ln2_gamma, p.ln2_beta, cache ? &ln2 : nullptr);
  MatrixXd pre = linear(b, p.fc1_w, p.fc1_b);
  MatrixXd act = pre.unaryExpr([](double v) { return gelu(v); });
  MatrixXd out = mid + linear(act, p.fc2_w, p.fc2_b);

  if (cache) {
    cache->ln1 = std::move(ln1);
    cache->ln2 = std::move(ln2);
    cache->a = std::move(a);
    cache->qkv = std::move(qkv);
    cache->probs = std::move(probs);
    cache->heads = std::move(heads);
    cache->b = std::move(b);
    cache->pre = std::move(pre);
    cache->act = std::move(act);
  }
  return out;
}

MatrixXd block_backward(const BlockParams& p, int n_heads, const BlockCache& c, const MatrixXd& dout, BlockParams& g) {
  const Eigen::Index D = dout.cols(), dh = D / n_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  // MLP branch
  g.fc2_w += c.act.transpose() * dout;
  g.fc2_b += dout.colwise().sum();
  MatrixXd dpre = dout * p.fc2_w.transpose();
  dpre.array() *= c.pre.unaryExpr([](double v) { return gelu_grad(v); }).array();
  g.fc1_w += c.b.transpose() * dpre;
  g.fc1_b += dpre.colwise().sum();
  MatrixXd dmid = dout + ln_backward(dpre * p.fc1_w.transpose(), p.ln2_gamma, c.ln2, g.ln2_gamma, g.ln2_beta);

  // attention branch
  g.proj_w += c.heads.transpose() * dmid;
  g.proj_b += dmid.colwise().sum();
  const MatrixXd dheads = dmid * p.proj_w.transpose();
  MatrixXd dqkv(c.qkv.rows(), c.qkv.cols());
  for (int h = 0; h < n_heads; ++h) {
    const auto q = c.qkv.middleCols(h * dh, dh);
    const auto k = c.qkv.middleCols(D + h * dh, dh);
    const auto v = c.qkv.middleCols(2 * D + h * dh, dh);
    const MatrixXd& prob = c.probs[static_cast<std::size_t>(h)];
    const auto dout_h = dheads.middleCols(h * dh, dh);
    const MatrixXd dprob = dout_h * v.transpose();
    dqkv.middleCols(2 * D + h * dh, dh) = prob.transpose() * dout_h;
    const VectorXd dot = (dprob.array() * prob.array()).rowwise().sum();
    MatrixXd ds = prob.array() * (dprob.colwise() - dot).array();
    ds *= scale;
    dqkv.middleCols(h * dh, dh) = ds * k;
    dqkv.middleCols(D + h * dh, dh) = ds.transpose() * q;
  }
  g.qkv_w += c.a.transpose() * dqkv;
  g.qkv_b += dqkv.colwise().sum();
  return dmid + ln_backward(dqkv * p.qkv_w.transpose(), p.ln1_gamma, c.ln1, g.ln1_gamma, g.ln1_beta);
}

// ---------------------------------------------------------------- model

struct ForwardCache {
  MatrixXd visible_patches;
  std::vector<BlockCache> enc_blocks;
  LnCache enc_norm;
  MatrixXd encoded;
  std::vector<BlockCache> dec_blocks;
  LnCache dec_norm;
  MatrixXd dec_out;
};

void check_grid(const PatchGrid& grid, const MaskPartition& mask, const MaeConfig& cfg) {
  if (grid.count() != cfg.tokens() || grid.patches.cols() != cfg.patch_dim() || mask.count() != cfg.tokens()) {
    throw Error(ErrorCode::ShapeMismatch, "grid/mask of " + std::to_string(grid.count()) + " patches vs model of " +
                                              std::to_string(cfg.tokens()));
  }
}

MatrixXd encode_impl(const PatchGrid& grid, const MaskPartition& mask, const MaeParams& p, ForwardCache* cache) {
  const MaeConfig& cfg = p.config;
  check_grid(grid, mask, cfg);
  const auto nv = static_cast<Eigen::Index>(mask.visible.size());
  MatrixXd xv(nv, cfg.patch_dim());
  MatrixXd seq(nv + 1, cfg.embed_dim);
  seq.row(0) = p.cls_token.row(0);
  for (Eigen::Index j = 0; j < nv; ++j) xv.row(j) = grid.patches.row(mask.visible[static_cast<std::size_t>(j)]);
  seq.bottomRows(nv) = xv * p.patch_embed;
  for (Eigen::Index j = 0; j < nv; ++j) seq.row(j + 1) += p.enc_pos.row(mask.visible[static_cast<std::size_t>(j)]);

  if (cache) cache->enc_blocks.resize(p.encoder.size());
  for (std::size_t i = 0; i < p.encoder.size(); ++i) {
    seq = block_forward(p.encoder[i], cfg.enc_heads, seq, cache ? &cache->enc_blocks[i] : nullptr);
  }
  MatrixXd out = ln_forward(seq, p.enc_norm_gamma, p.enc_norm_beta, cache ? &cache->enc_norm : nullptr);
  if (cache) {
    cache->visible_patches = std::move(xv);
    cache->encoded = out;
  }
  return out;
}

MatrixXd decode_impl(const MatrixXd& encoded, const MaskPartition& mask, const MaeParams& p, ForwardCache* cache) {
  const MaeConfig& cfg = p.config;
  const int n = cfg.tokens();
  if (mask.count() != n || encoded.rows() != static_cast<Eigen::Index>(mask.visible.size()) + 1 ||
      encoded.cols() != cfg.embed_dim) {
    throw Error(ErrorCode::ShapeMismatch, "encoded sequence does not match the mask");
  }
  const MatrixXd projected = encoded * p.dec_embed;
  MatrixXd h(n + 1, cfg.dec_dim);
  h.row(0) = projected.row(0);
  for (int i : mask.masked) h.row(i + 1) = p.mask_token.row(0);
  for (std::size_t j = 0; j < mask.visible.size(); ++j) {
    h.row(mask.visible[j] + 1) = projected.row(static_cast<Eigen::Index>(j) + 1);
  }
  h += p.dec_pos;

  if (cache) cache->dec_blocks.resize(p.decoder.size());
  for (std::size_t i = 0; i < p.decoder.size(); ++i) {
    h = block_forward(p.decoder[i], cfg.dec_heads, h, cache ? &cache->dec_blocks[i] : nullptr);
  }
  MatrixXd y = ln_forward(h, p.dec_norm_gamma, p.dec_norm_beta, cache ? &cache->dec_norm : nullptr);
  MatrixXd pred = linear(y.bottomRows(n), p.pred_w, p.pred_b);
  if (cache) cache->dec_out = std::move(y);
  return pred;
}

void backward(const MaeParams& p, const MaskPartition& mask, const ForwardCache& c, const MatrixXd& dpred, MaeParams& g) {
  const MaeConfig& cfg = p.config;
  const int n = cfg.tokens();

  // prediction head and decoder
  g.pred_w += c.dec_out.bottomRows(n).transpose() * dpred;
  g.pred_b += dpred.colwise().sum();
  MatrixXd dy = MatrixXd::Zero(n + 1, cfg.dec_dim);
  dy.bottomRows(n) = dpred * p.pred_w.transpose();
  MatrixXd dh = ln_backward(dy, p.dec_norm_gamma, c.dec_norm, g.dec_norm_gamma, g.dec_norm_beta);
  for (std::size_t i = p.decoder.size(); i-- > 0;) {
    dh = block_backward(p.decoder[i], cfg.dec_heads, c.dec_blocks[i], dh, g.decoder[i]);
  }
  g.dec_pos += dh;
  for (int i : mask.masked) g.mask_token.row(0) += dh.row(i + 1);
  MatrixXd dproj(c.encoded.rows(), cfg.dec_dim);
  dproj.row(0) = dh.row(0);
  for (std::size_t j = 0; j < mask.visible.size(); ++j) {
    dproj.row(static_cast<Eigen::Index>(j) + 1) = dh.row(mask.visible[j] + 1);
  }
  g.dec_embed += c.encoded.transpose() * dproj;

  // encoder
  MatrixXd dseq = ln_backward(dproj * p.dec_embed.transpose(), p.enc_norm_gamma, c.enc_norm, g.enc_norm_gamma,
                              g.enc_norm_beta);
  for (std::size_t i = p.encoder.size(); i-- > 0;) {
    dseq = block_backward(p.encoder[i], cfg.enc_heads, c.enc_blocks[i], dseq, g.encoder[i]);
  }
  g.cls_token.row(0) += dseq.row(0);
  const auto nv = static_cast<Eigen::Index>(mask.visible.size());
  const MatrixXd dtokens = dseq.bottomRows(nv);
  for (Eigen::Index j = 0; j < nv; ++j) g.enc_pos.row(mask.visible[static_cast<std::size_t>(j)]) += dtokens.row(j);
  g.patch_embed += c.visible_patches.transpose() * dtokens;
}

std::vector<int> loss_rows(const MaskPartition& mask, LossPatches which, int n) {
  if (which == LossPatches::Masked && !mask.masked.empty()) return mask.masked;
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  return all;
}

MatrixXd normalized_targets(const PatchGrid& grid) {
  MatrixXd t(grid.patches.rows(), grid.patches.cols());
  for (Eigen::Index i = 0; i < t.rows(); ++i) t.row(i) = normalize_patch_row(grid.patches.row(i));
  return t;
}

// ---------------------------------------------------------------- init

MatrixXd xavier(int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  MatrixXd w(fan_in, fan_out);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = uniform(rng, -limit, limit);
  return w;
}

MatrixXd small_normal(int rows, int cols, Rng& rng) {
  MatrixXd w(rows, cols);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = 0.02 * gaussian(rng);
  return w;
}

// 2D sine-cosine table: half the channels encode the frequency row, half the time column.
MatrixXd sincos_2d(int rows, int cols, int dim) {
  MatrixXd table(rows * cols, dim);
  const int quarter = dim / 4;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int n = r * cols + c;
      for (int k = 0; k < dim; ++k) {
        const int band = k % std::max(quarter, 1);
        const double omega = 1.0 / std::pow(10000.0, static_cast<double>(band) / std::max(quarter, 1));
        const int group = k / std::max(quarter, 1);
        const double pos = group < 2 ? r : c;
        table(n, k) = (group % 2 == 0) ? std::sin(pos * omega) : std::cos(pos * omega);
      }
    }
  }
  return table;
}

BlockParams init_block(int dim, int hidden, Rng& rng) {
  BlockParams b = BlockParams::zeros(dim, hidden);
  b.ln1_gamma.setOnes();
  b.ln2_gamma.setOnes();
  b.qkv_w = xavier(dim, 3 * dim, rng);
  b.proj_w = xavier(dim, dim, rng);
  b.fc1_w = xavier(dim, hidden, rng);
  b.fc2_w = xavier(hidden, dim, rng);
  return b;
}

}  // namespace

void MaeConfig::validate() const {
  const bool ok = patch > 0 && grid_rows > 0 && grid_cols > 0 && embed_dim > 0 && dec_dim > 0 && enc_heads > 0 &&
                  dec_heads > 0 && embed_dim % enc_heads == 0 && dec_dim % dec_heads == 0 && enc_depth >= 0 &&
                  dec_depth >= 0 && mlp_ratio > 0 && top_k > 0.0 && top_k <= 1.0;
  if (!ok) throw Error(ErrorCode::ShapeMismatch, "inconsistent MAE configuration");
  if (!(mask_ratio >= 0.0 && mask_ratio <= 0.95)) {
    throw Error(ErrorCode::RatioOutOfRange, "masking ratio outside [0, 0.95]");
  }
}

BlockParams BlockParams::zeros(int dim, int hidden) {
  BlockParams b;
  b.ln1_gamma = MatrixXd::Zero(1, dim);
  b.ln1_beta = MatrixXd::Zero(1, dim);
  b.qkv_w = MatrixXd::Zero(dim, 3 * dim);
  b.qkv_b = MatrixXd::Zero(1, 3 * dim);
  b.proj_w = MatrixXd::Zero(dim, dim);
  b.proj_b = MatrixXd::Zero(1, dim);
  b.ln2_gamma = MatrixXd::Zero(1, dim);
  b.ln2_beta = MatrixXd::Zero(1, dim);
  b.fc1_w = MatrixXd::Zero(dim, hidden);
  b.fc1_b = MatrixXd::Zero(1, hidden);
  b.fc2_w = MatrixXd::Zero(hidden, dim);
  b.fc2_b = MatrixXd::Zero(1, dim);
  return b;
}

MaeParams MaeParams::zeros(const MaeConfig& cfg) {
  cfg.validate();
  const int P2 = cfg.patch_dim(), D = cfg.embed_dim, Dd = cfg.dec_dim, N = cfg.tokens();
  MaeParams p;
  p.config = cfg;
  p.patch_embed = MatrixXd::Zero(P2, D);
  p.enc_pos = MatrixXd::Zero(N, D);
  p.cls_token = MatrixXd::Zero(1, D);
  for (int i = 0; i < cfg.enc_depth; ++i) p.encoder.push_back(BlockParams::zeros(D, D * cfg.mlp_ratio));
  p.enc_norm_gamma = MatrixXd::Zero(1, D);
  p.enc_norm_beta = MatrixXd::Zero(1, D);
  p.dec_embed = MatrixXd::Zero(D, Dd);
  p.mask_token = MatrixXd::Zero(1, Dd);
  p.dec_pos = MatrixXd::Zero(N + 1, Dd);
  for (int i = 0; i < cfg.dec_depth; ++i) p.decoder.push_back(BlockParams::zeros(Dd, Dd * cfg.mlp_ratio));
  p.dec_norm_gamma = MatrixXd::Zero(1, Dd);
  p.dec_norm_beta = MatrixXd::Zero(1, Dd);
  p.pred_w = MatrixXd::Zero(Dd, P2);
  p.pred_b = MatrixXd::Zero(1, P2);
  return p;
}

std::size_t MaeParams::parameter_count() const {
  std::size_t total = 0;
  visit([&](const std::string&, const MatrixXd& t) { total += static_cast<std::size_t>(t.size()); });
  return total;
}

MaeParams init_params(const MaeConfig& cfg, std::uint64_t seed) {
  MaeParams p = MaeParams::zeros(cfg);
  Rng rng(derive_seed(seed, 0x1a17));
  const int D = cfg.embed_dim, Dd = cfg.dec_dim;
  p.patch_embed = xavier(cfg.patch_dim(), D, rng);
  p.enc_pos = 0.1 * sincos_2d(cfg.grid_rows, cfg.grid_cols, D);
  p.cls_token = small_normal(1, D, rng);
  for (auto& b : p.encoder) b = init_block(D, D * cfg.mlp_ratio, rng);
  p.enc_norm_gamma.setOnes();
  p.dec_embed = xavier(D, Dd, rng);
  p.mask_token = small_normal(1, Dd, rng);
  p.dec_pos.bottomRows(cfg.tokens()) = 0.1 * sincos_2d(cfg.grid_rows, cfg.grid_cols, Dd);
  for (auto& b : p.decoder) b = init_block(Dd, Dd * cfg.mlp_ratio, rng);
  p.dec_norm_gamma.setOnes();
  p.pred_w = xavier(Dd, cfg.patch_dim(), rng);
  return p;
}

MatrixXd encode(const PatchGrid& grid, const MaskPartition& mask, const MaeParams& params) {
  return encode_impl(grid, mask, params, nullptr);
}

PatchGrid decode(const MatrixXd& encoded, const MaskPartition& mask, const MaeParams& params) {
  PatchGrid out;
  out.patch = params.config.patch;
  out.grid_rows = params.config.grid_rows;
  out.grid_cols = params.config.grid_cols;
  out.patches = decode_impl(encoded, mask, params, nullptr);
  return out;
}

PatchGrid reconstruct(const PatchGrid& grid, const MaskPartition& mask, const MaeParams& params) {
  return decode(encode(grid, mask, params), mask, params);
}

double loss_and_gradient(const MaeParams& params, const PatchGrid& grid, const MaskPartition& mask, MaeParams& grads,
                         LossPatches which) {
  ForwardCache cache;
  const MatrixXd encoded = encode_impl(grid, mask, params, &cache);
  const MatrixXd pred = decode_impl(encoded, mask, params, &cache);
  const MatrixXd target = normalized_targets(grid);
  const std::vector<int> rows = loss_rows(mask, which, params.config.tokens());
  const double denom = static_cast<double>(rows.size()) * params.config.patch_dim();
  MatrixXd dpred = MatrixXd::Zero(pred.rows(), pred.cols());
  double loss = 0.0;
  for (int r : rows) {
    const RowVectorXd diff = pred.row(r) - target.row(r);
    loss += diff.squaredNorm();
    dpred.row(r) = (2.0 / denom) * diff;
  }
  backward(params, mask, cache, dpred, grads);
  return loss / denom;
}

double loss_only(const MaeParams& params, const PatchGrid& grid, const MaskPartition& mask, LossPatches which) {
  const MatrixXd pred = decode_impl(encode_impl(grid, mask, params, nullptr), mask, params, nullptr);
  const MatrixXd target = normalized_targets(grid);
  const std::vector<int> rows = loss_rows(mask, which, params.config.tokens());
  double loss = 0.0;
  for (int r : rows) loss += (pred.row(r) - target.row(r)).squaredNorm();
  return loss / (static_cast<double>(rows.size()) * params.config.patch_dim());
}

int top_k_count(int n, double fraction) {
  // The small slack keeps products like 100 * 0.07 from rounding up an extra patch.
  const int k = static_cast<int>(std::ceil(n * fraction - 1e-9));
  return std::clamp(k, 1, n);
}

ScoreResult anomaly_score(const PatchGrid& input, const PatchGrid& reconstruction, double top_k) {
  if (input.patches.rows() != reconstruction.patches.rows() || input.patches.cols() != reconstruction.patches.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "score inputs differ in shape");
  }
  const int n = input.count();
  ScoreResult out;
  out.errors.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const RowVectorXd target = normalize_patch_row(input.patches.row(i));
    out.errors[static_cast<std::size_t>(i)] = (target - reconstruction.patches.row(i)).squaredNorm() / target.size();
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  const int k = top_k_count(n, top_k);
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
    const double ea = out.errors[static_cast<std::size_t>(a)], eb = out.errors[static_cast<std::size_t>(b)];
    return ea != eb ? ea > eb : a < b;
  });
  out.top.assign(order.begin(), order.begin() + k);
  double sum = 0.0;
  for (int i : out.top) sum += out.errors[static_cast<std::size_t>(i)];
  out.score = sum / k;
  return out;
}

AnomalyVerdict make_verdict(double score, double threshold, std::vector<double> errors) {
  AnomalyVerdict v;
  v.score = score;
  v.threshold = threshold;
  v.triggered = score > threshold;
  v.errors = std::move(errors);
  return v;
}

Sentinel::Sentinel(MaeParams params, const MelConfig& mel) : params_(std::move(params)), mel_(mel) {
  const MaeConfig& cfg = params_.config;
  if (mel.mel_bins != cfg.grid_rows * cfg.patch || mel.frames() != cfg.grid_cols * cfg.patch) {
    throw Error(ErrorCode::ShapeMismatch, "Mel front end does not produce the model's patch grid");
  }
}

PatchGrid Sentinel::features(const Waveform& clip) const {
  return patchify(standardize(mel_(clip.samples)), params_.config.patch);
}

AnomalyVerdict Sentinel::detect(const Waveform& clip, double threshold, std::uint64_t seed) const {
  const PatchGrid grid = features(clip);
  const MaskPartition mask = sample_mask(grid.count(), params_.config.mask_ratio, seed);
  ScoreResult s = anomaly_score(grid, reconstruct(grid, mask, params_), params_.config.top_k);
  return make_verdict(s.score, threshold, std::move(s.errors));
}

AnomalyVerdict sentinel_detect(const Waveform& clip, const Sentinel& model, double threshold, std::uint64_t seed) {
  return model.detect(clip, threshold, seed);
}

}  // namespace skyear
