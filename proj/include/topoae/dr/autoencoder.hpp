#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "topoae/core/errors.hpp"
#include "topoae/core/point_cloud.hpp"
#include "topoae/dr/adam.hpp"
#include "topoae/losses/losses.hpp"

namespace topoae {

struct AutoencoderConfig {
  std::vector<int> hidden{128, 32};  // encoder; the decoder mirrors it
  int latent = 2;
  bool batch_norm = true;
  std::uint64_t seed = 0;
};

/// Affine layer, optionally followed by batch normalization and a rectifier.
struct Layer {
  Matrix w;      // in x out
  Matrix b;      // 1 x out
  bool norm = false;
  bool relu = false;
  Matrix gamma;  // 1 x out, batch-norm scale
  Matrix beta;   // 1 x out, batch-norm shift
  Matrix mean;   // stored statistics used in inference
  Matrix var;
  double bn_eps = 1e-5;

  int in() const { return static_cast<int>(w.rows()); }
  int out() const { return static_cast<int>(w.cols()); }
};

struct LayerGrad {
  Matrix w, b, gamma, beta;
};

struct LayerCache {
  Matrix input;
  Matrix xhat;     // normalized pre-activation
  Matrix inv_std;  // 1 x out
  Matrix y;        // value fed to the rectifier
  Matrix mean, var;
};

/// Fully connected autoencoder X -> Z -> X~. Hidden layers use batch
/// normalization (full-batch statistics while training) and rectifiers; the
/// latent and output layers are affine.
class Autoencoder {
 public:
  Autoencoder() = default;

  Autoencoder(int input_dim, const AutoencoderConfig& cfg) : cfg_(cfg), input_dim_(input_dim) {
    if (input_dim < 1) throw ValidationError("autoencoder: input dimension must be positive");
    if (cfg.latent < 1) throw ValidationError("autoencoder: latent dimension must be positive");
    for (int h : cfg.hidden)
      if (h < 1) throw ValidationError("autoencoder: layer sizes must be positive");
    std::mt19937_64 rng(cfg.seed);
    int prev = input_dim;
    for (int h : cfg.hidden) {
      encoder_.push_back(make_layer(prev, h, cfg.batch_norm, true, rng));
      prev = h;
    }
    encoder_.push_back(make_layer(prev, cfg.latent, false, false, rng));
    prev = cfg.latent;
    for (auto it = cfg.hidden.rbegin(); it != cfg.hidden.rend(); ++it) {
      decoder_.push_back(make_layer(prev, *it, cfg.batch_norm, true, rng));
      prev = *it;
    }
    decoder_.push_back(make_layer(prev, input_dim, false, false, rng));
    shift_ = Matrix::Zero(1, input_dim);
    scale_ = Matrix::Ones(1, input_dim);
  }

  const AutoencoderConfig& config() const { return cfg_; }
  int input_dim() const { return input_dim_; }
  int latent_dim() const { return cfg_.latent; }
  std::vector<Layer>& encoder() { return encoder_; }
  std::vector<Layer>& decoder() { return decoder_; }
  const std::vector<Layer>& encoder() const { return encoder_; }
  const std::vector<Layer>& decoder() const { return decoder_; }

  /// Per-coordinate input standardization applied by encode().
  const Matrix& input_shift() const { return shift_; }
  const Matrix& input_scale() const { return scale_; }
  void set_standardization(Matrix shift, Matrix scale) {
    shift_ = std::move(shift);
    scale_ = std::move(scale);
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto* net : {&encoder_, &decoder_})
      for (const auto& l : *net) n += l.w.size() + l.b.size() + l.gamma.size() + l.beta.size();
    return n;
  }

  /// Inference pass with the stored batch-norm statistics.
  Matrix encode(const Matrix& x) const {
    if (x.cols() != input_dim_) throw ValidationError("encode: input dimension does not match the model");
    Matrix a = standardize(x);
    for (const auto& l : encoder_) a = apply(l, a, nullptr);
    return a;
  }

  PointCloud encode(const PointCloud& x) const { return to_cloud(encode(to_matrix(x))); }

  Matrix decode(const Matrix& z) const {
    Matrix a = z;
    for (const auto& l : decoder_) a = apply(l, a, nullptr);
    return a;
  }

  Matrix standardize(const Matrix& x) const {
    return ((x.rowwise() - shift_.row(0)).array().rowwise() / scale_.row(0).array()).matrix();
  }

  /// Training pass over a standardized batch. Batch-norm layers normalize
  /// with the batch statistics and, with store_stats, keep them for inference.
  void forward(const Matrix& x, Matrix& z, Matrix& xt, bool store_stats = false) {
    enc_cache_.resize(encoder_.size());
    dec_cache_.resize(decoder_.size());
    Matrix a = x;
    for (std::size_t i = 0; i < encoder_.size(); ++i) a = run(encoder_[i], a, enc_cache_[i], store_stats);
    z = a;
    for (std::size_t i = 0; i < decoder_.size(); ++i) a = run(decoder_[i], a, dec_cache_[i], store_stats);
    xt = a;
  }

  /// Backward pass after forward(). d_xt is dL/dX~, d_z an extra dL/dZ added
  /// at the latent layer (the topological term).
  void backward(const Matrix& d_xt, const Matrix& d_z, std::vector<LayerGrad>& enc_grad,
                std::vector<LayerGrad>& dec_grad) const {
    dec_grad.resize(decoder_.size());
    enc_grad.resize(encoder_.size());
    Matrix g = d_xt;
    for (std::size_t i = decoder_.size(); i-- > 0;) g = back(decoder_[i], dec_cache_[i], g, dec_grad[i]);
    g += d_z;
    for (std::size_t i = encoder_.size(); i-- > 0;) g = back(encoder_[i], enc_cache_[i], g, enc_grad[i]);
  }

 private:
  static Layer make_layer(int in, int out, bool norm, bool relu, std::mt19937_64& rng) {
    Layer l;
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    l.w.resize(in, out);
    for (Eigen::Index i = 0; i < l.w.size(); ++i) l.w.data()[i] = u(rng);
    l.b = Matrix::Zero(1, out);
    l.norm = norm;
    l.relu = relu;
    if (norm) {
      l.gamma = Matrix::Ones(1, out);
      l.beta = Matrix::Zero(1, out);
      l.mean = Matrix::Zero(1, out);
      l.var = Matrix::Ones(1, out);
    }
    return l;
  }

  // Same arithmetic in training and inference so that encode() of the
  // training batch reproduces the training embedding bit for bit.
  static Matrix run(Layer& l, const Matrix& a, LayerCache& cache, bool store_stats) {
    Matrix out = apply(l, a, &cache);
    if (store_stats && l.norm) {
      l.mean = cache.mean;
      l.var = cache.var;
    }
    return out;
  }

  static Matrix apply(const Layer& l, const Matrix& a, LayerCache* cache) {
    Matrix pre = a * l.w;
    pre.rowwise() += l.b.row(0);
    Matrix y;
    if (l.norm) {
      Matrix mean, var;
      if (cache) {
        const double n = static_cast<double>(pre.rows());
        mean = pre.colwise().sum() / n;
        var = (pre.rowwise() - mean.row(0)).array().square().colwise().sum().matrix() / n;
      } else {
        mean = l.mean;
        var = l.var;
      }
      const Matrix inv_std = (var.array() + l.bn_eps).rsqrt().matrix();
      Matrix xhat = ((pre.rowwise() - mean.row(0)).array().rowwise() * inv_std.row(0).array()).matrix();
      y = (xhat.array().rowwise() * l.gamma.row(0).array()).matrix();
      y.rowwise() += l.beta.row(0);
      if (cache) {
        cache->xhat = std::move(xhat);
        cache->inv_std = inv_std;
        cache->mean = mean;
        cache->var = var;
      }
    } else {
      y = std::move(pre);
    }
    if (cache) {
      cache->input = a;
      cache->y = y;
    }
    if (l.relu) return y.cwiseMax(0.0);
    return y;
  }

  static Matrix back(const Layer& l, const LayerCache& c, const Matrix& d_out, LayerGrad& g) {
    Matrix dy = d_out;
    if (l.relu) dy = (c.y.array() > 0.0).select(d_out, 0.0);
    Matrix dpre;
    if (l.norm) {
      const double n = static_cast<double>(dy.rows());
      g.gamma = (dy.array() * c.xhat.array()).colwise().sum().matrix();
      g.beta = dy.colwise().sum();
      const Matrix dxhat = (dy.array().rowwise() * l.gamma.row(0).array()).matrix();
      const Matrix s1 = dxhat.colwise().sum();
      const Matrix s2 = (dxhat.array() * c.xhat.array()).colwise().sum().matrix();
      Matrix t = n * dxhat;
      t.rowwise() -= s1.row(0);
      t -= (c.xhat.array().rowwise() * s2.row(0).array()).matrix();
      dpre = ((t.array().rowwise() * c.inv_std.row(0).array()) / n).matrix();
    } else {
      dpre = std::move(dy);
    }
    g.w = c.input.transpose() * dpre;
    g.b = dpre.colwise().sum();
    return dpre * l.w.transpose();
  }

  AutoencoderConfig cfg_;
  int input_dim_ = 0;
  std::vector<Layer> encoder_, decoder_;
  Matrix shift_, scale_;
  std::vector<LayerCache> enc_cache_, dec_cache_;
};

}  // namespace topoae
