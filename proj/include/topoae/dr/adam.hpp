#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace topoae {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam moments for one parameter block.
template <class M>
struct AdamSlot {
  M m;
  M v;
};

/// Adam with bias correction. One instance drives any number of parameter
/// blocks sharing the step counter; call begin_step() once per iteration.
class Adam {
 public:
  explicit Adam(const AdamConfig& cfg = {}) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }
  long step_count() const { return t_; }

  void begin_step() {
    ++t_;
    c1_ = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    c2_ = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  }

  template <class M>
  void update(M& param, const M& grad, AdamSlot<M>& s) const {
    if (s.m.size() != param.size()) {
      s.m = M::Zero(param.rows(), param.cols());
      s.v = M::Zero(param.rows(), param.cols());
    }
    s.m = cfg_.beta1 * s.m + (1.0 - cfg_.beta1) * grad;
    s.v = cfg_.beta2 * s.v + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
    const double a = cfg_.lr / c1_;
    const double sc = 1.0 / std::sqrt(c2_);
    param.array() -= a * s.m.array() / ((s.v.array().sqrt() * sc) + cfg_.eps);
  }

 private:
  AdamConfig cfg_;
  long t_ = 0;
  double c1_ = 1.0, c2_ = 1.0;
};

}  // namespace topoae
