#include "xray/distill/losses.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "xray/core/error.hpp"

namespace xray {

namespace {

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::ostringstream s;
  s << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) s << (i ? "," : "") << shape[i];
  s << ']';
  return s.str();
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    fail(ErrorCode::InvalidArgument,
         std::string(what) + ": shape mismatch " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

void require_component(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    fail(ErrorCode::InvalidArgument, std::string(name) + " must be finite and nonnegative");
  }
}

/// Class count and slice count of a probability tensor; validates every slice.
std::pair<std::size_t, std::size_t> check_simplex(const Tensor& p, const char* who) {
  if (p.rank() == 0) fail(ErrorCode::InvalidArgument, std::string(who) + ": needs a class axis");
  const std::size_t classes = p.shape().back();
  const std::size_t slices = p.size() / classes;
  for (std::size_t s = 0; s < slices; ++s) {
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      const double v = p[s * classes + c];
      if (v < 0.0) fail(ErrorCode::InvalidArgument, std::string(who) + ": negative probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      fail(ErrorCode::InvalidArgument,
           std::string(who) + ": class slice " + std::to_string(s) + " sums to " + std::to_string(sum));
    }
  }
  return {classes, slices};
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  std::size_t n = 1;
  for (auto d : shape_) {
    if (d == 0) fail(ErrorCode::InvalidArgument, "tensor dimensions must be positive");
    n *= d;
  }
  if (n != data_.size()) {
    fail(ErrorCode::InvalidArgument, "tensor of shape " + shape_string(shape_) + " needs " + std::to_string(n) +
                                         " values, got " + std::to_string(data_.size()));
  }
  if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
    fail(ErrorCode::InvalidArgument, "tensor entries must be finite");
  }
}

void validate(const DistillationConfig& cfg) {
  require_component(cfg.alpha1, "alpha1");
  require_component(cfg.alpha2, "alpha2");
  require_component(cfg.lambda1, "lambda1");
  require_component(cfg.lambda2, "lambda2");
  require_component(cfg.lambda3, "lambda3");
}

double mse(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double kl_divergence(const Tensor& student, const Tensor& teacher) {
  require_same_shape(student, teacher, "kl_divergence");
  const auto [classes, slices] = check_simplex(student, "kl_divergence student");
  check_simplex(teacher, "kl_divergence teacher");
  double acc = 0.0;
  for (std::size_t i = 0; i < student.size(); ++i) {
    const double s = student[i];
    if (s == 0.0) continue;
    acc += s * std::log(s / std::max(teacher[i], kKlEpsilon));
  }
  return acc / static_cast<double>(slices);
}

Tensor kl_divergence_gradient(const Tensor& student, const Tensor& teacher) {
  require_same_shape(student, teacher, "kl_divergence_gradient");
  const std::size_t slices = student.size() / student.shape().back();
  std::vector<double> g(student.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double s = std::max(student[i], kKlEpsilon);
    g[i] = (std::log(s / std::max(teacher[i], kKlEpsilon)) + 1.0) / static_cast<double>(slices);
  }
  return {student.shape(), std::move(g)};
}

double heads_loss(const Tensor& s_cls, const Tensor& t_cls, const Tensor& s_reg, const Tensor& t_reg,
                  const DistillationConfig& cfg) {
  validate(cfg);
  const double kl = kl_divergence(s_cls, t_cls);
  const double reg = mse(s_reg, t_reg);
  return cfg.pairing == HeadsPairing::Expanded ? cfg.alpha1 * kl + cfg.alpha2 * reg : cfg.alpha1 * reg + cfg.alpha2 * kl;
}

double feature_loss(const Tensor& t_back, const Tensor& s_back_projected) { return mse(t_back, s_back_projected); }

Tensor project_channels(const Tensor& features, const Tensor& weights, const Tensor& bias) {
  if (features.rank() != 3 || weights.rank() != 2 || bias.rank() != 1) {
    fail(ErrorCode::InvalidArgument, "project_channels expects features CxHxW, weights C'xC, bias C'");
  }
  const std::size_t c_in = features.shape()[0];
  const std::size_t plane = features.shape()[1] * features.shape()[2];
  const std::size_t c_out = weights.shape()[0];
  if (weights.shape()[1] != c_in || bias.shape()[0] != c_out) {
    fail(ErrorCode::InvalidArgument, "project_channels dimension mismatch: features " + shape_string(features.shape()) +
                                         ", weights " + shape_string(weights.shape()) + ", bias " +
                                         shape_string(bias.shape()));
  }
  std::vector<double> out(c_out * plane);
  for (std::size_t o = 0; o < c_out; ++o) {
    for (std::size_t px = 0; px < plane; ++px) {
      double acc = bias[o];
      for (std::size_t c = 0; c < c_in; ++c) acc += weights[o * c_in + c] * features[c * plane + px];
      out[o * plane + px] = acc;
    }
  }
  return {{c_out, features.shape()[1], features.shape()[2]}, std::move(out)};
}

LossBreakdown total_loss(const LossComponents& c, const DistillationConfig& cfg) {
  validate(cfg);
  require_component(c.l_heads, "l_heads");
  require_component(c.l_feat, "l_feat");
  require_component(c.l_det, "l_det");
  require_component(c.l_kd_cls, "l_kd_cls");
  require_component(c.l_kd_reg, "l_kd_reg");
  LossBreakdown b;
  b.l_heads = c.l_heads;
  b.l_kd_cls = c.l_kd_cls;
  b.l_kd_reg = c.l_kd_reg;
  b.l_feat = c.l_feat;
  b.l_det = c.l_det;
  b.total = cfg.lambda1 * c.l_heads + cfg.lambda2 * c.l_feat + cfg.lambda3 * c.l_det;
  return b;
}

LossBreakdown distillation_losses(const Tensor& s_cls, const Tensor& t_cls, const Tensor& s_reg, const Tensor& t_reg,
                                  const Tensor& t_back, const Tensor& s_back_projected, double l_det,
                                  const DistillationConfig& cfg) {
  LossComponents c;
  c.l_kd_cls = kl_divergence(s_cls, t_cls);
  c.l_kd_reg = mse(s_reg, t_reg);
  c.l_heads = heads_loss(s_cls, t_cls, s_reg, t_reg, cfg);
  c.l_feat = feature_loss(t_back, s_back_projected);
  c.l_det = l_det;
  return total_loss(c, cfg);
}

}  // namespace xray
