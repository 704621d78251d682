#pragma once

#include "xray/distill/tensor.hpp"

namespace xray {

/// Which head term each alpha weighs. The expanded form pairs alpha1 with the
/// classification KL term and alpha2 with the regression MSE term; the
/// compact form swaps them.
enum class HeadsPairing { Expanded, Compact };

struct DistillationConfig {
  double alpha1 = 2.0;
  double alpha2 = 1.0;
  double lambda1 = 0.7;
  double lambda2 = 0.3;
  double lambda3 = 1.0;
  HeadsPairing pairing = HeadsPairing::Expanded;
};

/// Throws unless every weight is finite and nonnegative.
void validate(const DistillationConfig& cfg);

struct LossComponents {
  double l_heads = 0.0;
  double l_feat = 0.0;
  double l_det = 0.0;
  double l_kd_cls = 0.0;  ///< informational, carried into the breakdown
  double l_kd_reg = 0.0;
};

struct LossBreakdown {
  double l_heads = 0.0;
  double l_kd_cls = 0.0;
  double l_kd_reg = 0.0;
  double l_feat = 0.0;
  double l_det = 0.0;
  double total = 0.0;
};

/// Mean squared error; shapes must match.
double mse(const Tensor& a, const Tensor& b);

/// Clamp applied to teacher probabilities inside the logarithm.
inline constexpr double kKlEpsilon = 1e-12;

/// D_KL(student || teacher) over the last (class) axis, averaged over all
/// other positions. Both tensors must hold probability slices: nonnegative
/// and summing to 1 within 1e-6. Terms with zero student mass contribute 0.
double kl_divergence(const Tensor& student, const Tensor& teacher);

/// d kl_divergence / d student, i.e. (ln(s/t) + 1) / slice_count per entry,
/// with both s and t clamped below at kKlEpsilon.
Tensor kl_divergence_gradient(const Tensor& student, const Tensor& teacher);

double heads_loss(const Tensor& s_cls, const Tensor& t_cls, const Tensor& s_reg, const Tensor& t_reg,
                  const DistillationConfig& cfg);

double feature_loss(const Tensor& t_back, const Tensor& s_back_projected);

/// Fixed 1x1 convolution: out[o,h,w] = sum_c weights[o,c] * features[c,h,w] + bias[o].
Tensor project_channels(const Tensor& features, const Tensor& weights, const Tensor& bias);

/// total = lambda1 * l_heads + lambda2 * l_feat + lambda3 * l_det.
LossBreakdown total_loss(const LossComponents& components, const DistillationConfig& cfg);

/// Evaluates every distillation term from the raw head and feature tensors.
LossBreakdown distillation_losses(const Tensor& s_cls, const Tensor& t_cls, const Tensor& s_reg, const Tensor& t_reg,
                                  const Tensor& t_back, const Tensor& s_back_projected, double l_det,
                                  const DistillationConfig& cfg);

}  // namespace xray
