#include "coauthornet/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coauthornet/errors.hpp"

namespace coauthornet {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kLinear: return "linear";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kRelu: return "relu";
  }
  return "unknown";
}

Activation parse_activation(std::string_view s) {
  if (s == "linear") return Activation::kLinear;
  if (s == "sigmoid") return Activation::kSigmoid;
  if (s == "relu") return Activation::kRelu;
  throw ConfigError("unknown activation '" + std::string(s) + "'");
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double activate(Activation a, double x) {
  switch (a) {
    case Activation::kLinear: return x;
    case Activation::kSigmoid: return sigmoid(x);
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
  }
  return x;
}

double activation_grad_from_output(Activation a, double y) {
  switch (a) {
    case Activation::kLinear: return 1.0;
    case Activation::kSigmoid: return y * (1.0 - y);
    case Activation::kRelu: return y > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

Vector dense_forward(const Matrix& w, std::span<const double> b,
                     std::span<const double> h, Activation activation) {
  if (w.cols() != h.size() || w.rows() != b.size()) {
    throw DimensionError("dense layer " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()) + " cannot map input of size " +
                         std::to_string(h.size()) + " with bias of size " +
                         std::to_string(b.size()));
  }
  Vector out(w.rows());
  matvec(w, h, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = activate(activation, out[i] + b[i]);
  return out;
}

double bce_loss(std::span<const double> labels, std::span<const double> probs) {
  if (labels.size() != probs.size() || labels.empty()) {
    throw DimensionError("bce_loss needs equal non-empty inputs (got " +
                         std::to_string(labels.size()) + " labels, " +
                         std::to_string(probs.size()) + " probabilities)");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(probs[i], kBceEpsilon, 1.0 - kBceEpsilon);
    total += labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  return -total / static_cast<double>(labels.size());
}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, std::string_view block) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw DimensionError("adam_step shape mismatch in block " + std::string(block));
  }
  for (double g : grads) {
    if (!std::isfinite(g)) {
      throw DivergenceError("non-finite gradient in parameter block " + std::string(block));
    }
  }
  const auto& c = state.config;
  ++state.t;
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * grads[i];
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / correction1;
    const double v_hat = state.v[i] / correction2;
    params[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

double finite_diff_check(const LossFn& loss, std::span<const double> params,
                         std::span<const double> analytic, double h) {
  if (params.size() != analytic.size()) {
    throw DimensionError("finite_diff_check: gradient size mismatch");
  }
  Vector theta(params.begin(), params.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + h;
    const double up = loss(theta);
    theta[i] = saved - h;
    const double down = loss(theta);
    theta[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    const double scale = std::max({1.0, std::abs(fd), std::abs(analytic[i])});
    worst = std::max(worst, std::abs(fd - analytic[i]) / scale);
  }
  return worst;
}

void xavier_uniform(Matrix& w, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (double& v : w.values()) v = rng.uniform(-limit, limit);
}

}  // namespace coauthornet
