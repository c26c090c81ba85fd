#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "coauthornet/matrix.hpp"
#include "coauthornet/random.hpp"

namespace coauthornet {

enum class Activation { kLinear, kSigmoid, kRelu };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view s);

// Stable two-branch logistic function.
double sigmoid(double x);
// log(sigmoid(x)) without overflow.
double log_sigmoid(double x);

double activate(Activation a, double x);
// Derivative expressed through the activation output y = activate(a, x).
double activation_grad_from_output(Activation a, double y);

// activation(W h + b). Throws DimensionError on shape mismatch.
Vector dense_forward(const Matrix& w, std::span<const double> b,
                     std::span<const double> h, Activation activation);

inline constexpr double kBceEpsilon = 1e-12;

// Mean binary cross-entropy with probabilities clamped to [eps, 1 - eps].
double bce_loss(std::span<const double> labels, std::span<const double> probs);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  Vector m;
  Vector v;
  std::int64_t t = 0;

  AdamState() = default;
  AdamState(std::size_t n, AdamConfig cfg) : config(cfg), m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected Adam update in place. Throws DivergenceError naming
// `block` if any gradient entry is non-finite, DimensionError on shape mismatch.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, std::string_view block = "params");

using LossFn = std::function<double(std::span<const double>)>;

// Central-difference gradient check. Returns
// max_i |fd_i - g_i| / max(1, |fd_i|, |g_i|).
double finite_diff_check(const LossFn& loss, std::span<const double> params,
                         std::span<const double> analytic, double h = 1e-5);

// Xavier/Glorot uniform in +-sqrt(6 / (fan_in + fan_out)), fan_in = cols.
void xavier_uniform(Matrix& w, Rng& rng);

}  // namespace coauthornet
