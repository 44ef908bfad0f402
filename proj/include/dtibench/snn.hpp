// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtibench/error.hpp"
#include "dtibench/metrics.hpp"
#include "dtibench/rng.hpp"

namespace dtibench {

enum class LossKind { Bce, Focal };

std::string_view to_string(LossKind kind) noexcept;
LossKind parse_loss_kind(std::string_view text);

/// Architecture types 1-4 are a single hidden layer of width 32, 64, 128, 256.
std::size_t hidden_width(int architecture);

struct SNNParams {
  std::size_t hidden = 32;
  int architecture = 1;
  LossKind loss = LossKind::Bce;
  std::size_t epochs = 10;
  double batch_fraction = 1.0 / 16.0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double rescale_weight = 1.0;  // w_k, applied to every sample
  double focal_gamma = 2.0;
  double focal_alpha = 0.25;  // negative disables class weighting
  std::uint64_t seed = 0;
};

void validate(const SNNParams& params);

/// max(1, round(n * fraction)).
std::size_t batch_size(std::size_t n, double fraction);

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct SNNModel {
  Mat<Scalar> w1;  // 2d x n
  Vec<Scalar> b1;  // n
  Vec<Scalar> w2;  // n
  Scalar b2 = 0;

  Eigen::Index input_width() const noexcept { return w1.rows(); }
  Eigen::Index hidden() const noexcept { return w1.cols(); }
  std::size_t parameter_count() const noexcept {
    return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + 1);
  }
  static SNNModel zeros(Eigen::Index input, Eigen::Index hidden) {
    return {Mat<Scalar>::Zero(input, hidden), Vec<Scalar>::Zero(hidden), Vec<Scalar>::Zero(hidden), Scalar(0)};
  }
};

inline std::size_t parameter_count(std::size_t input, std::size_t hidden) noexcept {
  return input * hidden + 2 * hidden + 1;
}

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every layer.
template <typename Scalar>
SNNModel<Scalar> init_model(Eigen::Index input, Eigen::Index hidden, Rng& rng) {
  auto m = SNNModel<Scalar>::zeros(input, hidden);
  const double a1 = 1.0 / std::sqrt(static_cast<double>(input));
  const double a2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (Eigen::Index j = 0; j < hidden; ++j)
    for (Eigen::Index i = 0; i < input; ++i) m.w1(i, j) = Scalar(uniform_real(rng, -a1, a1));
  for (Eigen::Index j = 0; j < hidden; ++j) m.b1(j) = Scalar(uniform_real(rng, -a1, a1));
  for (Eigen::Index j = 0; j < hidden; ++j) m.w2(j) = Scalar(uniform_real(rng, -a2, a2));
  m.b2 = Scalar(uniform_real(rng, -a2, a2));
  return m;
}

template <typename Scalar>
void check_input(const SNNModel<Scalar>& model, Eigen::Index cols) {
  if (cols != model.input_width())
    throw Error(ErrorKind::Shape, "snn: input has " + std::to_string(cols) + " columns, model expects " +
                                      std::to_string(model.input_width()));
}

template <typename Scalar, typename Derived>
Vec<Scalar> forward_logits(const SNNModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  check_input(model, x.cols());
  const Mat<Scalar> a = ((x * model.w1).rowwise() + model.b1.transpose()).cwiseMax(Scalar(0));
  return (a * model.w2).array() + model.b2;
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  using std::exp;
  return z >= 0 ? Scalar(1) / (Scalar(1) + exp(-z)) : exp(z) / (Scalar(1) + exp(z));
}

/// Probabilities h = sigma(ReLU(X W1 + b1) W2 + b2), one per row of X.
template <typename Scalar, typename Derived>
Vec<Scalar> forward(const SNNModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  return forward_logits(model, x).unaryExpr([](Scalar z) { return sigmoid(z); });
}

/// log(1 + e^x) without overflow.
template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  return x > 0 ? x + log1p(exp(-x)) : log1p(exp(x));
}

template <typename Scalar>
struct LossValue {
  Scalar loss = 0;
  Vec<Scalar> grad;  // d loss / d logit
};

namespace detail {

template <typename Scalar>
void check_loss_inputs(Eigen::Index n, Eigen::Index labels, Eigen::Index weights) {
  if (n == 0) throw Error(ErrorKind::Shape, "loss: empty batch");
  if (labels != n) throw Error(ErrorKind::Shape, "loss: label count differs from logit count");
  if (weights != n) throw Error(ErrorKind::Shape, "loss: weight count differs from logit count");
}

}  // namespace detail

/// Mean of w_k * (max(z,0) - z y + log(1 + e^-|z|)).
template <typename Scalar>
LossValue<Scalar> bce_loss(const Vec<Scalar>& logits, const Vec<Scalar>& labels, const Vec<Scalar>& weights) {
  using std::abs;
  using std::exp;
  using std::log1p;
  detail::check_loss_inputs<Scalar>(logits.size(), labels.size(), weights.size());
  const auto n = logits.size();
  LossValue<Scalar> out{Scalar(0), Vec<Scalar>(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar z = logits(k), y = labels(k);
    out.loss += weights(k) * (std::max(z, Scalar(0)) - z * y + log1p(exp(-abs(z))));
    out.grad(k) = weights(k) * (sigmoid(z) - y) / Scalar(n);
  }
  out.loss /= Scalar(n);
  return out;
}

template <typename Scalar>
LossValue<Scalar> bce_loss(const Vec<Scalar>& logits, const Vec<Scalar>& labels) {
  return bce_loss<Scalar>(logits, labels, Vec<Scalar>::Ones(logits.size()));
}

/// Mean of -w_k a_t (1 - p_t)^gamma log p_t, with a_t = alpha for positives
/// and 1 - alpha for negatives; alpha < 0 sets a_t = 1.
template <typename Scalar>
LossValue<Scalar> focal_loss(const Vec<Scalar>& logits, const Vec<Scalar>& labels, const Vec<Scalar>& weights,
                             Scalar gamma = Scalar(2), Scalar alpha = Scalar(0.25)) {
  using std::pow;
  detail::check_loss_inputs<Scalar>(logits.size(), labels.size(), weights.size());
  const auto n = logits.size();
  LossValue<Scalar> out{Scalar(0), Vec<Scalar>(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const bool pos = labels(k) > Scalar(0.5);
    // s is the logit of the true class: p_t = sigma(s), -log p_t = softplus(-s)
    const Scalar sign = pos ? Scalar(1) : Scalar(-1);
    const Scalar s = sign * logits(k);
    const Scalar a = alpha < 0 ? Scalar(1) : (pos ? alpha : Scalar(1) - alpha);
    const Scalar miss = sigmoid(-s);  // 1 - p_t
    const Scalar mod = gamma == Scalar(0) ? Scalar(1) : pow(miss, gamma);
    const Scalar nll = softplus(-s);
    out.loss += weights(k) * a * mod * nll;
    const Scalar ds = -a * mod * (gamma * sigmoid(s) * nll + miss);
    out.grad(k) = weights(k) * sign * ds / Scalar(n);
  }
  out.loss /= Scalar(n);
  return out;
}

template <typename Scalar>
LossValue<Scalar> focal_loss(const Vec<Scalar>& logits, const Vec<Scalar>& labels, Scalar gamma = Scalar(2),
                             Scalar alpha = Scalar(0.25)) {
  return focal_loss<Scalar>(logits, labels, Vec<Scalar>::Ones(logits.size()), gamma, alpha);
}

template <typename Scalar>
LossValue<Scalar> evaluate_loss(const Vec<Scalar>& logits, const Vec<Scalar>& labels, const SNNParams& params) {
  const Vec<Scalar> w = Vec<Scalar>::Constant(logits.size(), Scalar(params.rescale_weight));
  if (params.loss == LossKind::Focal)
    return focal_loss<Scalar>(logits, labels, w, Scalar(params.focal_gamma), Scalar(params.focal_alpha));
  return bce_loss<Scalar>(logits, labels, w);
}

/// Loss over (X, y) and its gradient with respect to every parameter.
template <typename Scalar, typename Derived>
Scalar loss_and_gradient(const SNNModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                         const Vec<Scalar>& labels, const SNNParams& params, SNNModel<Scalar>& grad) {
  check_input(model, x.cols());
  const Mat<Scalar> pre = (x * model.w1).rowwise() + model.b1.transpose();
  const Mat<Scalar> act = pre.cwiseMax(Scalar(0));
  const Vec<Scalar> logits = (act * model.w2).array() + model.b2;
  const auto lv = evaluate_loss<Scalar>(logits, labels, params);
  grad.w2 = act.transpose() * lv.grad;
  grad.b2 = lv.grad.sum();
  const Mat<Scalar> dpre =
      (lv.grad * model.w2.transpose()).cwiseProduct(pre.unaryExpr([](Scalar v) { return v > 0 ? Scalar(1) : Scalar(0); }));
  grad.w1 = x.transpose() * dpre;
  grad.b1 = dpre.colwise().sum().transpose();
  return lv.loss;
}

struct TraceRow {
  std::size_t epoch = 0;
  double mean_loss = 0;
  double val_auroc = std::nan("");
};

template <typename Scalar>
struct TrainResult {
  SNNModel<Scalar> model;
  std::vector<TraceRow> trace;
};

namespace detail {

template <typename Scalar>
struct AdamState {
  SNNModel<Scalar> m, v;
  std::size_t step = 0;
};

template <typename Derived>
void adam_update(Eigen::MatrixBase<Derived>& param, Eigen::MatrixBase<Derived>& m, Eigen::MatrixBase<Derived>& v,
                 const Eigen::MatrixBase<Derived>& g, double lr_t, const SNNParams& p) {
  using S = typename Derived::Scalar;
  m = S(p.beta1) * m + S(1 - p.beta1) * g;
  v = S(p.beta2) * v + S(1 - p.beta2) * g.cwiseProduct(g);
  param.array() -= S(lr_t) * m.array() / (v.array().sqrt() + S(p.epsilon));
}

template <typename Scalar>
void adam_update_scalar(Scalar& param, Scalar& m, Scalar& v, Scalar g, double lr_t, const SNNParams& p) {
  using std::sqrt;
  m = Scalar(p.beta1) * m + Scalar(1 - p.beta1) * g;
  v = Scalar(p.beta2) * v + Scalar(1 - p.beta2) * g * g;
  param -= Scalar(lr_t) * m / (sqrt(v) + Scalar(p.epsilon));
}

template <typename Scalar>
void adam_step(SNNModel<Scalar>& model, const SNNModel<Scalar>& g, AdamState<Scalar>& st, const SNNParams& p) {
  ++st.step;
  const double t = static_cast<double>(st.step);
  const double lr_t = p.learning_rate * std::sqrt(1 - std::pow(p.beta2, t)) / (1 - std::pow(p.beta1, t));
  adam_update(model.w1, st.m.w1, st.v.w1, g.w1, lr_t, p);
  adam_update(model.b1, st.m.b1, st.v.b1, g.b1, lr_t, p);
  adam_update(model.w2, st.m.w2, st.v.w2, g.w2, lr_t, p);
  adam_update_scalar(model.b2, st.m.b2, st.v.b2, g.b2, lr_t, p);
}

}  // namespace detail

/// Mini-batch Adam from a seeded initialisation. When validation data is
/// given each trace row carries its AUROC.
template <typename Scalar>
TrainResult<Scalar> train(const Mat<Scalar>& x, std::span<const int> labels, const SNNParams& params,
                          const Mat<Scalar>* val_x = nullptr, std::span<const int> val_labels = {}) {
  validate(params);
  const auto n = x.rows();
  if (n == 0) throw Error(ErrorKind::Validation, "snn: empty training set");
  if (static_cast<std::size_t>(n) != labels.size()) throw Error(ErrorKind::Shape, "snn: label count differs from rows");
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == n) throw Error(ErrorKind::Validation, "snn: training set has a single class");
  for (int y : labels)
    if (y != 0 && y != 1) throw Error(ErrorKind::Validation, "snn: labels must be 0 or 1");

  auto init_rng = make_rng(params.seed, "snn-init");
  TrainResult<Scalar> out{init_model<Scalar>(x.cols(), static_cast<Eigen::Index>(params.hidden), init_rng), {}};
  detail::AdamState<Scalar> st{SNNModel<Scalar>::zeros(x.cols(), out.model.hidden()),
                               SNNModel<Scalar>::zeros(x.cols(), out.model.hidden()), 0};
  auto grad = SNNModel<Scalar>::zeros(x.cols(), out.model.hidden());
  const auto bs = static_cast<Eigen::Index>(batch_size(static_cast<std::size_t>(n), params.batch_fraction));

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto shuffle_rng = make_rng(params.seed, "snn-shuffle");
  for (std::size_t epoch = 1; epoch <= params.epochs; ++epoch) {
    shuffle(std::span(order), shuffle_rng);
    double total = 0;
    for (Eigen::Index start = 0; start < n; start += bs) {
      const auto len = std::min(bs, n - start);
      Mat<Scalar> xb(len, x.cols());
      Vec<Scalar> yb(len);
      for (Eigen::Index r = 0; r < len; ++r) {
        const auto src = order[static_cast<std::size_t>(start + r)];
        xb.row(r) = x.row(src);
        yb(r) = Scalar(labels[static_cast<std::size_t>(src)]);
      }
      const Scalar loss = loss_and_gradient(out.model, xb, yb, params, grad);
      total += static_cast<double>(loss) * static_cast<double>(len);
      detail::adam_step(out.model, grad, st, params);
    }
    TraceRow row{epoch, total / static_cast<double>(n), std::nan("")};
    if (val_x && !val_labels.empty()) {
      const Vec<Scalar> h = forward(out.model, *val_x);
      std::vector<double> scores(static_cast<std::size_t>(h.size()));
      for (Eigen::Index k = 0; k < h.size(); ++k) scores[static_cast<std::size_t>(k)] = static_cast<double>(h(k));
      row.val_auroc = auroc(scores, val_labels);
    }
    out.trace.push_back(row);
  }
  return out;
}

/// CSV `epoch,mean_loss,val_auroc`.
std::string trace_csv(std::span<const TraceRow> trace);

/// JSON with shapes and row-major weight arrays.
std::string model_json(const SNNModel<double>& model, const SNNParams& params);
SNNModel<double> parse_model_json(std::string_view text);

/// Scores as plain doubles, for metric code.
std::vector<double> predict(const SNNModel<double>& model, const Eigen::MatrixXd& x);

}  // namespace dtibench
