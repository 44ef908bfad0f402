// Copyright 2026 The dtibench Authors.
// SPDX-License-Identifier: Apache-2.0

#include "dtibench/snn.hpp"

#include <json.hpp>

#include "dtibench/io.hpp"

namespace dtibench {

std::string_view to_string(LossKind kind) noexcept { return kind == LossKind::Focal ? "focal" : "bce"; }

LossKind parse_loss_kind(std::string_view text) {
  if (text == "bce" || text == "BCE") return LossKind::Bce;
  if (text == "focal" || text == "Focal") return LossKind::Focal;
  throw Error(ErrorKind::Validation, "unknown loss '" + std::string(text) + "' (expected bce or focal)");
}

std::size_t hidden_width(int architecture) {
  switch (architecture) {
    case 1: return 32;
    case 2: return 64;
    case 3: return 128;
    case 4: return 256;
    default:
      throw Error(ErrorKind::Validation, "architecture type must be 1-4, got " + std::to_string(architecture));
  }
}

void validate(const SNNParams& p) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Validation, "snn: " + what); };
  if (p.hidden == 0) fail("hidden width must be positive");
  if (p.architecture != 0 && hidden_width(p.architecture) != p.hidden)
    fail("hidden width " + std::to_string(p.hidden) + " does not match architecture type " +
         std::to_string(p.architecture));
  if (p.epochs == 0) fail("epochs must be positive");
  if (!(p.batch_fraction > 0) || p.batch_fraction > 1) fail("batch fraction must be in (0, 1]");
  if (!(p.learning_rate > 0)) fail("learning rate must be positive");
  if (!(p.beta1 >= 0 && p.beta1 < 1) || !(p.beta2 >= 0 && p.beta2 < 1)) fail("Adam betas must be in [0, 1)");
  if (!(p.epsilon > 0)) fail("Adam epsilon must be positive");
  if (!(p.rescale_weight > 0)) fail("rescaling weight must be positive");
  if (!(p.focal_gamma >= 0)) fail("focal gamma must be non-negative");
  if (p.focal_alpha > 1) fail("focal alpha must be at most 1");
}

std::size_t batch_size(std::size_t n, double fraction) {
  const auto b = std::llround(static_cast<double>(n) * fraction);
  return static_cast<std::size_t>(std::max<long long>(1, b));
}

std::string trace_csv(std::span<const TraceRow> trace) {
  std::string s = "epoch,mean_loss,val_auroc\n";
  for (const auto& r : trace)
    s += std::to_string(r.epoch) + "," + io::format_double(r.mean_loss) + "," + io::format_double(r.val_auroc) + "\n";
  return s;
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"shape", {m.rows(), m.cols()}}, {"data", data}};
}

Eigen::MatrixXd matrix_from(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw Error(ErrorKind::Parse, std::string("model: missing '") + name + "'");
  const auto& e = j.at(name);
  const auto shape = e.at("shape").get<std::vector<Eigen::Index>>();
  const auto data = e.at("data").get<std::vector<double>>();
  if (shape.size() != 2 || shape[0] < 0 || shape[1] < 0 ||
      static_cast<std::size_t>(shape[0] * shape[1]) != data.size())
    throw Error(ErrorKind::Shape, std::string("model: '") + name + "' shape does not match its data");
  Eigen::MatrixXd m(shape[0], shape[1]);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = data[static_cast<std::size_t>(i * m.cols() + k)];
  if (!m.allFinite()) throw Error(ErrorKind::Validation, std::string("model: '") + name + "' has non-finite weights");
  return m;
}

}  // namespace

std::string model_json(const SNNModel<double>& model, const SNNParams& params) {
  nlohmann::json j;
  j["input_width"] = model.input_width();
  j["hidden"] = model.hidden();
  j["architecture"] = params.architecture;
  j["architecture_note"] = "types 1-4 are single hidden layers of width 32/64/128/256";
  j["loss"] = std::string(to_string(params.loss));
  j["W1"] = matrix_json(model.w1);
  j["b1"] = matrix_json(model.b1.transpose());
  j["W2"] = matrix_json(model.w2);
  j["b2"] = model.b2;
  return j.dump(1) + "\n";
}

SNNModel<double> parse_model_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model: ") + e.what());
  }
  try {
    SNNModel<double> m;
    m.w1 = matrix_from(j, "W1");
    const Eigen::MatrixXd b1 = matrix_from(j, "b1");
    const Eigen::MatrixXd w2 = matrix_from(j, "W2");
    if (b1.rows() != 1 || b1.cols() != m.w1.cols() || w2.cols() != 1 || w2.rows() != m.w1.cols())
      throw Error(ErrorKind::Shape, "model: layer shapes are inconsistent");
    m.b1 = b1.row(0).transpose();
    m.w2 = w2.col(0);
    m.b2 = j.at("b2").get<double>();
    if (!std::isfinite(m.b2)) throw Error(ErrorKind::Validation, "model: b2 is not finite");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model: ") + e.what());
  }
}

std::vector<double> predict(const SNNModel<double>& model, const Eigen::MatrixXd& x) {
  const Eigen::VectorXd h = forward(model, x);
  return {h.data(), h.data() + h.size()};
}

}  // namespace dtibench
