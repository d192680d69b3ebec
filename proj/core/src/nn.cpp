#include "xnetrec/nn.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "xnetrec/errors.hpp"
#include "xnetrec/random.hpp"

namespace xnetrec {

namespace {

double activate(Activation a, double x) {
  switch (a) {
    case Activation::ReLU:
      return x > 0.0 ? x : 0.0;
    case Activation::Sigmoid:
      return sigmoid(x);
    case Activation::Identity:
      break;
  }
  return x;
}

// Derivative expressed through the activation output y.
double activation_grad(Activation a, double y) {
  switch (a) {
    case Activation::ReLU:
      return y > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid:
      return y * (1.0 - y);
    case Activation::Identity:
      break;
  }
  return 1.0;
}

std::string shape_text(std::size_t a, std::size_t b) {
  return std::to_string(a) + " vs " + std::to_string(b);
}

}  // namespace

void DenseNetGrads::zero() {
  for (auto& w : weight) w.fill(0.0);
  for (auto& b : bias) std::ranges::fill(b, 0.0);
}

void DenseNetGrads::scale(double s) {
  for (auto& w : weight) {
    for (double& x : w.values) x *= s;
  }
  for (auto& b : bias) {
    for (double& x : b) x *= s;
  }
}

DenseNet::DenseNet(std::vector<DenseLayer> layers, double dropout_rate)
    : layers_(std::move(layers)), dropout_rate_(dropout_rate) {
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1)");
  if (layers_.empty()) throw ShapeError("a dense net needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.bias.size() != layer.weight.rows) {
      throw ShapeError("layer " + std::to_string(l) + " bias/weight mismatch: " + shape_text(layer.bias.size(), layer.weight.rows));
    }
    if (l > 0 && layers_[l - 1].weight.rows != layer.weight.cols) {
      throw ShapeError("layer " + std::to_string(l) + " input does not chain: " +
                       shape_text(layers_[l - 1].weight.rows, layer.weight.cols));
    }
  }
}

DenseNet DenseNet::one_hidden(std::size_t in, std::size_t hidden, std::size_t out, Activation output_activation,
                              double dropout_rate, std::uint64_t seed) {
  auto rng = make_rng(seed, {0x64656e7365});
  const auto glorot = [&](std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Matrix w(fan_out, fan_in);
    for (double& x : w.values) x = dist(rng);
    return w;
  };
  std::vector<DenseLayer> layers;
  layers.push_back({glorot(in, hidden), std::vector<double>(hidden, 0.0), Activation::ReLU});
  layers.push_back({glorot(hidden, out), std::vector<double>(out, 0.0), output_activation});
  return DenseNet(std::move(layers), dropout_rate);
}

std::size_t DenseNet::input_size() const { return layers_.empty() ? 0 : layers_.front().weight.cols; }
std::size_t DenseNet::output_size() const { return layers_.empty() ? 0 : layers_.back().weight.rows; }

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

std::vector<double> DenseNet::forward(std::span<const double> input, Mode mode, ForwardCache* cache) const {
  if (input.size() != input_size()) throw ShapeError("dense net input: " + shape_text(input.size(), input_size()));
  if (cache) {
    cache->inputs.assign(layers_.size(), {});
    cache->outputs.assign(layers_.size(), {});
    cache->masks.assign(layers_.size(), {});
  }
  const bool drop = mode.train && dropout_rate_ > 0.0;
  Rng rng(mode.seed);
  std::bernoulli_distribution keep(1.0 - dropout_rate_);
  const double keep_scale = 1.0 / (1.0 - dropout_rate_);

  std::vector<double> x(input.begin(), input.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    std::vector<double> y(layer.weight.rows);
    auto* trace = layer.activation == Activation::ReLU ? ReluTrace::current() : nullptr;
    for (std::size_t o = 0; o < layer.weight.rows; ++o) {
      const double z = dot(layer.weight.row(o), x) + layer.bias[o];
      if (trace) trace->record(z > 0.0);
      y[o] = activate(layer.activation, z);
    }
    if (cache) {
      cache->inputs[l] = std::move(x);
      cache->outputs[l] = y;
    }
    const bool hidden = l + 1 < layers_.size();
    if (hidden && drop) {
      std::vector<double> mask(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) {
        mask[i] = keep(rng) ? keep_scale : 0.0;
        y[i] *= mask[i];
      }
      if (cache) cache->masks[l] = std::move(mask);
    }
    x = std::move(y);
  }
  return x;
}

std::vector<double> DenseNet::backward(const ForwardCache& cache, std::span<const double> grad_output,
                                       DenseNetGrads& grads) const {
  if (cache.inputs.size() != layers_.size() || cache.outputs.size() != layers_.size()) {
    throw ShapeError("stale forward cache: layer count " + shape_text(cache.inputs.size(), layers_.size()));
  }
  if (grads.weight.size() != layers_.size()) throw ShapeError("gradient buffer does not match network");
  if (grad_output.size() != output_size()) throw ShapeError("output gradient: " + shape_text(grad_output.size(), output_size()));

  std::vector<double> g(grad_output.begin(), grad_output.end());
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& layer = layers_[li];
    const auto& in = cache.inputs[li];
    const auto& out = cache.outputs[li];
    if (in.size() != layer.weight.cols || out.size() != layer.weight.rows) {
      throw ShapeError("stale forward cache at layer " + std::to_string(li));
    }
    // Through dropout applied to this layer's output.
    if (!cache.masks[li].empty()) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= cache.masks[li][i];
    }
    // Through the activation.
    for (std::size_t o = 0; o < g.size(); ++o) g[o] *= activation_grad(layer.activation, out[o]);

    auto& gw = grads.weight[li];
    auto& gb = grads.bias[li];
    std::vector<double> g_in(layer.weight.cols, 0.0);
    for (std::size_t o = 0; o < layer.weight.rows; ++o) {
      const double go = g[o];
      if (go == 0.0) continue;
      gb[o] += go;
      axpy(go, in, gw.row(o));
      axpy(go, layer.weight.row(o), g_in);
    }
    g = std::move(g_in);
  }
  return g;
}

DenseNetGrads DenseNet::make_grads() const {
  DenseNetGrads g;
  for (const auto& l : layers_) {
    g.weight.emplace_back(l.weight.rows, l.weight.cols);
    g.bias.emplace_back(l.bias.size(), 0.0);
  }
  return g;
}

std::vector<ParamSlot> DenseNet::slots(DenseNetGrads& grads, const std::string& prefix) {
  std::vector<ParamSlot> out;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    out.push_back({prefix + ".w" + std::to_string(l), layers_[l].weight.values, grads.weight[l].values});
    out.push_back({prefix + ".b" + std::to_string(l), layers_[l].bias, grads.bias[l]});
  }
  return out;
}

// ---- Adam ------------------------------------------------------------------------------

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size() || params.size() != state.v.size()) {
    throw ShapeError("adam: parameter/gradient/state sizes differ");
  }
  const auto& c = state.config;
  ++state.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

void Adam::step(const std::vector<ParamSlot>& slots) {
  if (states_.empty()) {
    for (const auto& s : slots) states_.emplace_back(s.value.size(), config_);
  }
  if (states_.size() != slots.size()) throw ShapeError("adam: parameter slot count changed");
  for (std::size_t i = 0; i < slots.size(); ++i) adam_step(slots[i].value, slots[i].grad, states_[i]);
}

// ---- gradient checking ---------------------------------------------------------------------

namespace {

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

void check_step(double h, std::span<const double> analytic, std::size_t params) {
  if (h == 0.0) throw ConfigError("degenerate step");
  if (analytic.size() != params) throw ShapeError("grad_check: analytic gradient size differs from parameters");
}

thread_local ReluTrace* active_trace = nullptr;

}  // namespace

double grad_check(const std::function<double(std::span<const double>)>& loss, std::span<const double> params,
                  std::span<const double> analytic, double h, std::span<const std::size_t> indices) {
  check_step(h, analytic, params.size());
  std::vector<double> p(params.begin(), params.end());
  double worst = 0.0;
  const auto check = [&](std::size_t i) {
    const double orig = p[i];
    p[i] = orig + h;
    const double up = loss(p);
    p[i] = orig - h;
    const double down = loss(p);
    p[i] = orig;
    worst = std::max(worst, relative_error(analytic[i], (up - down) / (2.0 * h)));
  };
  if (indices.empty()) {
    for (std::size_t i = 0; i < p.size(); ++i) check(i);
  } else {
    for (std::size_t i : indices) check(i);
  }
  return worst;
}

ReluTrace::ReluTrace() {
  if (active_trace) throw ConfigError("a ReLU trace is already active on this thread");
  active_trace = this;
}

ReluTrace::~ReluTrace() { active_trace = nullptr; }

ReluTrace* ReluTrace::current() { return active_trace; }

std::vector<CoordinateCheck> grad_check_coordinates(const std::function<double(std::span<const double>)>& loss,
                                                    std::span<const double> params, std::span<const double> analytic,
                                                    double h, std::span<const std::size_t> indices) {
  check_step(h, analytic, params.size());
  std::vector<double> p(params.begin(), params.end());
  ReluTrace trace;
  loss(p);
  const auto base = trace.pattern();
  const auto eval = [&](bool& kinked) {
    trace.clear();
    const double v = loss(p);
    kinked = kinked || trace.pattern() != base;
    return v;
  };
  std::vector<CoordinateCheck> out;
  const auto check = [&](std::size_t i) {
    CoordinateCheck c;
    c.index = i;
    c.analytic = analytic[i];
    const double orig = p[i];
    p[i] = orig + h;
    const double up = eval(c.kinked);
    p[i] = orig - h;
    const double down = eval(c.kinked);
    p[i] = orig;
    c.numeric = (up - down) / (2.0 * h);
    c.error = relative_error(c.analytic, c.numeric);
    out.push_back(c);
  };
  if (indices.empty()) {
    for (std::size_t i = 0; i < p.size(); ++i) check(i);
  } else {
    for (std::size_t i : indices) check(i);
  }
  return out;
}

}  // namespace xnetrec
