#pragma once

// Small dense-network toolkit: fully connected layers with manual
// backpropagation, inverted dropout, Adam, and a central-difference gradient
// checker.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "xnetrec/matrix.hpp"

namespace xnetrec {

enum class Activation { ReLU, Sigmoid, Identity };

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct DenseLayer {
  Matrix weight;  // out x in
  std::vector<double> bias;
  Activation activation = Activation::Identity;
};

// Train mode applies dropout masks drawn from `seed`; Eval mode never does.
struct Mode {
  bool train = false;
  std::uint64_t seed = 0;

  static Mode eval() { return {false, 0}; }
  static Mode training(std::uint64_t seed) { return {true, seed}; }
};

// Everything backward() needs from one forward pass.
struct ForwardCache {
  std::vector<std::vector<double>> inputs;   // input fed to each layer (after dropout)
  std::vector<std::vector<double>> outputs;  // activation output of each layer (before dropout)
  std::vector<std::vector<double>> masks;    // dropout multipliers per layer; empty = none
};

struct DenseNetGrads {
  std::vector<Matrix> weight;
  std::vector<std::vector<double>> bias;

  void zero();
  void scale(double s);
};

// A parameter tensor paired with its gradient buffer.
struct ParamSlot {
  std::string name;
  std::span<double> value;
  std::span<double> grad;
};

class DenseNet {
 public:
  DenseNet() = default;
  // Throws ShapeError when consecutive layer sizes do not chain.
  DenseNet(std::vector<DenseLayer> layers, double dropout_rate);

  // in -> hidden (ReLU) -> out (`output_activation`), Glorot-uniform weights,
  // zero biases.
  static DenseNet one_hidden(std::size_t in, std::size_t hidden, std::size_t out, Activation output_activation,
                             double dropout_rate, std::uint64_t seed);

  std::size_t input_size() const;
  std::size_t output_size() const;
  double dropout_rate() const { return dropout_rate_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  // Dropout (inverted, scaled by 1/(1-rate)) is applied to hidden-layer
  // outputs only. Pass `cache` to enable a later backward().
  std::vector<double> forward(std::span<const double> input, Mode mode, ForwardCache* cache = nullptr) const;

  // Accumulates parameter gradients into `grads` and returns d loss / d input.
  std::vector<double> backward(const ForwardCache& cache, std::span<const double> grad_output,
                               DenseNetGrads& grads) const;

  DenseNetGrads make_grads() const;

  // Slots named "<prefix>.w<l>" / "<prefix>.b<l>".
  std::vector<ParamSlot> slots(DenseNetGrads& grads, const std::string& prefix);

  std::size_t parameter_count() const;

 private:
  std::vector<DenseLayer> layers_;
  double dropout_rate_ = 0.0;
};

// ---- Adam ----------------------------------------------------------------------

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  AdamState() = default;
  AdamState(std::size_t size, AdamConfig cfg) : config(cfg), m(size, 0.0), v(size, 0.0) {}
};

// One bias-corrected Adam update; increments state.step.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

// Adam over a fixed list of parameter slots; states are created on first use
// and matched by position afterwards.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}
  void step(const std::vector<ParamSlot>& slots);
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<AdamState> states_;
};

// ---- gradient checking -----------------------------------------------------------

// Max over checked coordinates of |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
// where numeric is the central difference with step h. Checks every coordinate
// when `indices` is empty. Throws ConfigError when h == 0.
double grad_check(const std::function<double(std::span<const double>)>& loss, std::span<const double> params,
                  std::span<const double> analytic, double h, std::span<const std::size_t> indices = {});

// Records whether each ReLU pre-activation evaluated on this thread is positive,
// in evaluation order, for as long as the trace is alive. Not reentrant.
class ReluTrace {
 public:
  ReluTrace();
  ~ReluTrace();
  ReluTrace(const ReluTrace&) = delete;
  ReluTrace& operator=(const ReluTrace&) = delete;

  void clear() { pattern_.clear(); }
  const std::vector<bool>& pattern() const { return pattern_; }
  void record(bool positive) { pattern_.push_back(positive); }

  // Active trace of this thread, or nullptr.
  static ReluTrace* current();

 private:
  std::vector<bool> pattern_;
};

struct CoordinateCheck {
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double error = 0.0;  // as in grad_check
  bool kinked = false;  // the ReLU pattern at p + h or p - h differs from the one at p
};

// grad_check per coordinate, also flagging central differences that straddle
// a ReLU kink.
std::vector<CoordinateCheck> grad_check_coordinates(const std::function<double(std::span<const double>)>& loss,
                                                    std::span<const double> params, std::span<const double> analytic,
                                                    double h, std::span<const std::size_t> indices = {});

}  // namespace xnetrec
