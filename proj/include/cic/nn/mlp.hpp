#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cic/core/rng.hpp"

namespace cic::nn {

// Batches are row-major: one sample per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class Activation { identity, relu, tanh };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

// Affine layer y = x W^T + b with W stored out x in.
struct Dense {
  Matrix weight;
  Vector bias;
};

// Parameter-shaped gradient buffers.
struct Gradients {
  std::vector<Dense> layers;

  void set_zero();
  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double s);
  bool all_finite() const;
};

// Per-layer inputs and pre-activations recorded by a forward pass.
struct ForwardCache {
  std::uint64_t generation = 0;
  std::vector<Matrix> inputs;
  std::vector<Matrix> pre_activations;
  Matrix output;
};

struct BackwardResult {
  Gradients params;
  Matrix input;
};

// ReLU on hidden layers, configurable activation on the output layer.
class Mlp {
 public:
  Mlp() = default;
  // dims = {in, hidden..., out}; weights drawn with the scaled-uniform
  // (Glorot) scheme from rng, biases zero.
  Mlp(const std::vector<std::size_t>& dims, Activation output, Rng& rng);
  // Zero-initialized network of the given shape.
  Mlp(const std::vector<std::size_t>& dims, Activation output);

  static constexpr std::string_view kInitScheme = "glorot_uniform/zero_bias";

  Matrix forward(const Matrix& input) const;
  Matrix forward(const Matrix& input, ForwardCache& cache) const;
  BackwardResult backward(const ForwardCache& cache, const Matrix& output_grad) const;
  // Input gradient only; parameters are treated as frozen.
  Matrix backward_input(const ForwardCache& cache, const Matrix& output_grad) const;

  std::size_t in_dim() const;
  std::size_t out_dim() const;
  std::size_t num_layers() const { return layers_.size(); }
  std::vector<std::size_t> dims() const;
  Activation output_activation() const { return output_; }
  std::size_t num_parameters() const;

  const std::vector<Dense>& layers() const { return layers_; }
  // Any access through here invalidates outstanding forward caches.
  std::vector<Dense>& mutable_layers();

  Gradients zero_gradients() const;
  bool same_architecture(const Mlp& other) const;
  bool operator==(const Mlp& other) const;

 private:
  void touch();

  std::vector<Dense> layers_;
  Activation output_ = Activation::identity;
  std::uint64_t generation_ = 0;
};

// Parses "in->1024->1024->64" style shapes; "in"/"out" resolve to the
// supplied widths. Separators may be "->", "→" or "-".
std::vector<std::size_t> parse_architecture(std::string_view spec, std::size_t in_dim,
                                            std::size_t out_dim);

// dims {in, hidden x depth, out}.
std::vector<std::size_t> mlp_dims(std::size_t in, std::size_t hidden, std::size_t depth,
                                  std::size_t out);

// target <- (1 - rate) target + rate online, entrywise.
void polyak_update(Mlp& target, const Mlp& online, double rate);

// Horizontal concatenation of row blocks with equal row counts.
Matrix hconcat(std::initializer_list<const Matrix*> blocks);

}  // namespace cic::nn
