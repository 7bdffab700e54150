#include "cic/nn/mlp.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <string>

#include "cic/core/errors.hpp"

namespace cic::nn {

namespace {

std::atomic<std::uint64_t> g_generation{1};

void apply_activation(Activation act, Matrix& m) {
  switch (act) {
    case Activation::identity:
      break;
    case Activation::relu:
      m = m.cwiseMax(0.0);
      break;
    case Activation::tanh:
      m = m.array().tanh().matrix();
      break;
  }
}

// dL/dpre given dL/dpost and the pre-activation values.
void activation_backward(Activation act, const Matrix& pre, Matrix& grad) {
  switch (act) {
    case Activation::identity:
      break;
    case Activation::relu:
      grad = (pre.array() > 0.0).select(grad, 0.0);
      break;
    case Activation::tanh: {
      const auto t = pre.array().tanh();
      grad = (grad.array() * (1.0 - t * t)).matrix();
      break;
    }
  }
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::identity:
      return "identity";
    case Activation::relu:
      return "relu";
    case Activation::tanh:
      return "tanh";
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity" || name == "none") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

void Gradients::set_zero() {
  for (auto& l : layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

Gradients& Gradients::operator+=(const Gradients& other) {
  if (other.layers.size() != layers.size()) throw InternalError("gradient shape mismatch");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += other.layers[i].weight;
    layers[i].bias += other.layers[i].bias;
  }
  return *this;
}

Gradients& Gradients::operator*=(double s) {
  for (auto& l : layers) {
    l.weight *= s;
    l.bias *= s;
  }
  return *this;
}

bool Gradients::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

Mlp::Mlp(const std::vector<std::size_t>& dims, Activation output, Rng& rng) : Mlp(dims, output) {
  for (auto& l : layers_) {
    const double fan_in = static_cast<double>(l.weight.cols());
    const double fan_out = static_cast<double>(l.weight.rows());
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
        l.weight(r, c) = rng.uniform(-limit, limit);
      }
    }
  }
}

Mlp::Mlp(const std::vector<std::size_t>& dims, Activation output) : output_(output) {
  if (dims.size() < 2) throw ConfigError("mlp needs at least an input and an output width");
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    if (dims[i] == 0 && i > 0) throw ConfigError("mlp layer " + std::to_string(i) + " has zero width");
    if (dims[i + 1] == 0) throw ConfigError("mlp layer " + std::to_string(i) + " has zero output width");
    Dense d;
    d.weight = Matrix::Zero(static_cast<Eigen::Index>(dims[i + 1]), static_cast<Eigen::Index>(dims[i]));
    d.bias = Vector::Zero(static_cast<Eigen::Index>(dims[i + 1]));
    layers_.push_back(std::move(d));
  }
  touch();
}

void Mlp::touch() { generation_ = g_generation.fetch_add(1, std::memory_order_relaxed); }

std::vector<Dense>& Mlp::mutable_layers() {
  touch();
  return layers_;
}

std::size_t Mlp::in_dim() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weight.cols());
}

std::size_t Mlp::out_dim() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().weight.rows());
}

std::vector<std::size_t> Mlp::dims() const {
  std::vector<std::size_t> d;
  if (layers_.empty()) return d;
  d.push_back(in_dim());
  for (const auto& l : layers_) d.push_back(static_cast<std::size_t>(l.weight.rows()));
  return d;
}

std::size_t Mlp::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Gradients Mlp::zero_gradients() const {
  Gradients g;
  g.layers.reserve(layers_.size());
  for (const auto& l : layers_) {
    g.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  return g;
}

bool Mlp::same_architecture(const Mlp& other) const {
  return output_ == other.output_ && dims() == other.dims();
}

bool Mlp::operator==(const Mlp& other) const {
  if (!same_architecture(other)) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].weight != other.layers_[i].weight || layers_[i].bias != other.layers_[i].bias) return false;
  }
  return true;
}

Matrix Mlp::forward(const Matrix& input) const {
  if (static_cast<std::size_t>(input.cols()) != in_dim()) {
    throw ConfigError("mlp layer 0 expects input width " + std::to_string(in_dim()) + ", got " +
                      std::to_string(input.cols()));
  }
  Matrix x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Matrix pre = x * layers_[i].weight.transpose();
    pre.rowwise() += layers_[i].bias.transpose();
    apply_activation(i + 1 == layers_.size() ? output_ : Activation::relu, pre);
    x = std::move(pre);
  }
  return x;
}

Matrix Mlp::forward(const Matrix& input, ForwardCache& cache) const {
  if (static_cast<std::size_t>(input.cols()) != in_dim()) {
    throw ConfigError("mlp layer 0 expects input width " + std::to_string(in_dim()) + ", got " +
                      std::to_string(input.cols()));
  }
  cache.generation = generation_;
  cache.inputs.resize(layers_.size());
  cache.pre_activations.resize(layers_.size());
  Matrix x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Matrix pre = x * layers_[i].weight.transpose();
    pre.rowwise() += layers_[i].bias.transpose();
    cache.inputs[i] = std::move(x);
    x = pre;
    apply_activation(i + 1 == layers_.size() ? output_ : Activation::relu, x);
    cache.pre_activations[i] = std::move(pre);
  }
  cache.output = x;
  return x;
}

BackwardResult Mlp::backward(const ForwardCache& cache, const Matrix& output_grad) const {
  if (cache.generation != generation_ || cache.inputs.size() != layers_.size()) {
    throw InternalError("mlp backward called with a stale or foreign forward cache");
  }
  if (output_grad.rows() != cache.output.rows() || output_grad.cols() != cache.output.cols()) {
    throw InternalError("mlp backward: output gradient shape does not match cached output");
  }
  BackwardResult result;
  result.params.layers.resize(layers_.size());
  Matrix grad = output_grad;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    activation_backward(k + 1 == layers_.size() ? output_ : Activation::relu, cache.pre_activations[k], grad);
    result.params.layers[k].weight = grad.transpose() * cache.inputs[k];
    result.params.layers[k].bias = grad.colwise().sum().transpose();
    grad = grad * layers_[k].weight;
  }
  result.input = std::move(grad);
  return result;
}

Matrix Mlp::backward_input(const ForwardCache& cache, const Matrix& output_grad) const {
  if (cache.generation != generation_ || cache.inputs.size() != layers_.size()) {
    throw InternalError("mlp backward called with a stale or foreign forward cache");
  }
  if (output_grad.rows() != cache.output.rows() || output_grad.cols() != cache.output.cols()) {
    throw InternalError("mlp backward: output gradient shape does not match cached output");
  }
  Matrix grad = output_grad;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    activation_backward(k + 1 == layers_.size() ? output_ : Activation::relu, cache.pre_activations[k], grad);
    grad = grad * layers_[k].weight;
  }
  return grad;
}

std::vector<std::size_t> parse_architecture(std::string_view spec, std::size_t in_dim, std::size_t out_dim) {
  std::string s(spec);
  for (const std::string_view sep : {std::string_view("->"), std::string_view("→")}) {
    for (std::size_t pos; (pos = s.find(sep)) != std::string::npos;) s.replace(pos, sep.size(), " ");
  }
  for (auto& c : s) {
    if (c == '-') c = ' ';
  }
  std::vector<std::size_t> dims;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) {
      const std::string_view tok(s.data() + i, j - i);
      if (tok == "in") {
        dims.push_back(in_dim);
      } else if (tok == "out") {
        dims.push_back(out_dim);
      } else {
        std::size_t v = 0;
        const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size() || v == 0) {
          throw ConfigError("bad architecture token '" + std::string(tok) + "' in '" + std::string(spec) + "'");
        }
        dims.push_back(v);
      }
    }
    i = j;
  }
  if (dims.size() < 2) throw ConfigError("architecture '" + std::string(spec) + "' needs at least two widths");
  return dims;
}

std::vector<std::size_t> mlp_dims(std::size_t in, std::size_t hidden, std::size_t depth, std::size_t out) {
  std::vector<std::size_t> d{in};
  for (std::size_t i = 0; i < depth; ++i) d.push_back(hidden);
  d.push_back(out);
  return d;
}

void polyak_update(Mlp& target, const Mlp& online, double rate) {
  if (!target.same_architecture(online)) throw ConfigError("polyak_update: architecture mismatch");
  auto& t = target.mutable_layers();
  const auto& o = online.layers();
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i].weight = (1.0 - rate) * t[i].weight + rate * o[i].weight;
    t[i].bias = (1.0 - rate) * t[i].bias + rate * o[i].bias;
  }
}

Matrix hconcat(std::initializer_list<const Matrix*> blocks) {
  Eigen::Index rows = -1;
  Eigen::Index cols = 0;
  for (const Matrix* b : blocks) {
    if (rows < 0) rows = b->rows();
    if (b->rows() != rows) throw InternalError("hconcat: row count mismatch");
    cols += b->cols();
  }
  Matrix out(rows < 0 ? 0 : rows, cols);
  Eigen::Index c = 0;
  for (const Matrix* b : blocks) {
    if (b->cols() > 0) out.middleCols(c, b->cols()) = *b;
    c += b->cols();
  }
  return out;
}

}  // namespace cic::nn
