#include "cic/nn/tensor_io.hpp"

#include "cic/core/errors.hpp"

namespace cic::nn {

std::uint64_t TensorBuf::numel() const {
  std::uint64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

TensorBuf to_tensor(const Matrix& m) {
  TensorBuf t;
  t.shape = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  t.data.assign(m.data(), m.data() + m.size());
  return t;
}

TensorBuf to_tensor(const Vector& v) {
  TensorBuf t;
  t.shape = {static_cast<std::uint64_t>(v.size())};
  t.data.assign(v.data(), v.data() + v.size());
  return t;
}

TensorBuf scalar_tensor(double x) {
  TensorBuf t;
  t.shape = {1};
  t.data = {x};
  return t;
}

const TensorBuf& require_array(const ArrayMap& in, const std::string& name) {
  const auto it = in.find(name);
  if (it == in.end()) throw CorruptionError("checkpoint is missing array '" + name + "'");
  return it->second;
}

Matrix matrix_from(const TensorBuf& t, Eigen::Index rows, Eigen::Index cols, const std::string& name) {
  if (t.shape.size() != 2 || t.shape[0] != static_cast<std::uint64_t>(rows) ||
      t.shape[1] != static_cast<std::uint64_t>(cols) || !t.valid()) {
    throw CorruptionError("array '" + name + "' has unexpected shape");
  }
  Matrix m(rows, cols);
  std::copy(t.data.begin(), t.data.end(), m.data());
  return m;
}

Vector vector_from(const TensorBuf& t, Eigen::Index size, const std::string& name) {
  if (t.shape.size() != 1 || t.shape[0] != static_cast<std::uint64_t>(size) || !t.valid()) {
    throw CorruptionError("array '" + name + "' has unexpected shape");
  }
  Vector v(size);
  std::copy(t.data.begin(), t.data.end(), v.data());
  return v;
}

namespace {

std::string layer_name(const std::string& prefix, std::size_t i, const char* what) {
  return prefix + "/" + std::to_string(i) + "/" + what;
}

void export_dense(const std::vector<Dense>& layers, const std::string& prefix, ArrayMap& out) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    out[layer_name(prefix, i, "weight")] = to_tensor(layers[i].weight);
    out[layer_name(prefix, i, "bias")] = to_tensor(layers[i].bias);
  }
}

void import_dense(std::vector<Dense>& layers, const std::string& prefix, const ArrayMap& in) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto wn = layer_name(prefix, i, "weight");
    const auto bn = layer_name(prefix, i, "bias");
    layers[i].weight = matrix_from(require_array(in, wn), layers[i].weight.rows(), layers[i].weight.cols(), wn);
    layers[i].bias = vector_from(require_array(in, bn), layers[i].bias.size(), bn);
  }
}

}  // namespace

void export_mlp(const Mlp& net, const std::string& prefix, ArrayMap& out) { export_dense(net.layers(), prefix, out); }

void import_mlp(Mlp& net, const std::string& prefix, const ArrayMap& in) {
  import_dense(net.mutable_layers(), prefix, in);
}

void export_adam(const AdamState& state, const std::string& prefix, ArrayMap& out) {
  export_dense(state.m, prefix + "/m", out);
  export_dense(state.v, prefix + "/v", out);
  out[prefix + "/t"] = scalar_tensor(static_cast<double>(state.t));
}

void import_adam(AdamState& state, const std::string& prefix, const ArrayMap& in) {
  import_dense(state.m, prefix + "/m", in);
  import_dense(state.v, prefix + "/v", in);
  const auto& t = require_array(in, prefix + "/t");
  if (t.data.size() != 1) throw CorruptionError("array '" + prefix + "/t' has unexpected shape");
  state.t = static_cast<std::int64_t>(t.data[0]);
}

}  // namespace cic::nn
