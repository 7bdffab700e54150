#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cic/nn/adam.hpp"
#include "cic/nn/mlp.hpp"

namespace cic::nn {

// Dense row-major buffer; product(shape) == data.size().
struct TensorBuf {
  std::vector<std::uint64_t> shape;
  std::vector<double> data;

  std::uint64_t numel() const;
  bool valid() const { return numel() == data.size(); }
  bool operator==(const TensorBuf&) const = default;
};

TensorBuf to_tensor(const Matrix& m);
TensorBuf to_tensor(const Vector& v);
TensorBuf scalar_tensor(double x);
Matrix matrix_from(const TensorBuf& t, Eigen::Index rows, Eigen::Index cols, const std::string& name);
Vector vector_from(const TensorBuf& t, Eigen::Index size, const std::string& name);

// Name-ordered so serialization is independent of insertion order.
using ArrayMap = std::map<std::string, TensorBuf>;

void export_mlp(const Mlp& net, const std::string& prefix, ArrayMap& out);
// Loads into a network whose architecture is already set; shapes must match.
void import_mlp(Mlp& net, const std::string& prefix, const ArrayMap& in);

void export_adam(const AdamState& state, const std::string& prefix, ArrayMap& out);
void import_adam(AdamState& state, const std::string& prefix, const ArrayMap& in);

const TensorBuf& require_array(const ArrayMap& in, const std::string& name);

}  // namespace cic::nn
