#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "satnet/rng.hpp"

namespace satnet::nn {

// Dense 64-bit tensors, 1-D vectors and 2-D row-major matrices. Desk-scale
// sizes; no views, no broadcasting beyond what the ops below define.
struct Tensor {
  std::vector<size_t> shape;
  std::vector<double> data;

  static Tensor zeros(std::vector<size_t> shape);
  static Tensor vec(std::vector<double> values);
  static Tensor mat(size_t rows, size_t cols, std::vector<double> values);
  static Tensor randn(std::vector<size_t> shape, Rng& rng, double scale);

  size_t size() const { return data.size(); }
  size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  bool is_vector() const { return shape.size() == 1; }
  bool is_matrix() const { return shape.size() == 2; }

  double& at(size_t i) { return data[i]; }
  double at(size_t i) const { return data[i]; }
  double& at(size_t r, size_t c) { return data[r * cols() + c]; }
  double at(size_t r, size_t c) const { return data[r * cols() + c]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool operator==(const Tensor& o) const = default;
};

// Named parameter set: encoder layers, recurrent cell gates, Q head. The Q
// head input dimension is 256 in the default configuration.
struct Params {
  std::map<std::string, Tensor> tensors;

  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);
  bool has(const std::string& name) const { return tensors.count(name) > 0; }
  bool operator==(const Params& o) const = default;
};

struct GradRecord {
  std::map<std::string, Tensor> grads;
};

// Plain forward math (inference paths). Shape checks throw ShapeMismatch.
Tensor linear_forward(const Tensor& w, const Tensor& x, const Tensor& b);  // Wx + b
Tensor matvec(const Tensor& w, const Tensor& x);
Tensor tanh_v(const Tensor& x);
Tensor sigmoid_v(const Tensor& x);
Tensor add_v(const Tensor& a, const Tensor& b);
Tensor mul_v(const Tensor& a, const Tensor& b);
Tensor concat_v(const Tensor& a, const Tensor& b);

// Standard gated recurrent update. Tensor names under `prefix`:
//   wz,uz,bz  update gate   z = sigmoid(Wz x + Uz h + bz)
//   wr,ur,br  reset gate    r = sigmoid(Wr x + Ur h + br)
//   wc,uc,bc  candidate     c = tanh(Wc x + Uc (r*h) + bc)
// h' = (1 - z) * h + z * c
Tensor gru_forward(const Params& params, const std::string& prefix, const Tensor& h,
                   const Tensor& x);

// Recurrence removed: h' = tanh(Wc x + bc). Same parameter shapes as the cell
// it replaces, so checkpoints stay interchangeable across variants.
Tensor passthrough_forward(const Params& params, const std::string& prefix, const Tensor& x);

Params make_gru_params(const std::string& prefix, size_t input_dim, size_t hidden_dim,
                       Rng& rng);

// Reverse-mode tape over a fixed op set. Values are computed eagerly when the
// node is created; backward() fills gradients for every param leaf.
class Tape {
 public:
  using Ref = int;

  Ref constant(Tensor t);
  Ref param(const std::string& name, const Tensor& value);
  Ref linear(Ref w, Ref x, Ref b);      // y = Wx + b
  Ref matvec_op(Ref w, Ref x);          // y = Wx
  Ref add(Ref a, Ref b);
  Ref sub(Ref a, Ref b);
  Ref mul(Ref a, Ref b);                // elementwise
  Ref scale(Ref a, double s);
  Ref tanh_op(Ref a);
  Ref sigmoid_op(Ref a);
  Ref concat(Ref a, Ref b);
  Ref sum_agg(const std::vector<Ref>& items);  // elementwise sum
  Ref sum(Ref a);                              // scalar total of a vector
  Ref pick(Ref v, size_t index);               // scalar component
  Ref mse(Ref pred, Ref target);               // scalar mean squared error
  Ref one_minus(Ref a);                        // 1 - a, elementwise

  const Tensor& value(Ref r) const;

  // Gradients of the scalar `root` w.r.t. every param leaf. Throws
  // NoForwardRecorded if no nodes were recorded, ShapeMismatch if root is not
  // scalar. Gradients for the same param name accumulate.
  GradRecord backward(Ref root);

 private:
  enum class Op {
    Constant, Param, Linear, MatVec, Add, Sub, Mul, Scale, Tanh, Sigmoid,
    Concat, SumAgg, Sum, Pick, Mse, OneMinus
  };
  struct Node {
    Op op;
    std::vector<Ref> inputs;
    Tensor val;
    double scalar = 0.0;   // scale factor / pick index
    std::string pname;
  };
  std::vector<Node> nodes_;

  Ref push(Node n);
};

// Adam with bias correction; beta1=0.9, beta2=0.999, eps=1e-8 defaults.
struct OptimizerConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptimizerState {
  std::map<std::string, Tensor> m;
  std::map<std::string, Tensor> v;
  long t = 0;
};

// Applies one Adam update to every parameter present in `grads`. Parameters
// without gradients are untouched.
void optimizer_step(Params& params, const GradRecord& grads, const OptimizerConfig& config,
                    OptimizerState& state);

}  // namespace satnet::nn
