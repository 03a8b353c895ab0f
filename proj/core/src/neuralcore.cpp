#include "satnet/neuralcore.hpp"

#include <cmath>
#include <numeric>

#include "satnet/errors.hpp"

namespace satnet::nn {

namespace {
size_t shape_size(const std::vector<size_t>& shape) {
  size_t n = 1;
  for (size_t d : shape) n *= d;
  return n;
}
}  // namespace

Tensor Tensor::zeros(std::vector<size_t> shape) {
  Tensor t;
  t.data.assign(shape_size(shape), 0.0);
  t.shape = std::move(shape);
  return t;
}

Tensor Tensor::vec(std::vector<double> values) {
  Tensor t;
  t.shape = {values.size()};
  t.data = std::move(values);
  return t;
}

Tensor Tensor::mat(size_t rows, size_t cols, std::vector<double> values) {
  if (values.size() != rows * cols) throw ShapeMismatch("Tensor::mat: data size mismatch");
  Tensor t;
  t.shape = {rows, cols};
  t.data = std::move(values);
  return t;
}

Tensor Tensor::randn(std::vector<size_t> shape, Rng& rng, double scale) {
  Tensor t = zeros(std::move(shape));
  for (double& d : t.data) d = rng.normal() * scale;
  return t;
}

const Tensor& Params::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw ShapeMismatch("Params: missing tensor " + name);
  return it->second;
}

Tensor& Params::at(const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw ShapeMismatch("Params: missing tensor " + name);
  return it->second;
}

Tensor linear_forward(const Tensor& w, const Tensor& x, const Tensor& b) {
  if (!w.is_matrix() || !x.is_vector() || !b.is_vector() || w.cols() != x.size() ||
      w.rows() != b.size())
    throw ShapeMismatch("linear_forward: W[" + std::to_string(w.rows()) + "," +
                        std::to_string(w.cols()) + "] x[" + std::to_string(x.size()) + "]");
  Tensor y = Tensor::zeros({w.rows()});
  for (size_t r = 0; r < w.rows(); ++r) {
    double acc = b.at(r);
    const double* wr = &w.data[r * w.cols()];
    for (size_t c = 0; c < w.cols(); ++c) acc += wr[c] * x.data[c];
    y.at(r) = acc;
  }
  return y;
}

Tensor matvec(const Tensor& w, const Tensor& x) {
  if (!w.is_matrix() || !x.is_vector() || w.cols() != x.size())
    throw ShapeMismatch("matvec: shape mismatch");
  Tensor y = Tensor::zeros({w.rows()});
  for (size_t r = 0; r < w.rows(); ++r) {
    double acc = 0.0;
    const double* wr = &w.data[r * w.cols()];
    for (size_t c = 0; c < w.cols(); ++c) acc += wr[c] * x.data[c];
    y.at(r) = acc;
  }
  return y;
}

Tensor tanh_v(const Tensor& x) {
  Tensor y = x;
  for (double& d : y.data) d = std::tanh(d);
  return y;
}

Tensor sigmoid_v(const Tensor& x) {
  Tensor y = x;
  for (double& d : y.data) d = 1.0 / (1.0 + std::exp(-d));
  return y;
}

Tensor add_v(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("add_v: shape mismatch");
  Tensor y = a;
  for (size_t i = 0; i < y.size(); ++i) y.data[i] += b.data[i];
  return y;
}

Tensor mul_v(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("mul_v: shape mismatch");
  Tensor y = a;
  for (size_t i = 0; i < y.size(); ++i) y.data[i] *= b.data[i];
  return y;
}

Tensor concat_v(const Tensor& a, const Tensor& b) {
  if (!a.is_vector() || !b.is_vector()) throw ShapeMismatch("concat_v: vectors only");
  Tensor y = Tensor::zeros({a.size() + b.size()});
  std::copy(a.data.begin(), a.data.end(), y.data.begin());
  std::copy(b.data.begin(), b.data.end(), y.data.begin() + a.size());
  return y;
}

Tensor gru_forward(const Params& p, const std::string& prefix, const Tensor& h,
                   const Tensor& x) {
  const Tensor z = sigmoid_v(add_v(linear_forward(p.at(prefix + ".wz"), x, p.at(prefix + ".bz")),
                                   matvec(p.at(prefix + ".uz"), h)));
  const Tensor r = sigmoid_v(add_v(linear_forward(p.at(prefix + ".wr"), x, p.at(prefix + ".br")),
                                   matvec(p.at(prefix + ".ur"), h)));
  const Tensor c = tanh_v(add_v(linear_forward(p.at(prefix + ".wc"), x, p.at(prefix + ".bc")),
                                matvec(p.at(prefix + ".uc"), mul_v(r, h))));
  Tensor out = Tensor::zeros(h.shape);
  for (size_t i = 0; i < out.size(); ++i)
    out.data[i] = (1.0 - z.data[i]) * h.data[i] + z.data[i] * c.data[i];
  return out;
}

Tensor passthrough_forward(const Params& p, const std::string& prefix, const Tensor& x) {
  return tanh_v(linear_forward(p.at(prefix + ".wc"), x, p.at(prefix + ".bc")));
}

Params make_gru_params(const std::string& prefix, size_t input_dim, size_t hidden_dim,
                       Rng& rng) {
  Params p;
  const double wscale = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double uscale = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for (const char* gate : {"z", "r", "c"}) {
    p.tensors[prefix + ".w" + gate] = Tensor::randn({hidden_dim, input_dim}, rng, wscale);
    p.tensors[prefix + ".u" + gate] = Tensor::randn({hidden_dim, hidden_dim}, rng, uscale);
    p.tensors[prefix + ".b" + gate] = Tensor::zeros({hidden_dim});
  }
  return p;
}

Tape::Ref Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Ref>(nodes_.size() - 1);
}

Tape::Ref Tape::constant(Tensor t) { return push({Op::Constant, {}, std::move(t), 0.0, {}}); }

Tape::Ref Tape::param(const std::string& name, const Tensor& value) {
  return push({Op::Param, {}, value, 0.0, name});
}

Tape::Ref Tape::linear(Ref w, Ref x, Ref b) {
  Tensor y = linear_forward(value(w), value(x), value(b));
  return push({Op::Linear, {w, x, b}, std::move(y), 0.0, {}});
}

Tape::Ref Tape::matvec_op(Ref w, Ref x) {
  Tensor y = matvec(value(w), value(x));
  return push({Op::MatVec, {w, x}, std::move(y), 0.0, {}});
}

Tape::Ref Tape::add(Ref a, Ref b) {
  return push({Op::Add, {a, b}, add_v(value(a), value(b)), 0.0, {}});
}

Tape::Ref Tape::sub(Ref a, Ref b) {
  Tensor y = value(a);
  const Tensor& vb = value(b);
  if (!y.same_shape(vb)) throw ShapeMismatch("sub: shape mismatch");
  for (size_t i = 0; i < y.size(); ++i) y.data[i] -= vb.data[i];
  return push({Op::Sub, {a, b}, std::move(y), 0.0, {}});
}

Tape::Ref Tape::mul(Ref a, Ref b) {
  return push({Op::Mul, {a, b}, mul_v(value(a), value(b)), 0.0, {}});
}

Tape::Ref Tape::scale(Ref a, double s) {
  Tensor y = value(a);
  for (double& d : y.data) d *= s;
  return push({Op::Scale, {a}, std::move(y), s, {}});
}

Tape::Ref Tape::tanh_op(Ref a) { return push({Op::Tanh, {a}, tanh_v(value(a)), 0.0, {}}); }

Tape::Ref Tape::sigmoid_op(Ref a) {
  return push({Op::Sigmoid, {a}, sigmoid_v(value(a)), 0.0, {}});
}

Tape::Ref Tape::concat(Ref a, Ref b) {
  return push({Op::Concat, {a, b}, concat_v(value(a), value(b)), 0.0, {}});
}

Tape::Ref Tape::sum_agg(const std::vector<Ref>& items) {
  if (items.empty()) throw ShapeMismatch("sum_agg: no inputs");
  Tensor y = value(items[0]);
  for (size_t i = 1; i < items.size(); ++i) {
    const Tensor& t = value(items[i]);
    if (!y.same_shape(t)) throw ShapeMismatch("sum_agg: shape mismatch");
    for (size_t j = 0; j < y.size(); ++j) y.data[j] += t.data[j];
  }
  return push({Op::SumAgg, items, std::move(y), 0.0, {}});
}

Tape::Ref Tape::sum(Ref a) {
  const Tensor& t = value(a);
  double acc = 0.0;
  for (double d : t.data) acc += d;
  return push({Op::Sum, {a}, Tensor::vec({acc}), 0.0, {}});
}

Tape::Ref Tape::pick(Ref v, size_t index) {
  const Tensor& t = value(v);
  if (index >= t.size()) throw ShapeMismatch("pick: index out of range");
  return push({Op::Pick, {v}, Tensor::vec({t.data[index]}), static_cast<double>(index), {}});
}

Tape::Ref Tape::mse(Ref pred, Ref target) {
  const Tensor& p = value(pred);
  const Tensor& t = value(target);
  if (!p.same_shape(t)) throw ShapeMismatch("mse: shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double d = p.data[i] - t.data[i];
    acc += d * d;
  }
  acc /= static_cast<double>(p.size());
  return push({Op::Mse, {pred, target}, Tensor::vec({acc}), 0.0, {}});
}

Tape::Ref Tape::one_minus(Ref a) {
  Tensor y = value(a);
  for (double& d : y.data) d = 1.0 - d;
  return push({Op::OneMinus, {a}, std::move(y), 0.0, {}});
}

const Tensor& Tape::value(Ref r) const {
  if (r < 0 || r >= static_cast<Ref>(nodes_.size()))
    throw NoForwardRecorded("Tape::value: bad node ref");
  return nodes_[static_cast<size_t>(r)].val;
}

GradRecord Tape::backward(Ref root) {
  if (nodes_.empty()) throw NoForwardRecorded("Tape::backward: empty tape");
  if (root < 0 || root >= static_cast<Ref>(nodes_.size()))
    throw NoForwardRecorded("Tape::backward: bad root");
  if (nodes_[static_cast<size_t>(root)].val.size() != 1)
    throw ShapeMismatch("Tape::backward: root must be scalar");

  std::vector<Tensor> grad(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) grad[i] = Tensor::zeros(nodes_[i].val.shape);
  grad[static_cast<size_t>(root)].data[0] = 1.0;

  for (Ref i = root; i >= 0; --i) {
    const Node& n = nodes_[static_cast<size_t>(i)];
    const Tensor& g = grad[static_cast<size_t>(i)];
    bool all_zero = true;
    for (double d : g.data)
      if (d != 0.0) { all_zero = false; break; }
    if (all_zero) continue;

    switch (n.op) {
      case Op::Constant:
      case Op::Param:
        break;
      case Op::Linear: {
        const Tensor& w = nodes_[n.inputs[0]].val;
        const Tensor& x = nodes_[n.inputs[1]].val;
        Tensor& gw = grad[n.inputs[0]];
        Tensor& gx = grad[n.inputs[1]];
        Tensor& gb = grad[n.inputs[2]];
        for (size_t r = 0; r < w.rows(); ++r) {
          const double gr = g.data[r];
          if (gr == 0.0) continue;
          gb.data[r] += gr;
          for (size_t c = 0; c < w.cols(); ++c) {
            gw.data[r * w.cols() + c] += gr * x.data[c];
            gx.data[c] += gr * w.data[r * w.cols() + c];
          }
        }
        break;
      }
      case Op::MatVec: {
        const Tensor& w = nodes_[n.inputs[0]].val;
        const Tensor& x = nodes_[n.inputs[1]].val;
        Tensor& gw = grad[n.inputs[0]];
        Tensor& gx = grad[n.inputs[1]];
        for (size_t r = 0; r < w.rows(); ++r) {
          const double gr = g.data[r];
          if (gr == 0.0) continue;
          for (size_t c = 0; c < w.cols(); ++c) {
            gw.data[r * w.cols() + c] += gr * x.data[c];
            gx.data[c] += gr * w.data[r * w.cols() + c];
          }
        }
        break;
      }
      case Op::Add:
        for (size_t j = 0; j < g.size(); ++j) {
          grad[n.inputs[0]].data[j] += g.data[j];
          grad[n.inputs[1]].data[j] += g.data[j];
        }
        break;
      case Op::Sub:
        for (size_t j = 0; j < g.size(); ++j) {
          grad[n.inputs[0]].data[j] += g.data[j];
          grad[n.inputs[1]].data[j] -= g.data[j];
        }
        break;
      case Op::Mul: {
        const Tensor& a = nodes_[n.inputs[0]].val;
        const Tensor& b = nodes_[n.inputs[1]].val;
        for (size_t j = 0; j < g.size(); ++j) {
          grad[n.inputs[0]].data[j] += g.data[j] * b.data[j];
          grad[n.inputs[1]].data[j] += g.data[j] * a.data[j];
        }
        break;
      }
      case Op::Scale:
        for (size_t j = 0; j < g.size(); ++j) grad[n.inputs[0]].data[j] += g.data[j] * n.scalar;
        break;
      case Op::Tanh:
        for (size_t j = 0; j < g.size(); ++j) {
          const double y = n.val.data[j];
          grad[n.inputs[0]].data[j] += g.data[j] * (1.0 - y * y);
        }
        break;
      case Op::Sigmoid:
        for (size_t j = 0; j < g.size(); ++j) {
          const double y = n.val.data[j];
          grad[n.inputs[0]].data[j] += g.data[j] * y * (1.0 - y);
        }
        break;
      case Op::Concat: {
        const size_t na = nodes_[n.inputs[0]].val.size();
        for (size_t j = 0; j < na; ++j) grad[n.inputs[0]].data[j] += g.data[j];
        for (size_t j = na; j < g.size(); ++j) grad[n.inputs[1]].data[j - na] += g.data[j];
        break;
      }
      case Op::SumAgg:
        for (Ref in : n.inputs)
          for (size_t j = 0; j < g.size(); ++j) grad[in].data[j] += g.data[j];
        break;
      case Op::Sum:
        for (size_t j = 0; j < nodes_[n.inputs[0]].val.size(); ++j)
          grad[n.inputs[0]].data[j] += g.data[0];
        break;
      case Op::Pick:
        grad[n.inputs[0]].data[static_cast<size_t>(n.scalar)] += g.data[0];
        break;
      case Op::Mse: {
        const Tensor& p = nodes_[n.inputs[0]].val;
        const Tensor& t = nodes_[n.inputs[1]].val;
        const double s = 2.0 * g.data[0] / static_cast<double>(p.size());
        for (size_t j = 0; j < p.size(); ++j) {
          const double d = s * (p.data[j] - t.data[j]);
          grad[n.inputs[0]].data[j] += d;
          grad[n.inputs[1]].data[j] -= d;
        }
        break;
      }
      case Op::OneMinus:
        for (size_t j = 0; j < g.size(); ++j) grad[n.inputs[0]].data[j] -= g.data[j];
        break;
    }
  }

  GradRecord rec;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.op != Op::Param) continue;
    auto it = rec.grads.find(n.pname);
    if (it == rec.grads.end()) {
      rec.grads[n.pname] = grad[i];
    } else {
      for (size_t j = 0; j < grad[i].size(); ++j) it->second.data[j] += grad[i].data[j];
    }
  }
  return rec;
}

void optimizer_step(Params& params, const GradRecord& grads, const OptimizerConfig& config,
                    OptimizerState& state) {
  state.t += 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  for (const auto& [name, g] : grads.grads) {
    Tensor& p = params.at(name);
    if (!p.same_shape(g)) throw ShapeMismatch("optimizer_step: grad shape mismatch for " + name);
    auto& m = state.m.try_emplace(name, Tensor::zeros(p.shape)).first->second;
    auto& v = state.v.try_emplace(name, Tensor::zeros(p.shape)).first->second;
    for (size_t i = 0; i < p.size(); ++i) {
      m.data[i] = config.beta1 * m.data[i] + (1.0 - config.beta1) * g.data[i];
      v.data[i] = config.beta2 * v.data[i] + (1.0 - config.beta2) * g.data[i] * g.data[i];
      const double mhat = m.data[i] / bc1;
      const double vhat = v.data[i] / bc2;
      p.data[i] -= config.lr * mhat / (std::sqrt(vhat) + config.eps);
    }
  }
}

}  // namespace satnet::nn
