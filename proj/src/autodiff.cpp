#include "ridebench/autodiff.hpp"

#include <Eigen/Core>
#include <cmath>
#include <unordered_set>

#include "ridebench/errors.hpp"

namespace ridebench {

Tensor Tensor::zeros(std::vector<int> shape) {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

namespace autodiff {

namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;

CMapMat as_mat(const Tensor& t) { return CMapMat(t.v.data(), t.rows(), t.cols()); }
MapMat as_mat(Tensor& t) { return MapMat(t.v.data(), t.rows(), t.cols()); }

std::shared_ptr<Node> make_node(Tensor value, std::vector<Var> parents,
                                std::function<void(Node&)> backward_fn) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  for (const auto& p : parents) {
    n->requires_grad = n->requires_grad || p.requires_grad();
    n->parents.push_back(p.node());
  }
  if (n->requires_grad) n->backward_fn = std::move(backward_fn);
  return n;
}

void check_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.value().shape != b.value().shape) {
    throw ModelError(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

void Node::ensure_grad() {
  if (grad.v.empty()) grad = Tensor::zeros(value.shape);
}

Var Var::constant(Tensor t) {
  auto n = std::make_shared<Node>();
  n->value = std::move(t);
  return Var(std::move(n));
}

Var Var::parameter(Tensor t) {
  auto n = std::make_shared<Node>();
  n->value = std::move(t);
  n->requires_grad = true;
  n->ensure_grad();
  return Var(std::move(n));
}

Var matmul(const Var& a, const Var& b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.cols() != B.rows()) throw ModelError("matmul: inner dimension mismatch");
  Tensor out = Tensor::zeros({A.rows(), B.cols()});
  as_mat(out) = as_mat(A) * as_mat(B);
  return Var(make_node(std::move(out), {a, b}, [](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      as_mat(pa.grad) += as_mat(n.grad) * as_mat(pb.value).transpose();
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      as_mat(pb.grad) += as_mat(pa.value).transpose() * as_mat(n.grad);
    }
  }));
}

Var add(const Var& a, const Var& b) {
  check_same_shape(a, b, "add");
  Tensor out = a.value();
  for (int i = 0; i < out.size(); ++i) out.v[i] += b.value().v[i];
  return Var(make_node(std::move(out), {a, b}, [](Node& n) {
    for (int side = 0; side < 2; ++side) {
      Node& p = *n.parents[side];
      if (!p.requires_grad) continue;
      p.ensure_grad();
      for (int i = 0; i < n.grad.size(); ++i) p.grad.v[i] += n.grad.v[i];
    }
  }));
}

Var add_bias(const Var& a, const Var& bias) {
  const Tensor& A = a.value();
  const Tensor& B = bias.value();
  if (B.rows() != 1 || B.cols() != A.cols()) {
    throw ModelError("add_bias: bias must be [1, cols]");
  }
  Tensor out = A;
  for (int r = 0; r < A.rows(); ++r) {
    for (int c = 0; c < A.cols(); ++c) out.at(r, c) += B.v[c];
  }
  return Var(make_node(std::move(out), {a, bias}, [](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (int i = 0; i < n.grad.size(); ++i) pa.grad.v[i] += n.grad.v[i];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      const int cols = n.grad.cols();
      for (int r = 0; r < n.grad.rows(); ++r) {
        for (int c = 0; c < cols; ++c) pb.grad.v[c] += n.grad.at(r, c);
      }
    }
  }));
}

Var mul(const Var& a, const Var& b) {
  check_same_shape(a, b, "mul");
  Tensor out = a.value();
  for (int i = 0; i < out.size(); ++i) out.v[i] *= b.value().v[i];
  return Var(make_node(std::move(out), {a, b}, [](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (int i = 0; i < n.grad.size(); ++i) {
        pa.grad.v[i] += n.grad.v[i] * pb.value.v[i];
      }
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (int i = 0; i < n.grad.size(); ++i) {
        pb.grad.v[i] += n.grad.v[i] * pa.value.v[i];
      }
    }
  }));
}

Var relu(const Var& a) {
  Tensor out = a.value();
  for (double& x : out.v) x = x > 0 ? x : 0.0;
  return Var(make_node(std::move(out), {a}, [](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (int i = 0; i < n.grad.size(); ++i) {
      if (p.value.v[i] > 0) p.grad.v[i] += n.grad.v[i];
    }
  }));
}

Var sigmoid(const Var& a) {
  Tensor out = a.value();
  for (double& x : out.v) x = 1.0 / (1.0 + std::exp(-x));
  return Var(make_node(std::move(out), {a}, [](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (int i = 0; i < n.grad.size(); ++i) {
      const double s = n.value.v[i];
      p.grad.v[i] += n.grad.v[i] * s * (1.0 - s);
    }
  }));
}

Var tanh(const Var& a) {
  Tensor out = a.value();
  for (double& x : out.v) x = std::tanh(x);
  return Var(make_node(std::move(out), {a}, [](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (int i = 0; i < n.grad.size(); ++i) {
      const double t = n.value.v[i];
      p.grad.v[i] += n.grad.v[i] * (1.0 - t * t);
    }
  }));
}

Var concat_cols(const Var& a, const Var& b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.rows() != B.rows()) throw ModelError("concat_cols: row mismatch");
  Tensor out = Tensor::zeros({A.rows(), A.cols() + B.cols()});
  for (int r = 0; r < A.rows(); ++r) {
    for (int c = 0; c < A.cols(); ++c) out.at(r, c) = A.at(r, c);
    for (int c = 0; c < B.cols(); ++c) out.at(r, A.cols() + c) = B.at(r, c);
  }
  const int ca = A.cols();
  return Var(make_node(std::move(out), {a, b}, [ca](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    const int cb = n.grad.cols() - ca;
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (int r = 0; r < n.grad.rows(); ++r) {
        for (int c = 0; c < ca; ++c) pa.grad.at(r, c) += n.grad.at(r, c);
      }
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (int r = 0; r < n.grad.rows(); ++r) {
        for (int c = 0; c < cb; ++c) pb.grad.at(r, c) += n.grad.at(r, ca + c);
      }
    }
  }));
}

Var slice_cols(const Var& a, int begin, int len) {
  const Tensor& A = a.value();
  if (begin < 0 || begin + len > A.cols()) {
    throw ModelError("slice_cols: out of range");
  }
  Tensor out = Tensor::zeros({A.rows(), len});
  for (int r = 0; r < A.rows(); ++r) {
    for (int c = 0; c < len; ++c) out.at(r, c) = A.at(r, begin + c);
  }
  return Var(make_node(std::move(out), {a}, [begin](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (int r = 0; r < n.grad.rows(); ++r) {
      for (int c = 0; c < n.grad.cols(); ++c) {
        p.grad.at(r, begin + c) += n.grad.at(r, c);
      }
    }
  }));
}

Var slice_rows(const Var& a, int begin, int len) {
  const Tensor& A = a.value();
  if (begin < 0 || begin + len > A.rows()) {
    throw ModelError("slice_rows: out of range");
  }
  Tensor out = Tensor::zeros({len, A.cols()});
  for (int r = 0; r < len; ++r) {
    for (int c = 0; c < A.cols(); ++c) out.at(r, c) = A.at(begin + r, c);
  }
  return Var(make_node(std::move(out), {a}, [begin](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (int r = 0; r < n.grad.rows(); ++r) {
      for (int c = 0; c < n.grad.cols(); ++c) {
        p.grad.at(begin + r, c) += n.grad.at(r, c);
      }
    }
  }));
}

Var regroup_rows(const Var& a, int batch, int time) {
  const Tensor& A = a.value();
  if (A.rows() != batch * time) throw ModelError("regroup_rows: row mismatch");
  const int f = A.cols();
  Tensor out = Tensor::zeros({batch, time * f});
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < time; ++t) {
      for (int c = 0; c < f; ++c) {
        out.at(b, t * f + c) = A.at(b * time + t, c);
      }
    }
  }
  return Var(make_node(std::move(out), {a}, [batch, time, f](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (int b = 0; b < batch; ++b) {
      for (int t = 0; t < time; ++t) {
        for (int c = 0; c < f; ++c) {
          p.grad.at(b * time + t, c) += n.grad.at(b, t * f + c);
        }
      }
    }
  }));
}

Var mse_loss(const Var& pred, const Tensor& target) {
  const Tensor& P = pred.value();
  if (P.shape != target.shape) throw ModelError("mse_loss: shape mismatch");
  const int n = P.size();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = P.v[i] - target.v[i];
    acc += d * d;
  }
  Tensor out({1, 1}, {acc / n});
  Tensor tgt = target;
  return Var(make_node(std::move(out), {pred}, [tgt = std::move(tgt)](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    const double g = n.grad.v[0];
    const int sz = p.value.size();
    for (int i = 0; i < sz; ++i) {
      p.grad.v[i] += g * 2.0 * (p.value.v[i] - tgt.v[i]) / sz;
    }
  }));
}

void backward(const Var& loss) {
  if (loss.value().size() != 1) {
    throw ModelError("backward: loss must be scalar");
  }
  // Topological order by DFS.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      Node* parent = node->parents[idx].get();
      ++idx;
      if (parent->requires_grad && !visited.count(parent)) {
        visited.insert(parent);
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  loss.node()->ensure_grad();
  loss.node()->grad.v[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn && n->requires_grad) n->backward_fn(*n);
  }
}

void zero_grad(std::vector<Var>& params) {
  for (auto& p : params) {
    p.node()->ensure_grad();
    std::fill(p.grad().v.begin(), p.grad().v.end(), 0.0);
  }
}

}  // namespace autodiff
}  // namespace ridebench
