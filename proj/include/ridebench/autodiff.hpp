#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace ridebench {

// Dense row-major tensor. Rank 2 everywhere in practice ([rows x cols]);
// the gradient buffer lives on the graph node, not here.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> v;

  Tensor() = default;
  Tensor(std::vector<int> s, std::vector<double> values)
      : shape(std::move(s)), v(std::move(values)) {}
  static Tensor zeros(std::vector<int> shape);

  int size() const { return static_cast<int>(v.size()); }
  int rows() const { return shape[0]; }
  int cols() const { return shape[1]; }
  double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols() + c]; }
  double at(int r, int c) const {
    return v[static_cast<std::size_t>(r) * cols() + c];
  }
};

namespace autodiff {

struct Node {
  Tensor value;
  Tensor grad;  // allocated on first use; same shape as value
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Propagates this node's grad into its parents' grads.
  std::function<void(Node&)> backward_fn;

  void ensure_grad();
};

// Handle to a graph node. Graphs are built define-by-run; intermediate
// nodes are freed when the loss handle goes out of scope, while parameter
// nodes are long-lived and accumulate gradients across backward passes
// until zero_grad.
class Var {
public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  static Var constant(Tensor t);
  static Var parameter(Tensor t);

  bool defined() const { return node_ != nullptr; }
  Tensor& value() { return node_->value; }
  const Tensor& value() const { return node_->value; }
  Tensor& grad() { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }
  const std::shared_ptr<Node>& node() const { return node_; }

private:
  std::shared_ptr<Node> node_;
};

Var matmul(const Var& a, const Var& b);           // [m,k] @ [k,n]
Var add(const Var& a, const Var& b);              // same shape
Var add_bias(const Var& a, const Var& bias);      // [m,n] + [1,n] broadcast
Var mul(const Var& a, const Var& b);              // elementwise
Var relu(const Var& a);
Var sigmoid(const Var& a);
Var tanh(const Var& a);
Var concat_cols(const Var& a, const Var& b);
Var slice_cols(const Var& a, int begin, int len);
Var slice_rows(const Var& a, int begin, int len);
// [(B*T), F] -> [B, T*F]; row b*T+t maps to columns [t*F, (t+1)*F) of row b.
Var regroup_rows(const Var& a, int batch, int time);
// Mean over batch and output dims of squared error; scalar [1,1].
Var mse_loss(const Var& pred, const Tensor& target);

// Reverse pass from a scalar loss; accumulates into every reachable
// parameter's grad.
void backward(const Var& loss);

void zero_grad(std::vector<Var>& params);

}  // namespace autodiff
}  // namespace ridebench
