#pragma once

#include <functional>
#include <string>
#include <vector>

#include "detnet/mat.hpp"

namespace detnet {

// How a tensor is filled by parameter initialization.
enum class InitKind { FanIn, Zero, One, Embedding };

// A named learnable tensor with a persistent gradient buffer.
struct Tensor {
  std::string name;
  Mat value;
  Mat grad;
  InitKind init = InitKind::FanIn;

  Tensor() = default;
  Tensor(std::string n, int rows, int cols, InitKind kind = InitKind::FanIn)
      : name(std::move(n)), value(rows, cols), grad(rows, cols), init(kind) {}

  void zero_grad() { grad.fill(0.0); }
};

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode tape over matrix operations. Build a graph with the op
// methods, then call backward() on a 1x1 loss; gradients accumulate into the
// grad buffers of the Tensors referenced by param()/embed() leaves.
class Tape {
 public:
  // Leaves.
  Var input(Mat value);                                  // constant
  Var param(Tensor& t);                                  // learnable
  Var embed(Tensor& table, std::vector<int> column_ids); // gather columns

  // Linear algebra.
  Var matmul(Var a, Var b);     // A * B
  Var matmul_tn(Var a, Var b);  // A^T * B
  Var matmul_nt(Var a, Var b);  // A * B^T

  // Elementwise, same shape.
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);

  // Elementwise unary.
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var one_minus(Var a);  // 1 - a
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var relu(Var a);
  Var sqrt(Var a);
  Var softplus(Var a);  // log(1 + e^x)

  // Broadcast a column vector (rows x 1) across all columns of a.
  Var add_col(Var a, Var b);
  Var sub_col(Var a, Var b);
  Var mul_col(Var a, Var b);
  Var div_col(Var a, Var b);
  // Broadcast a row vector (1 x cols) across all rows of a.
  Var sub_row(Var a, Var b);
  Var div_row(Var a, Var b);

  // Reductions.
  Var row_mean(Var a);  // rows x 1
  Var col_mean(Var a);  // 1 x cols
  Var col_sum(Var a);   // 1 x cols
  Var sum_all(Var a);   // 1 x 1

  // Shape.
  Var transpose(Var a);
  Var vconcat(const std::vector<Var>& parts);  // stack rows
  Var hconcat(const std::vector<Var>& parts);  // stack columns
  Var slice_rows(Var a, int row0, int count);
  Var slice_cols(Var a, int col0, int count);

  // Softmax over each row (max-shifted for stability).
  Var softmax_rows(Var a);

  const Mat& value(Var v) const { return nodes_[v.id].val; }
  const Mat& grad(Var v) const { return nodes_[v.id].grad; }
  size_t node_count() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 and propagates to all leaves. loss must be 1x1.
  void backward(Var loss);

 private:
  struct Node {
    Mat val;
    Mat grad;  // allocated on first contribution
    std::function<void(Tape&, int)> back;
    bool needs_grad = false;
  };

  int push(Mat val, bool needs_grad, std::function<void(Tape&, int)> back);
  bool wants(Var v) const { return nodes_[v.id].needs_grad; }
  Mat& grad_buf(int id);
  bool has_grad(int id) const { return !nodes_[id].grad.empty(); }

  std::vector<Node> nodes_;
};

}  // namespace detnet
