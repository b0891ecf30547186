#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace argmine::nn {

using Matrix = Eigen::MatrixXd;

/// A node in the dynamically built computation graph. Values are dense
/// double matrices; scalars are 1x1.
class Node {
  public:
    Matrix value;
    Matrix grad;  // same shape as value, allocated lazily
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    // Propagates this node's grad into its parents' grads.
    std::function<void()> backward_fn;

    void ensure_grad() {
        if (grad.size() == 0) grad = Matrix::Zero(value.rows(), value.cols());
    }
};

using Var = std::shared_ptr<Node>;

Var constant(Matrix value);
Var parameter(Matrix value);  // leaf with requires_grad = true
Var scalar(double value);

// Reverse-mode sweep from a 1x1 loss node. Accumulates into the grads of all
// reachable requires_grad nodes; callers zero parameter grads between steps.
void backward(const Var& loss);

// --- elementwise / structural ops -----------------------------------------
Var add(const Var& a, const Var& b);                  // same shape
Var sub(const Var& a, const Var& b);
Var cmul(const Var& a, const Var& b);                 // Hadamard product
Var scale(const Var& a, double s);
Var add_rowwise(const Var& a, const Var& bias);       // bias is 1 x cols
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var relu(const Var& a);
Var sigmoid(const Var& a);
Var row(const Var& a, Eigen::Index i);                // 1 x cols view copy
Var mean_rows(const Var& a);                          // 1 x cols
Var concat_cols(const std::vector<Var>& parts);       // all 1 x n_i -> 1 x sum
Var softmax_rows(const Var& a);
Var layer_norm_rows(const Var& a, const Var& gain, const Var& bias, double eps = 1e-5);
Var gather_rows(const Var& table, const std::vector<int>& ids);
Var dropout_mask(const Var& a, const Matrix& keep_mask, double keep_prob);

// --- losses ----------------------------------------------------------------
Var mse_loss(const Var& prediction, const Matrix& target);          // mean over entries
Var cross_entropy_with_logits(const Var& logits, int target_index); // logits 1 x C
Var mean_scalars(const std::vector<Var>& scalars);
Var weighted_sum_scalars(const std::vector<Var>& scalars, const std::vector<double>& weights);

}  // namespace argmine::nn
