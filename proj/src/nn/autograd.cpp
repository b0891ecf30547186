#include "argmine/nn/autograd.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace argmine::nn {

namespace {

Var make_node(Matrix value, std::vector<Var> parents, std::function<void()> backward_fn) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    bool needs = false;
    for (const auto& p : parents) needs = needs || p->requires_grad;
    node->requires_grad = needs;
    if (needs) {
        node->parents = std::move(parents);
        node->backward_fn = std::move(backward_fn);
    }
    return node;
}

void check_same_shape(const Var& a, const Var& b, const char* op) {
    if (a->value.rows() != b->value.rows() || a->value.cols() != b->value.cols()) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
    }
}

}  // namespace

Var constant(Matrix value) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    return node;
}

Var parameter(Matrix value) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    node->requires_grad = true;
    return node;
}

Var scalar(double value) {
    return constant(Matrix::Constant(1, 1, value));
}

void backward(const Var& loss) {
    if (loss->value.rows() != 1 || loss->value.cols() != 1) {
        throw std::invalid_argument("backward: loss must be a 1x1 scalar");
    }
    // Topological order by DFS, then reverse sweep.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack{{loss.get(), 0}};
    visited.insert(loss.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* parent = node->parents[next++].get();
            if (parent->requires_grad && visited.insert(parent).second) {
                stack.emplace_back(parent, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    loss->ensure_grad();
    loss->grad(0, 0) += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if ((*it)->backward_fn) (*it)->backward_fn();
    }
}

Var add(const Var& a, const Var& b) {
    check_same_shape(a, b, "add");
    auto out = make_node(a->value + b->value, {a, b}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [a, b, o] {
            if (a->requires_grad) { a->ensure_grad(); a->grad += o->grad; }
            if (b->requires_grad) { b->ensure_grad(); b->grad += o->grad; }
        };
    }
    return out;
}

Var sub(const Var& a, const Var& b) {
    check_same_shape(a, b, "sub");
    auto out = make_node(a->value - b->value, {a, b}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [a, b, o] {
            if (a->requires_grad) { a->ensure_grad(); a->grad += o->grad; }
            if (b->requires_grad) { b->ensure_grad(); b->grad -= o->grad; }
        };
    }
    return out;
}

Var cmul(const Var& a, const Var& b) {
    check_same_shape(a, b, "cmul");
    auto out = make_node(a->value.cwiseProduct(b->value), {a, b}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [a, b, o] {
            if (a->requires_grad) { a->ensure_grad(); a->grad += o->grad.cwiseProduct(b->value); }
            if (b->requires_grad) { b->ensure_grad(); b->grad += o->grad.cwiseProduct(a->value); }
        };
    }
    return out;
}

Var scale(const Var& a, double s) {
    auto out = make_node(a->value * s, {a}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [a, s, o] {
            a->ensure_grad();
            a->grad += o->grad * s;
        };
    }
    return out;
}

Var add_rowwise(const Var& a, const Var& bias) {
    if (bias->value.rows() != 1 || bias->value.cols() != a->value.cols()) {
        throw std::invalid_argument("add_rowwise: bias must be 1 x cols");
    }
    Matrix v = a->value;
    v.rowwise() += bias->value.row(0);
    auto out = make_node(std::move(v), {a, bias}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [a, bias, o] {
            if (a->requires_grad) { a->ensure_grad(); a->grad += o->grad; }
            if (bias->requires_grad) {
                bias->ensure_grad();
                bias->grad.row(0) += o->grad.colwise().sum();
            }
        };
    }
    return out;
}

Var matmul(const Var& a, const Var& b) {
    if (a->value.cols() != b->value.rows()) {
        throw std::invalid_argument("matmul: inner dimensions do not match");
    }
    auto out = make_node(a->value * b->value, {a, b}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [a, b, o] {
            if (a->requires_grad) { a->ensure_grad(); a->grad += o->grad * b->value.transpose(); }
            if (b->requires_grad) { b->ensure_grad(); b->grad += a->value.transpose() * o->grad; }
        };
    }
    return out;
}

Var transpose(const Var& a) {
    auto out = make_node(a->value.transpose(), {a}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [a, o] {
            a->ensure_grad();
            a->grad += o->grad.transpose();
        };
    }
    return out;
}

Var relu(const Var& a) {
    auto out = make_node(a->value.cwiseMax(0.0), {a}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [a, o] {
            a->ensure_grad();
            a->grad += o->grad.cwiseProduct(
                (a->value.array() > 0.0).cast<double>().matrix());
        };
    }
    return out;
}

Var sigmoid(const Var& a) {
    Matrix v = a->value.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    auto out = make_node(std::move(v), {a}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [a, o] {
            a->ensure_grad();
            a->grad += o->grad.cwiseProduct(
                o->value.cwiseProduct((Matrix::Ones(o->value.rows(), o->value.cols()) - o->value)));
        };
    }
    return out;
}

Var row(const Var& a, Eigen::Index i) {
    if (i < 0 || i >= a->value.rows()) throw std::out_of_range("row: index out of range");
    auto out = make_node(a->value.row(i), {a}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [a, i, o] {
            a->ensure_grad();
            a->grad.row(i) += o->grad.row(0);
        };
    }
    return out;
}

Var mean_rows(const Var& a) {
    const double n = static_cast<double>(a->value.rows());
    auto out = make_node(a->value.colwise().mean(), {a}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [a, n, o] {
            a->ensure_grad();
            a->grad += (Matrix::Ones(a->value.rows(), 1) * o->grad.row(0)) / n;
        };
    }
    return out;
}

Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: no parts");
    Eigen::Index cols = 0;
    for (const auto& p : parts) {
        if (p->value.rows() != 1) throw std::invalid_argument("concat_cols: parts must be 1 x n");
        cols += p->value.cols();
    }
    Matrix v(1, cols);
    Eigen::Index offset = 0;
    for (const auto& p : parts) {
        v.block(0, offset, 1, p->value.cols()) = p->value;
        offset += p->value.cols();
    }
    auto out = make_node(std::move(v), parts, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        std::vector<Var> held = parts;
        out->backward_fn = [held, o] {
            Eigen::Index off = 0;
            for (const auto& p : held) {
                if (p->requires_grad) {
                    p->ensure_grad();
                    p->grad += o->grad.block(0, off, 1, p->value.cols());
                }
                off += p->value.cols();
            }
        };
    }
    return out;
}

Var softmax_rows(const Var& a) {
    Matrix v = a->value;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        const double m = v.row(r).maxCoeff();
        v.row(r) = (v.row(r).array() - m).exp();
        v.row(r) /= v.row(r).sum();
    }
    auto out = make_node(std::move(v), {a}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [a, o] {
            a->ensure_grad();
            for (Eigen::Index r = 0; r < o->value.rows(); ++r) {
                const auto y = o->value.row(r).array();
                const auto dy = o->grad.row(r).array();
                const double dot = (dy * y).sum();
                a->grad.row(r) += ((dy - dot) * y).matrix();
            }
        };
    }
    return out;
}

Var layer_norm_rows(const Var& a, const Var& gain, const Var& bias, double eps) {
    const Eigen::Index h = a->value.cols();
    if (gain->value.cols() != h || bias->value.cols() != h ||
        gain->value.rows() != 1 || bias->value.rows() != 1) {
        throw std::invalid_argument("layer_norm_rows: gain/bias must be 1 x cols");
    }
    Matrix normalized(a->value.rows(), h);
    Matrix inv_sigma(a->value.rows(), 1);
    for (Eigen::Index r = 0; r < a->value.rows(); ++r) {
        const double mu = a->value.row(r).mean();
        const double var = (a->value.row(r).array() - mu).square().mean();
        const double is = 1.0 / std::sqrt(var + eps);
        inv_sigma(r, 0) = is;
        normalized.row(r) = (a->value.row(r).array() - mu).matrix() * is;
    }
    Matrix v = normalized;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        v.row(r) = v.row(r).cwiseProduct(gain->value.row(0)) + bias->value.row(0);
    }
    auto out = make_node(std::move(v), {a, gain, bias}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [a, gain, bias, normalized, inv_sigma, o] {
            const Eigen::Index hh = a->value.cols();
            for (Eigen::Index r = 0; r < a->value.rows(); ++r) {
                const auto dy = o->grad.row(r).array();
                const auto xhat = normalized.row(r).array();
                const auto d = dy * gain->value.row(0).array();
                if (a->requires_grad) {
                    a->ensure_grad();
                    const double mean_d = d.mean();
                    const double mean_dx = (d * xhat).mean();
                    a->grad.row(r) +=
                        ((d - mean_d - xhat * mean_dx) * inv_sigma(r, 0)).matrix();
                }
                if (gain->requires_grad) {
                    gain->ensure_grad();
                    gain->grad.row(0) += (dy * xhat).matrix();
                }
                if (bias->requires_grad) {
                    bias->ensure_grad();
                    bias->grad.row(0) += dy.matrix();
                }
                (void)hh;
            }
        };
    }
    return out;
}

Var gather_rows(const Var& table, const std::vector<int>& ids) {
    if (ids.empty()) throw std::invalid_argument("gather_rows: empty id list");
    Matrix v(static_cast<Eigen::Index>(ids.size()), table->value.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= table->value.rows()) {
            throw std::out_of_range("gather_rows: id out of range");
        }
        v.row(static_cast<Eigen::Index>(i)) = table->value.row(ids[i]);
    }
    auto out = make_node(std::move(v), {table}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [table, ids, o] {
            table->ensure_grad();
            for (std::size_t i = 0; i < ids.size(); ++i) {
                table->grad.row(ids[i]) += o->grad.row(static_cast<Eigen::Index>(i));
            }
        };
    }
    return out;
}

Var dropout_mask(const Var& a, const Matrix& keep_mask, double keep_prob) {
    if (keep_prob <= 0.0 || keep_prob > 1.0) {
        throw std::invalid_argument("dropout: keep probability must be in (0, 1]");
    }
    return cmul(a, constant(keep_mask / keep_prob));
}

Var mse_loss(const Var& prediction, const Matrix& target) {
    if (prediction->value.rows() != target.rows() || prediction->value.cols() != target.cols()) {
        throw std::invalid_argument("mse_loss: shape mismatch");
    }
    const double n = static_cast<double>(target.size());
    const Matrix diff = prediction->value - target;
    auto out = make_node(Matrix::Constant(1, 1, diff.squaredNorm() / n), {prediction}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [prediction, diff, n, o] {
            prediction->ensure_grad();
            prediction->grad += (2.0 / n) * o->grad(0, 0) * diff;
        };
    }
    return out;
}

Var cross_entropy_with_logits(const Var& logits, int target_index) {
    if (logits->value.rows() != 1) {
        throw std::invalid_argument("cross_entropy_with_logits: logits must be 1 x C");
    }
    const Eigen::Index c = logits->value.cols();
    if (target_index < 0 || target_index >= c) {
        throw std::out_of_range("cross_entropy_with_logits: target out of range");
    }
    const double m = logits->value.row(0).maxCoeff();
    const Eigen::ArrayXd shifted = logits->value.row(0).transpose().array() - m;
    const double log_z = std::log(shifted.exp().sum());
    const double loss = log_z - shifted(target_index);
    Eigen::ArrayXd probs = (shifted - log_z).exp();
    auto out = make_node(Matrix::Constant(1, 1, loss), {logits}, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        out->backward_fn = [logits, probs, target_index, o] {
            logits->ensure_grad();
            Eigen::RowVectorXd g = probs.matrix().transpose();
            g(target_index) -= 1.0;
            logits->grad.row(0) += o->grad(0, 0) * g;
        };
    }
    return out;
}

Var mean_scalars(const std::vector<Var>& scalars) {
    std::vector<double> weights(scalars.size(), 1.0);
    return weighted_sum_scalars(scalars, weights);
}

Var weighted_sum_scalars(const std::vector<Var>& scalars, const std::vector<double>& weights) {
    if (scalars.empty() || scalars.size() != weights.size()) {
        throw std::invalid_argument("weighted_sum_scalars: bad inputs");
    }
    double total_weight = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("weights must be >= 0");
        total_weight += w;
    }
    if (total_weight == 0.0) throw std::invalid_argument("weights sum to zero");
    double value = 0.0;
    for (std::size_t i = 0; i < scalars.size(); ++i) {
        if (scalars[i]->value.size() != 1) {
            throw std::invalid_argument("weighted_sum_scalars: non-scalar input");
        }
        value += weights[i] / total_weight * scalars[i]->value(0, 0);
    }
    auto out = make_node(Matrix::Constant(1, 1, value), scalars, nullptr);
    if (out->requires_grad) {
        Node* o = out.get();
        std::vector<Var> held = scalars;
        std::vector<double> norm(weights);
        for (double& w : norm) w /= total_weight;
        out->backward_fn = [held, norm, o] {
            for (std::size_t i = 0; i < held.size(); ++i) {
                if (held[i]->requires_grad) {
                    held[i]->ensure_grad();
                    held[i]->grad(0, 0) += norm[i] * o->grad(0, 0);
                }
            }
        };
    }
    return out;
}

}  // namespace argmine::nn
