#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "cos/common.hpp"

namespace cos {

using Shape = std::vector<std::size_t>;

/// Dense double-precision tensor. Values are row-major; grad is allocated
/// (zero-filled) whenever the tensor participates in differentiation.
/// Tensors are immutable after forward construction except for their grad
/// accumulator.
class Tensor {
public:
    Shape shape;
    std::vector<double> data;
    bool requires_grad = false;
    std::vector<double> grad;  // same length as data when requires_grad

    Tensor() = default;
    Tensor(Shape s, std::vector<double> d, bool rg);

    std::size_t size() const { return data.size(); }
    std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
    std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
    bool is_scalar() const { return data.size() == 1; }
    double value() const;  // scalar accessor; throws ContractError otherwise

    void zero_grad();
    void ensure_grad();
};

using TensorPtr = std::shared_ptr<Tensor>;

std::string shape_str(const Shape& s);
std::size_t shape_numel(const Shape& s);

// Leaf constructors. `param` marks the tensor as differentiable.
TensorPtr constant(Shape shape, std::vector<double> data);
TensorPtr constant(std::vector<double> data);  // 1-D
TensorPtr zeros(Shape shape, bool requires_grad = false);
TensorPtr param(Shape shape, std::vector<double> data);
TensorPtr scalar(double v, bool requires_grad = false);

/// Records forward operations in construction order so adjoints can be
/// replayed in exact reverse topological order. A tape admits at most one
/// backward pass per forward construction; reset() clears it for reuse.
/// Tensors built while the tape is disabled (or with no differentiable
/// inputs) contribute no entries.
class Tape {
public:
    explicit Tape(bool enabled = true) : enabled_(enabled) {}

    bool enabled() const { return enabled_; }
    void set_enabled(bool e) { enabled_ = e; }
    std::size_t size() const { return entries_.size(); }

    void record(std::function<void()> adjoint) { entries_.push_back(std::move(adjoint)); }

    /// Seeds d(loss)/d(loss) = 1 and replays adjoints in reverse order.
    /// Leaf grads accumulate additively across backward passes of separate
    /// tapes; a second backward on the same tape is a contract error.
    void backward(const TensorPtr& loss);

    void reset() {
        entries_.clear();
        consumed_ = false;
    }

private:
    std::vector<std::function<void()>> entries_;
    bool enabled_ = true;
    bool consumed_ = false;
};

// ---- differentiable operations -------------------------------------------

// matrix product [m x k] * [k x n]; adjoints dA = G B^T, dB = A^T G
TensorPtr matmul(Tape& t, const TensorPtr& a, const TensorPtr& b);
// matrix-vector product [m x n] * [n]
TensorPtr matvec(Tape& t, const TensorPtr& a, const TensorPtr& x);
// x[k] * W[k x n] + b[n]; the workhorse of every MLP layer
TensorPtr affine(Tape& t, const TensorPtr& x, const TensorPtr& w, const TensorPtr& b);
TensorPtr transpose(Tape& t, const TensorPtr& a);

// binary elementwise; equal shapes, or one side scalar
TensorPtr add(Tape& t, const TensorPtr& a, const TensorPtr& b);
TensorPtr sub(Tape& t, const TensorPtr& a, const TensorPtr& b);
TensorPtr mul(Tape& t, const TensorPtr& a, const TensorPtr& b);
TensorPtr div(Tape& t, const TensorPtr& a, const TensorPtr& b);

// unary elementwise
TensorPtr tanh(Tape& t, const TensorPtr& a);
TensorPtr relu(Tape& t, const TensorPtr& a);
TensorPtr sigmoid(Tape& t, const TensorPtr& a);
TensorPtr exp(Tape& t, const TensorPtr& a);
TensorPtr log(Tape& t, const TensorPtr& a);  // domain error on non-positive input
TensorPtr square(Tape& t, const TensorPtr& a);
TensorPtr scale(Tape& t, const TensorPtr& a, double c);
TensorPtr clamp(Tape& t, const TensorPtr& a, double lo, double hi);
// numerically safe arcosh: argument clamped to >= 1
TensorPtr arcosh(Tape& t, const TensorPtr& a);

enum class Opcode { Add, Sub, Mul, Tanh, Relu, Sigmoid, Exp, Log, Square };
TensorPtr elementwise(Tape& t, Opcode op, const TensorPtr& a, const TensorPtr& b = nullptr);

// stable softmax over a 1-D tensor; outputs sum to one
TensorPtr softmax(Tape& t, const TensorPtr& a, double temperature = 1.0);
// row-wise softmax of a square score matrix where column > row is masked out
TensorPtr causal_row_softmax(Tape& t, const TensorPtr& scores);

// forward identity, zero adjoint
TensorPtr stop_gradient(Tape& t, const TensorPtr& a);
// forward equals e_j bitwise; the output adjoint is copied to z_e unchanged
// and e_j receives none (the z_e + sg(e_j - z_e) trick, made exact)
TensorPtr straight_through(Tape& t, const TensorPtr& z_e, const TensorPtr& e_j);

// reductions
TensorPtr sum(Tape& t, const TensorPtr& a);
TensorPtr mean(Tape& t, const TensorPtr& a);

// structure
TensorPtr reshape(Tape& t, const TensorPtr& a, Shape shape);
TensorPtr concat(Tape& t, const std::vector<TensorPtr>& parts);  // 1-D
TensorPtr slice(Tape& t, const TensorPtr& a, std::size_t offset, std::size_t len);  // 1-D
TensorPtr row(Tape& t, const TensorPtr& a, std::size_t i);  // row of [m x n] as [n]
// X[m x n] + broadcast of b[n] over rows (the one sanctioned broadcast
// beyond scalar-with-tensor, spelled out as its own op)
TensorPtr add_rowwise(Tape& t, const TensorPtr& x, const TensorPtr& b);

// convenience compositions
TensorPtr dot(Tape& t, const TensorPtr& a, const TensorPtr& b);
TensorPtr sum_sq(Tape& t, const TensorPtr& a);               // ||a||^2
TensorPtr mse(Tape& t, const TensorPtr& a, const TensorPtr& b);  // mean squared error

// ---- optimizer -------------------------------------------------------------

enum class AdamVariant { Adam, AdamW };

/// Moment accumulators for one parameter group. Step counter is shared by
/// the group and increases strictly.
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;  // used by the AdamW variant
    AdamVariant variant = AdamVariant::Adam;
    std::int64_t step = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;

    void init(const std::vector<TensorPtr>& params);
};

/// Bias-corrected Adam/AdamW update from each parameter's grad accumulator.
void adam_step(const std::vector<TensorPtr>& params, AdamState& state);

/// Global L2-norm gradient clipping over a parameter group; returns the
/// pre-clip norm.
double clip_grad_norm(const std::vector<TensorPtr>& params, double max_norm);

void zero_grads(const std::vector<TensorPtr>& params);
bool grads_finite(const std::vector<TensorPtr>& params);

// ---- finite differences -----------------------------------------------------

/// Max over coordinates of |g_analytic - g_fd| / max(1, |g_fd|) where g_fd
/// is the central difference of f at x. f must rebuild its forward pass on
/// the supplied tape each call.
double finite_diff_check(const std::function<TensorPtr(Tape&, const TensorPtr&)>& f,
                         const TensorPtr& x, double eps = 1e-6);

}  // namespace cos
