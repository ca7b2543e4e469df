#include "cos/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cos {

std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << 'x';
        os << s[i];
    }
    os << ']';
    return os.str();
}

std::size_t shape_numel(const Shape& s) {
    std::size_t n = 1;
    for (auto d : s) n *= d;
    return n;
}

Tensor::Tensor(Shape s, std::vector<double> d, bool rg)
    : shape(std::move(s)), data(std::move(d)), requires_grad(rg) {
    if (shape_numel(shape) != data.size())
        throw DimensionError("tensor data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_str(shape));
    if (requires_grad) grad.assign(data.size(), 0.0);
}

double Tensor::value() const {
    if (!is_scalar()) throw ContractError("value() on non-scalar tensor " + shape_str(shape));
    return data[0];
}

void Tensor::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

void Tensor::ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
}

TensorPtr constant(Shape shape, std::vector<double> data) {
    return std::make_shared<Tensor>(std::move(shape), std::move(data), false);
}

TensorPtr constant(std::vector<double> data) {
    Shape s{data.size()};
    return std::make_shared<Tensor>(std::move(s), std::move(data), false);
}

TensorPtr zeros(Shape shape, bool requires_grad) {
    std::vector<double> d(shape_numel(shape), 0.0);
    return std::make_shared<Tensor>(std::move(shape), std::move(d), requires_grad);
}

TensorPtr param(Shape shape, std::vector<double> data) {
    return std::make_shared<Tensor>(std::move(shape), std::move(data), true);
}

TensorPtr scalar(double v, bool requires_grad) {
    return std::make_shared<Tensor>(Shape{1}, std::vector<double>{v}, requires_grad);
}

void Tape::backward(const TensorPtr& loss) {
    if (!loss->is_scalar())
        throw ContractError("backward requires a scalar loss, got " + shape_str(loss->shape));
    if (consumed_) throw ContractError("tape already consumed by a backward pass");
    consumed_ = true;
    loss->ensure_grad();
    loss->grad[0] += 1.0;
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) (*it)();
}

namespace {

// Output node of an op: requires_grad iff any input does.
TensorPtr make_out(Shape shape, std::vector<double> data, bool rg) {
    return std::make_shared<Tensor>(std::move(shape), std::move(data), rg);
}

bool any_rg(const TensorPtr& a) { return a->requires_grad; }
bool any_rg(const TensorPtr& a, const TensorPtr& b) {
    return a->requires_grad || b->requires_grad;
}

void check_same_shape(const TensorPtr& a, const TensorPtr& b, const char* op) {
    if (a->shape != b->shape)
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a->shape) +
                             " vs " + shape_str(b->shape));
}

}  // namespace

TensorPtr matmul(Tape& t, const TensorPtr& a, const TensorPtr& b) {
    if (a->shape.size() != 2 || b->shape.size() != 2)
        throw DimensionError("matmul expects 2-D operands, got " + shape_str(a->shape) + " and " +
                             shape_str(b->shape));
    const std::size_t m = a->shape[0], k = a->shape[1], k2 = b->shape[0], n = b->shape[1];
    if (k != k2)
        throw DimensionError("matmul: inner dimensions disagree, " + shape_str(a->shape) + " x " +
                             shape_str(b->shape));
    std::vector<double> out(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a->data.data() + i * k;
        double* orow = out.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = b->data.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
    auto o = make_out({m, n}, std::move(out), any_rg(a, b));
    if (t.enabled() && o->requires_grad) {
        t.record([a, b, o, m, k, n] {
            if (a->requires_grad) {  // dA += G * B^T
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t p = 0; p < k; ++p) {
                        double acc = 0.0;
                        const double* grow = o->grad.data() + i * n;
                        const double* brow = b->data.data() + p * n;
                        for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
                        a->grad[i * k + p] += acc;
                    }
            }
            if (b->requires_grad) {  // dB += A^T * G
                for (std::size_t i = 0; i < m; ++i) {
                    const double* arow = a->data.data() + i * k;
                    const double* grow = o->grad.data() + i * n;
                    for (std::size_t p = 0; p < k; ++p) {
                        const double av = arow[p];
                        double* brow = b->grad.data() + p * n;
                        for (std::size_t j = 0; j < n; ++j) brow[j] += av * grow[j];
                    }
                }
            }
        });
    }
    return o;
}

TensorPtr matvec(Tape& t, const TensorPtr& a, const TensorPtr& x) {
    if (a->shape.size() != 2 || x->shape.size() != 1)
        throw DimensionError("matvec expects [m x n] and [n], got " + shape_str(a->shape) +
                             " and " + shape_str(x->shape));
    const std::size_t m = a->shape[0], n = a->shape[1];
    if (n != x->shape[0])
        throw DimensionError("matvec: dimensions disagree, " + shape_str(a->shape) + " x " +
                             shape_str(x->shape));
    std::vector<double> out(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a->data.data() + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += arow[j] * x->data[j];
        out[i] = acc;
    }
    auto o = make_out({m}, std::move(out), any_rg(a, x));
    if (t.enabled() && o->requires_grad) {
        t.record([a, x, o, m, n] {
            for (std::size_t i = 0; i < m; ++i) {
                const double g = o->grad[i];
                if (g == 0.0) continue;
                if (a->requires_grad) {
                    double* arow = a->grad.data() + i * n;
                    for (std::size_t j = 0; j < n; ++j) arow[j] += g * x->data[j];
                }
                if (x->requires_grad) {
                    const double* arow = a->data.data() + i * n;
                    for (std::size_t j = 0; j < n; ++j) x->grad[j] += g * arow[j];
                }
            }
        });
    }
    return o;
}

TensorPtr affine(Tape& t, const TensorPtr& x, const TensorPtr& w, const TensorPtr& b) {
    if (x->shape.size() != 1 || w->shape.size() != 2 || b->shape.size() != 1)
        throw DimensionError("affine expects x[k], W[k x n], b[n]");
    const std::size_t k = x->shape[0], n = w->shape[1];
    if (w->shape[0] != k || b->shape[0] != n)
        throw DimensionError("affine: x" + shape_str(x->shape) + " W" + shape_str(w->shape) +
                             " b" + shape_str(b->shape) + " do not compose");
    std::vector<double> out(b->data);
    for (std::size_t i = 0; i < k; ++i) {
        const double xv = x->data[i];
        if (xv == 0.0) continue;
        const double* wrow = w->data.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) out[j] += xv * wrow[j];
    }
    auto o = make_out({n}, std::move(out),
                      x->requires_grad || w->requires_grad || b->requires_grad);
    if (t.enabled() && o->requires_grad) {
        t.record([x, w, b, o, k, n] {
            const double* g = o->grad.data();
            if (b->requires_grad)
                for (std::size_t j = 0; j < n; ++j) b->grad[j] += g[j];
            if (w->requires_grad) {
                for (std::size_t i = 0; i < k; ++i) {
                    const double xv = x->data[i];
                    if (xv == 0.0) continue;
                    double* wrow = w->grad.data() + i * n;
                    for (std::size_t j = 0; j < n; ++j) wrow[j] += xv * g[j];
                }
            }
            if (x->requires_grad) {
                for (std::size_t i = 0; i < k; ++i) {
                    const double* wrow = w->data.data() + i * n;
                    double acc = 0.0;
                    for (std::size_t j = 0; j < n; ++j) acc += wrow[j] * g[j];
                    x->grad[i] += acc;
                }
            }
        });
    }
    return o;
}

TensorPtr transpose(Tape& t, const TensorPtr& a) {
    if (a->shape.size() != 2) throw DimensionError("transpose expects a 2-D tensor");
    const std::size_t m = a->shape[0], n = a->shape[1];
    std::vector<double> out(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a->data[i * n + j];
    auto o = make_out({n, m}, std::move(out), any_rg(a));
    if (t.enabled() && o->requires_grad) {
        t.record([a, o, m, n] {
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) a->grad[i * n + j] += o->grad[j * m + i];
        });
    }
    return o;
}

namespace {

enum class BinKind { Add, Sub, Mul, Div };

// same-shape or scalar-with-tensor; no other broadcasting
TensorPtr binary_op(Tape& t, BinKind kind, const TensorPtr& a, const TensorPtr& b,
                    const char* name) {
    const bool a_scalar = a->is_scalar(), b_scalar = b->is_scalar();
    if (!a_scalar && !b_scalar) check_same_shape(a, b, name);
    const Shape& shape = a_scalar && !b_scalar ? b->shape : a->shape;
    const std::size_t n = shape_numel(shape);
    std::vector<double> out(n);
    auto av = [&](std::size_t i) { return a->data[a_scalar ? 0 : i]; };
    auto bv = [&](std::size_t i) { return b->data[b_scalar ? 0 : i]; };
    switch (kind) {
        case BinKind::Add:
            for (std::size_t i = 0; i < n; ++i) out[i] = av(i) + bv(i);
            break;
        case BinKind::Sub:
            for (std::size_t i = 0; i < n; ++i) out[i] = av(i) - bv(i);
            break;
        case BinKind::Mul:
            for (std::size_t i = 0; i < n; ++i) out[i] = av(i) * bv(i);
            break;
        case BinKind::Div:
            for (std::size_t i = 0; i < n; ++i) out[i] = av(i) / bv(i);
            break;
    }
    auto o = make_out(shape, std::move(out), any_rg(a, b));
    if (t.enabled() && o->requires_grad) {
        t.record([kind, a, b, o, n, a_scalar, b_scalar] {
            auto aval = [&](std::size_t i) { return a->data[a_scalar ? 0 : i]; };
            auto bval = [&](std::size_t i) { return b->data[b_scalar ? 0 : i]; };
            for (std::size_t i = 0; i < n; ++i) {
                const double g = o->grad[i];
                if (g == 0.0) continue;
                double da = 0.0, db = 0.0;
                switch (kind) {
                    case BinKind::Add: da = g; db = g; break;
                    case BinKind::Sub: da = g; db = -g; break;
                    case BinKind::Mul: da = g * bval(i); db = g * aval(i); break;
                    case BinKind::Div: {
                        const double bi = bval(i);
                        da = g / bi;
                        db = -g * aval(i) / (bi * bi);
                        break;
                    }
                }
                if (a->requires_grad) a->grad[a_scalar ? 0 : i] += da;
                if (b->requires_grad) b->grad[b_scalar ? 0 : i] += db;
            }
        });
    }
    return o;
}

template <typename Fwd, typename Bwd>
TensorPtr unary_op(Tape& t, const TensorPtr& a, Fwd fwd, Bwd bwd) {
    const std::size_t n = a->size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = fwd(a->data[i]);
    auto o = make_out(a->shape, std::move(out), any_rg(a));
    if (t.enabled() && o->requires_grad) {
        t.record([a, o, n, bwd] {
            for (std::size_t i = 0; i < n; ++i)
                a->grad[i] += o->grad[i] * bwd(a->data[i], o->data[i]);
        });
    }
    return o;
}

}  // namespace

TensorPtr add(Tape& t, const TensorPtr& a, const TensorPtr& b) {
    return binary_op(t, BinKind::Add, a, b, "add");
}
TensorPtr sub(Tape& t, const TensorPtr& a, const TensorPtr& b) {
    return binary_op(t, BinKind::Sub, a, b, "sub");
}
TensorPtr mul(Tape& t, const TensorPtr& a, const TensorPtr& b) {
    return binary_op(t, BinKind::Mul, a, b, "mul");
}
TensorPtr div(Tape& t, const TensorPtr& a, const TensorPtr& b) {
    return binary_op(t, BinKind::Div, a, b, "div");
}

TensorPtr tanh(Tape& t, const TensorPtr& a) {
    return unary_op(
        t, a, [](double x) { return std::tanh(x); },
        [](double, double y) { return 1.0 - y * y; });
}

TensorPtr relu(Tape& t, const TensorPtr& a) {
    return unary_op(
        t, a, [](double x) { return x > 0.0 ? x : 0.0; },
        [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

TensorPtr sigmoid(Tape& t, const TensorPtr& a) {
    return unary_op(
        t, a,
        [](double x) {
            // split on sign for stability
            return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
        },
        [](double, double y) { return y * (1.0 - y); });
}

TensorPtr exp(Tape& t, const TensorPtr& a) {
    return unary_op(
        t, a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

TensorPtr log(Tape& t, const TensorPtr& a) {
    for (double v : a->data)
        if (v <= 0.0) throw DomainError("log of non-positive input " + std::to_string(v));
    return unary_op(
        t, a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

TensorPtr square(Tape& t, const TensorPtr& a) {
    return unary_op(
        t, a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

TensorPtr scale(Tape& t, const TensorPtr& a, double c) {
    return unary_op(
        t, a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

TensorPtr clamp(Tape& t, const TensorPtr& a, double lo, double hi) {
    if (!(lo <= hi)) throw ConfigError("clamp: lo > hi");
    return unary_op(
        t, a, [lo, hi](double x) { return std::min(hi, std::max(lo, x)); },
        [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

TensorPtr arcosh(Tape& t, const TensorPtr& a) {
    constexpr double kEps = 1e-12;  // caps the derivative near the u = 1 singularity
    return unary_op(
        t, a, [](double x) { return std::acosh(std::max(x, 1.0)); },
        [](double x, double) {
            const double u = std::max(x, 1.0 + kEps);
            return 1.0 / std::sqrt(u * u - 1.0);
        });
}

TensorPtr elementwise(Tape& t, Opcode op, const TensorPtr& a, const TensorPtr& b) {
    const bool binary = op == Opcode::Add || op == Opcode::Sub || op == Opcode::Mul;
    if (binary && !b) throw ContractError("elementwise: binary opcode requires two operands");
    if (!binary && b) throw ContractError("elementwise: unary opcode takes one operand");
    switch (op) {
        case Opcode::Add: return add(t, a, b);
        case Opcode::Sub: return sub(t, a, b);
        case Opcode::Mul: return mul(t, a, b);
        case Opcode::Tanh: return tanh(t, a);
        case Opcode::Relu: return relu(t, a);
        case Opcode::Sigmoid: return sigmoid(t, a);
        case Opcode::Exp: return exp(t, a);
        case Opcode::Log: return log(t, a);
        case Opcode::Square: return square(t, a);
    }
    throw ContractError("elementwise: unknown opcode");
}

TensorPtr softmax(Tape& t, const TensorPtr& a, double temperature) {
    if (a->shape.size() != 1 || a->size() == 0)
        throw DimensionError("softmax expects a non-empty 1-D tensor");
    if (!(temperature > 0.0)) throw ConfigError("softmax temperature must be positive");
    const std::size_t n = a->size();
    std::vector<double> out(n);
    double mx = a->data[0];
    for (double v : a->data) mx = std::max(mx, v);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp((a->data[i] - mx) / temperature);
        z += out[i];
    }
    for (auto& v : out) v /= z;
    auto o = make_out(a->shape, std::move(out), any_rg(a));
    if (t.enabled() && o->requires_grad) {
        t.record([a, o, n, temperature] {
            double gy = 0.0;
            for (std::size_t i = 0; i < n; ++i) gy += o->grad[i] * o->data[i];
            for (std::size_t i = 0; i < n; ++i)
                a->grad[i] += o->data[i] * (o->grad[i] - gy) / temperature;
        });
    }
    return o;
}

TensorPtr causal_row_softmax(Tape& t, const TensorPtr& scores) {
    if (scores->shape.size() != 2 || scores->shape[0] != scores->shape[1])
        throw DimensionError("causal_row_softmax expects a square matrix, got " +
                             shape_str(scores->shape));
    const std::size_t n = scores->shape[0];
    std::vector<double> out(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const double* srow = scores->data.data() + r * n;
        double mx = srow[0];
        for (std::size_t c = 1; c <= r; ++c) mx = std::max(mx, srow[c]);
        double z = 0.0;
        for (std::size_t c = 0; c <= r; ++c) {
            out[r * n + c] = std::exp(srow[c] - mx);
            z += out[r * n + c];
        }
        for (std::size_t c = 0; c <= r; ++c) out[r * n + c] /= z;
    }
    auto o = make_out(scores->shape, std::move(out), any_rg(scores));
    if (t.enabled() && o->requires_grad) {
        t.record([scores, o, n] {
            for (std::size_t r = 0; r < n; ++r) {
                const double* yrow = o->data.data() + r * n;
                const double* grow = o->grad.data() + r * n;
                double gy = 0.0;
                for (std::size_t c = 0; c <= r; ++c) gy += grow[c] * yrow[c];
                for (std::size_t c = 0; c <= r; ++c)
                    scores->grad[r * n + c] += yrow[c] * (grow[c] - gy);
            }
        });
    }
    return o;
}

TensorPtr stop_gradient(Tape&, const TensorPtr& a) {
    // fresh leaf: same value, no history, no grad
    return make_out(a->shape, a->data, false);
}

TensorPtr straight_through(Tape& t, const TensorPtr& z_e, const TensorPtr& e_j) {
    check_same_shape(z_e, e_j, "straight_through");
    auto o = make_out(z_e->shape, e_j->data, z_e->requires_grad);
    if (t.enabled() && o->requires_grad) {
        const std::size_t n = o->size();
        t.record([z_e, o, n] {
            for (std::size_t i = 0; i < n; ++i) z_e->grad[i] += o->grad[i];
        });
    }
    return o;
}

TensorPtr sum(Tape& t, const TensorPtr& a) {
    double s = 0.0;
    for (double v : a->data) s += v;
    auto o = make_out({1}, {s}, any_rg(a));
    if (t.enabled() && o->requires_grad) {
        t.record([a, o] {
            const double g = o->grad[0];
            for (auto& gi : a->grad) gi += g;
        });
    }
    return o;
}

TensorPtr mean(Tape& t, const TensorPtr& a) {
    if (a->size() == 0) throw ContractError("mean of empty tensor");
    double s = 0.0;
    for (double v : a->data) s += v;
    const double inv = 1.0 / static_cast<double>(a->size());
    auto o = make_out({1}, {s * inv}, any_rg(a));
    if (t.enabled() && o->requires_grad) {
        t.record([a, o, inv] {
            const double g = o->grad[0] * inv;
            for (auto& gi : a->grad) gi += g;
        });
    }
    return o;
}

TensorPtr reshape(Tape& t, const TensorPtr& a, Shape shape) {
    if (shape_numel(shape) != a->size())
        throw DimensionError("reshape: " + shape_str(a->shape) + " to " + shape_str(shape) +
                             " changes element count");
    auto o = make_out(std::move(shape), a->data, any_rg(a));
    if (t.enabled() && o->requires_grad) {
        const std::size_t n = a->size();
        t.record([a, o, n] {
            for (std::size_t i = 0; i < n; ++i) a->grad[i] += o->grad[i];
        });
    }
    return o;
}

TensorPtr concat(Tape& t, const std::vector<TensorPtr>& parts) {
    if (parts.empty()) throw ContractError("concat of zero tensors");
    std::size_t total = 0;
    bool rg = false;
    for (const auto& p : parts) {
        if (p->shape.size() != 1) throw DimensionError("concat expects 1-D tensors");
        total += p->size();
        rg = rg || p->requires_grad;
    }
    std::vector<double> out;
    out.reserve(total);
    for (const auto& p : parts) out.insert(out.end(), p->data.begin(), p->data.end());
    auto o = make_out({total}, std::move(out), rg);
    if (t.enabled() && o->requires_grad) {
        t.record([parts, o] {
            std::size_t off = 0;
            for (const auto& p : parts) {
                if (p->requires_grad)
                    for (std::size_t i = 0; i < p->size(); ++i) p->grad[i] += o->grad[off + i];
                off += p->size();
            }
        });
    }
    return o;
}

TensorPtr slice(Tape& t, const TensorPtr& a, std::size_t offset, std::size_t len) {
    if (a->shape.size() != 1) throw DimensionError("slice expects a 1-D tensor");
    if (offset + len > a->size())
        throw DimensionError("slice [" + std::to_string(offset) + ", " +
                             std::to_string(offset + len) + ") out of range for " +
                             shape_str(a->shape));
    std::vector<double> out(a->data.begin() + offset, a->data.begin() + offset + len);
    auto o = make_out({len}, std::move(out), any_rg(a));
    if (t.enabled() && o->requires_grad) {
        t.record([a, o, offset, len] {
            for (std::size_t i = 0; i < len; ++i) a->grad[offset + i] += o->grad[i];
        });
    }
    return o;
}

TensorPtr row(Tape& t, const TensorPtr& a, std::size_t i) {
    if (a->shape.size() != 2) throw DimensionError("row expects a 2-D tensor");
    const std::size_t m = a->shape[0], n = a->shape[1];
    if (i >= m) throw DimensionError("row index " + std::to_string(i) + " out of range for " +
                                     shape_str(a->shape));
    std::vector<double> out(a->data.begin() + i * n, a->data.begin() + (i + 1) * n);
    auto o = make_out({n}, std::move(out), any_rg(a));
    if (t.enabled() && o->requires_grad) {
        t.record([a, o, i, n] {
            for (std::size_t j = 0; j < n; ++j) a->grad[i * n + j] += o->grad[j];
        });
    }
    return o;
}

TensorPtr add_rowwise(Tape& t, const TensorPtr& x, const TensorPtr& b) {
    if (x->shape.size() != 2 || b->shape.size() != 1 || x->shape[1] != b->shape[0])
        throw DimensionError("add_rowwise expects [m x n] and [n], got " + shape_str(x->shape) +
                             " and " + shape_str(b->shape));
    const std::size_t m = x->shape[0], n = x->shape[1];
    std::vector<double> out(x->data);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] += b->data[j];
    auto o = make_out(x->shape, std::move(out), any_rg(x, b));
    if (t.enabled() && o->requires_grad) {
        t.record([x, b, o, m, n] {
            if (x->requires_grad)
                for (std::size_t i = 0; i < m * n; ++i) x->grad[i] += o->grad[i];
            if (b->requires_grad)
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) b->grad[j] += o->grad[i * n + j];
        });
    }
    return o;
}

TensorPtr dot(Tape& t, const TensorPtr& a, const TensorPtr& b) {
    return sum(t, mul(t, a, b));
}

TensorPtr sum_sq(Tape& t, const TensorPtr& a) { return sum(t, square(t, a)); }

TensorPtr mse(Tape& t, const TensorPtr& a, const TensorPtr& b) {
    return mean(t, square(t, sub(t, a, b)));
}

// ---- optimizer -------------------------------------------------------------

void AdamState::init(const std::vector<TensorPtr>& params) {
    m.clear();
    v.clear();
    step = 0;
    for (const auto& p : params) {
        m.emplace_back(p->size(), 0.0);
        v.emplace_back(p->size(), 0.0);
    }
}

void adam_step(const std::vector<TensorPtr>& params, AdamState& s) {
    if (!(s.lr > 0.0)) throw ConfigError("adam: learning rate must be positive");
    if (s.m.size() != params.size()) throw ContractError("adam state not initialized for group");
    s.step += 1;
    const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
    const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor& p = *params[pi];
        if (p.grad.size() != p.data.size())
            throw ContractError("adam: parameter missing grad accumulator");
        auto& mp = s.m[pi];
        auto& vp = s.v[pi];
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            const double g = p.grad[i];
            mp[i] = s.beta1 * mp[i] + (1.0 - s.beta1) * g;
            vp[i] = s.beta2 * vp[i] + (1.0 - s.beta2) * g * g;
            const double mhat = mp[i] / bc1;
            const double vhat = vp[i] / bc2;
            if (s.variant == AdamVariant::AdamW)
                p.data[i] -= s.lr * s.weight_decay * p.data[i];
            p.data[i] -= s.lr * mhat / (std::sqrt(vhat) + s.eps);
        }
    }
}

double clip_grad_norm(const std::vector<TensorPtr>& params, double max_norm) {
    double sq = 0.0;
    for (const auto& p : params)
        for (double g : p->grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double f = max_norm / norm;
        for (const auto& p : params)
            for (auto& g : p->grad) g *= f;
    }
    return norm;
}

void zero_grads(const std::vector<TensorPtr>& params) {
    for (const auto& p : params) p->zero_grad();
}

bool grads_finite(const std::vector<TensorPtr>& params) {
    for (const auto& p : params)
        for (double g : p->grad)
            if (!std::isfinite(g)) return false;
    return true;
}

// ---- finite differences -----------------------------------------------------

double finite_diff_check(const std::function<TensorPtr(Tape&, const TensorPtr&)>& f,
                         const TensorPtr& x, double eps) {
    // analytic pass
    auto xa = param(x->shape, x->data);
    Tape tape;
    auto loss = f(tape, xa);
    tape.backward(loss);

    double worst = 0.0;
    Tape silent(false);
    auto probe = constant(x->shape, x->data);
    for (std::size_t i = 0; i < x->size(); ++i) {
        const double keep = probe->data[i];
        probe->data[i] = keep + eps;
        const double up = f(silent, probe)->value();
        probe->data[i] = keep - eps;
        const double dn = f(silent, probe)->value();
        probe->data[i] = keep;
        const double fd = (up - dn) / (2.0 * eps);
        const double err = std::abs(xa->grad[i] - fd) / std::max(1.0, std::abs(fd));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace cos
