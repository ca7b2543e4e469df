#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cos/rng.hpp"
#include "cos/tensor.hpp"

namespace cos {

/// Named parameter collection for one network; the unit of checkpointing
/// and optimizer binding.
class ParamSet {
public:
    TensorPtr create(const std::string& name, Shape shape, std::vector<double> data) {
        auto p = param(std::move(shape), std::move(data));
        named_.emplace_back(name, p);
        return p;
    }

    const std::vector<std::pair<std::string, TensorPtr>>& named() const { return named_; }

    std::vector<TensorPtr> tensors() const {
        std::vector<TensorPtr> out;
        out.reserve(named_.size());
        for (const auto& [_, p] : named_) out.push_back(p);
        return out;
    }

    TensorPtr find(const std::string& name) const {
        for (const auto& [n, p] : named_)
            if (n == name) return p;
        return nullptr;
    }

    std::size_t count_values() const {
        std::size_t n = 0;
        for (const auto& [_, p] : named_) n += p->size();
        return n;
    }

private:
    std::vector<std::pair<std::string, TensorPtr>> named_;
};

// layer init: uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)]
inline std::vector<double> uniform_init(std::size_t n, std::size_t fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in ? fan_in : 1));
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-bound, bound);
    return v;
}

struct Linear {
    TensorPtr w;  // [in x out]
    TensorPtr b;  // [out]
};

inline Linear make_linear(ParamSet& ps, const std::string& name, std::size_t in,
                          std::size_t out, Rng& rng) {
    return Linear{ps.create(name + ".w", {in, out}, uniform_init(in * out, in, rng)),
                  ps.create(name + ".b", {out}, uniform_init(out, in, rng))};
}

inline TensorPtr forward(Tape& t, const Linear& l, const TensorPtr& x) {
    return affine(t, x, l.w, l.b);
}

/// Vanilla recurrent cell: h' = tanh(x W_x + W_h h + b).
struct RnnCell {
    TensorPtr wx;  // [in x hidden]
    TensorPtr wh;  // [hidden x hidden]
    TensorPtr b;   // [hidden]
};

inline RnnCell make_rnn_cell(ParamSet& ps, const std::string& name, std::size_t in,
                             std::size_t hidden, Rng& rng) {
    return RnnCell{ps.create(name + ".wx", {in, hidden}, uniform_init(in * hidden, in, rng)),
                   ps.create(name + ".wh", {hidden, hidden},
                             uniform_init(hidden * hidden, hidden, rng)),
                   ps.create(name + ".b", {hidden}, uniform_init(hidden, hidden, rng))};
}

inline TensorPtr forward(Tape& t, const RnnCell& cell, const TensorPtr& x,
                         const TensorPtr& h) {
    return tanh(t, add(t, affine(t, x, cell.wx, cell.b), matvec(t, cell.wh, h)));
}

}  // namespace cos
