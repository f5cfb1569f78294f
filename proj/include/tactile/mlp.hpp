#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tactile/rng.hpp"

namespace tactile {

// Dense feed-forward net: tanh hidden layers, linear output, parameters in
// one flat vector (per layer: row-major weight matrix, then bias). Backward
// pass is hand-written; everything is double precision so analytic gradients
// can be checked against central differences tightly.
class Mlp {
public:
    // dims = {in, hidden..., out}
    explicit Mlp(std::vector<int> dims);

    void init_xavier(Rng& rng);
    void zero_final_layer();

    int input_dim() const { return dims_.front(); }
    int output_dim() const { return dims_.back(); }

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    std::size_t param_count() const { return params_.size(); }

    std::vector<double> forward(std::span<const double> input) const;

    // Activation tape for one input; reused across calls to avoid churn.
    struct Tape {
        std::vector<std::vector<double>> act;   // act[0] = input, act[L] = output
    };

    void forward(std::span<const double> input, Tape& tape) const;

    // Accumulates dLoss/dparams into grad (size param_count) given
    // dLoss/doutput for the tape's input. grad is += so batches accumulate.
    void backward(const Tape& tape, std::span<const double> dout,
                  std::vector<double>& grad) const;

private:
    std::vector<int> dims_;
    std::vector<std::size_t> weight_offsets_;   // per layer: W offset; bias follows W
    std::vector<double> params_;
};

// Plain Adam on a flat parameter vector.
class Adam {
public:
    Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    void step(std::vector<double>& params, const std::vector<double>& grad);

    double learning_rate() const { return lr_; }
    std::uint64_t steps_taken() const { return t_; }

    // Serialization hooks for checkpoints.
    std::vector<double>& first_moment() { return m_; }
    std::vector<double>& second_moment() { return v_; }
    void set_steps_taken(std::uint64_t t) { t_ = t; }

private:
    double lr_, beta1_, beta2_, eps_;
    std::uint64_t t_ = 0;
    std::vector<double> m_, v_;
};

} // namespace tactile
