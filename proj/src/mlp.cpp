#include "tactile/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace tactile {

Mlp::Mlp(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw std::invalid_argument("Mlp needs at least input and output dims");
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        weight_offsets_.push_back(total);
        total += static_cast<std::size_t>(dims_[l + 1]) * dims_[l] + dims_[l + 1];
    }
    params_.assign(total, 0.0);
}

void Mlp::init_xavier(Rng& rng) {
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        int fan_in = dims_[l], fan_out = dims_[l + 1];
        double bound = std::sqrt(6.0 / (fan_in + fan_out));
        double* w = params_.data() + weight_offsets_[l];
        for (int i = 0; i < fan_out * fan_in; ++i) w[i] = rng.uniform(-bound, bound);
        double* b = w + static_cast<std::size_t>(fan_out) * fan_in;
        for (int i = 0; i < fan_out; ++i) b[i] = 0.0;
    }
}

void Mlp::zero_final_layer() {
    std::size_t l = dims_.size() - 2;
    double* w = params_.data() + weight_offsets_[l];
    std::size_t n = static_cast<std::size_t>(dims_[l + 1]) * dims_[l] + dims_[l + 1];
    for (std::size_t i = 0; i < n; ++i) w[i] = 0.0;
}

void Mlp::forward(std::span<const double> input, Tape& tape) const {
    const std::size_t n_layers = dims_.size() - 1;
    tape.act.resize(n_layers + 1);
    tape.act[0].assign(input.begin(), input.end());

    for (std::size_t l = 0; l < n_layers; ++l) {
        int in = dims_[l], out = dims_[l + 1];
        const double* w = params_.data() + weight_offsets_[l];
        const double* b = w + static_cast<std::size_t>(out) * in;
        const auto& a = tape.act[l];
        auto& z = tape.act[l + 1];
        z.assign(out, 0.0);
        for (int o = 0; o < out; ++o) {
            double s = b[o];
            const double* wrow = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) s += wrow[i] * a[i];
            z[o] = (l + 1 < n_layers) ? std::tanh(s) : s;
        }
    }
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
    Tape tape;
    forward(input, tape);
    return tape.act.back();
}

void Mlp::backward(const Tape& tape, std::span<const double> dout,
                   std::vector<double>& grad) const {
    const std::size_t n_layers = dims_.size() - 1;
    std::vector<double> delta(dout.begin(), dout.end());

    for (std::size_t l = n_layers; l-- > 0;) {
        int in = dims_[l], out = dims_[l + 1];
        const double* w = params_.data() + weight_offsets_[l];
        double* gw = grad.data() + weight_offsets_[l];
        double* gb = gw + static_cast<std::size_t>(out) * in;
        const auto& a = tape.act[l];

        for (int o = 0; o < out; ++o) {
            double d = delta[o];
            gb[o] += d;
            double* gwrow = gw + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) gwrow[i] += d * a[i];
        }
        if (l == 0) break;

        std::vector<double> prev(in, 0.0);
        for (int o = 0; o < out; ++o) {
            double d = delta[o];
            const double* wrow = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) prev[i] += d * wrow[i];
        }
        // act[l] is post-tanh for hidden layers.
        for (int i = 0; i < in; ++i) prev[i] *= 1.0 - a[i] * a[i];
        delta = std::move(prev);
    }
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        params[i] -= lr_ * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps_);
    }
}

} // namespace tactile
