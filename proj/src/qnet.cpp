#include "qdts/qnet.hpp"

#include <cassert>
#include <cmath>

#include "qdts/errors.hpp"

namespace qdts {

QNetwork::QNetwork(int input_size, int output_size, int hidden_size)
    : input_(input_size), output_(output_size), hidden_(hidden_size) {
    assert(input_size > 0 && output_size > 0 && hidden_size > 0);
    w1_.assign(std::size_t(hidden_) * input_, 0.0);
    b1_.assign(hidden_, 0.0);
    w2_.assign(std::size_t(output_) * hidden_, 0.0);
    b2_.assign(output_, 0.0);
}

void QNetwork::init_random(std::mt19937_64& rng) {
    const auto fill = [&rng](std::vector<double>& w, int fan_in, int fan_out) {
        const double limit = std::sqrt(6.0 / double(fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& v : w) v = dist(rng);
    };
    fill(w1_, input_, hidden_);
    fill(w2_, hidden_, output_);
    // Biases start at zero.
}

std::vector<double> QNetwork::forward(std::span<const double> state) const {
    if (int(state.size()) != input_)
        throw ShapeMismatch("state size " + std::to_string(state.size()) +
                            " does not match input arity " + std::to_string(input_));
    std::vector<double> hidden(hidden_);
    for (int h = 0; h < hidden_; ++h) {
        double z = b1_[h];
        const double* row = &w1_[std::size_t(h) * input_];
        for (int i = 0; i < input_; ++i) z += row[i] * state[i];
        hidden[h] = std::tanh(z);
    }
    std::vector<double> out(output_);
    for (int o = 0; o < output_; ++o) {
        double z = b2_[o];
        const double* row = &w2_[std::size_t(o) * hidden_];
        for (int h = 0; h < hidden_; ++h) z += row[h] * hidden[h];
        out[o] = z;
    }
    return out;
}

QNetwork::Gradients QNetwork::zero_gradients() const {
    Gradients g;
    g.w1.assign(w1_.size(), 0.0);
    g.b1.assign(b1_.size(), 0.0);
    g.w2.assign(w2_.size(), 0.0);
    g.b2.assign(b2_.size(), 0.0);
    return g;
}

double QNetwork::accumulate_td_gradient(std::span<const double> state, int action,
                                        double target, Gradients& grad) const {
    if (int(state.size()) != input_)
        throw ShapeMismatch("state size does not match input arity");
    assert(action >= 0 && action < output_);

    std::vector<double> hidden(hidden_);
    for (int h = 0; h < hidden_; ++h) {
        double z = b1_[h];
        const double* row = &w1_[std::size_t(h) * input_];
        for (int i = 0; i < input_; ++i) z += row[i] * state[i];
        hidden[h] = std::tanh(z);
    }
    double q = b2_[action];
    {
        const double* row = &w2_[std::size_t(action) * hidden_];
        for (int h = 0; h < hidden_; ++h) q += row[h] * hidden[h];
    }

    const double residual = q - target;
    const double dq = 2.0 * residual;  // d/dq of (q - target)^2

    grad.b2[action] += dq;
    const double* w2_row = &w2_[std::size_t(action) * hidden_];
    for (int h = 0; h < hidden_; ++h) {
        grad.w2[std::size_t(action) * hidden_ + h] += dq * hidden[h];
        const double dh = dq * w2_row[h] * (1.0 - hidden[h] * hidden[h]);
        grad.b1[h] += dh;
        double* g_row = &grad.w1[std::size_t(h) * input_];
        for (int i = 0; i < input_; ++i) g_row[i] += dh * state[i];
    }
    return residual * residual;
}

nlohmann::json QNetwork::to_json() const {
    return nlohmann::json{{"input", input_},   {"output", output_}, {"hidden", hidden_},
                          {"w1", w1_},         {"b1", b1_},         {"w2", w2_},
                          {"b2", b2_}};
}

QNetwork QNetwork::from_json(const nlohmann::json& j) {
    QNetwork net(j.at("input").get<int>(), j.at("output").get<int>(),
                 j.at("hidden").get<int>());
    net.w1_ = j.at("w1").get<std::vector<double>>();
    net.b1_ = j.at("b1").get<std::vector<double>>();
    net.w2_ = j.at("w2").get<std::vector<double>>();
    net.b2_ = j.at("b2").get<std::vector<double>>();
    if (net.w1_.size() != std::size_t(net.hidden_) * net.input_ ||
        net.b1_.size() != std::size_t(net.hidden_) ||
        net.w2_.size() != std::size_t(net.output_) * net.hidden_ ||
        net.b2_.size() != std::size_t(net.output_))
        throw ShapeMismatch("checkpoint weight shapes are inconsistent");
    return net;
}

AdamOptimizer::AdamOptimizer(const QNetwork& net) {
    w1_.m.assign(net.w1().size(), 0.0);
    w1_.v.assign(net.w1().size(), 0.0);
    b1_.m.assign(net.b1().size(), 0.0);
    b1_.v.assign(net.b1().size(), 0.0);
    w2_.m.assign(net.w2().size(), 0.0);
    w2_.v.assign(net.w2().size(), 0.0);
    b2_.m.assign(net.b2().size(), 0.0);
    b2_.v.assign(net.b2().size(), 0.0);
}

void AdamOptimizer::step_group(std::vector<double>& params,
                               const std::vector<double>& grad, Moments& mom,
                               double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    const double bc1 = 1.0 - std::pow(beta1, double(t_));
    const double bc2 = 1.0 - std::pow(beta2, double(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        mom.m[i] = beta1 * mom.m[i] + (1.0 - beta1) * grad[i];
        mom.v[i] = beta2 * mom.v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double m_hat = mom.m[i] / bc1;
        const double v_hat = mom.v[i] / bc2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

void AdamOptimizer::step(QNetwork& net, const QNetwork::Gradients& grad,
                         double learning_rate) {
    t_ += 1;
    step_group(net.w1(), grad.w1, w1_, learning_rate);
    step_group(net.b1(), grad.b1, b1_, learning_rate);
    step_group(net.w2(), grad.w2, w2_, learning_rate);
    step_group(net.b2(), grad.b2, b2_, learning_rate);
}

} // namespace qdts
