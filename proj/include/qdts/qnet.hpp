#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

namespace qdts {

/// Two-layer value network: tanh hidden layer of 25 units, linear
/// output. Output arity is 9 for the cube agent and K for the point
/// agent. Weights are stored row-major.
class QNetwork {
public:
    QNetwork() = default;
    QNetwork(int input_size, int output_size, int hidden_size = 25);

    int input_size() const { return input_; }
    int output_size() const { return output_; }
    int hidden_size() const { return hidden_; }

    /// Deterministic uniform initialization scaled per layer fan.
    void init_random(std::mt19937_64& rng);

    /// Throws ShapeMismatch unless state.size() == input_size().
    std::vector<double> forward(std::span<const double> state) const;

    struct Gradients {
        std::vector<double> w1, b1, w2, b2;
    };
    Gradients zero_gradients() const;

    /// Backpropagate the squared TD error (q[action] - target)^2 for a
    /// single sample, accumulating into `grad`. Returns the loss term.
    double accumulate_td_gradient(std::span<const double> state, int action,
                                  double target, Gradients& grad) const;

    // Parameter access (flattened, row-major). Mutable for the optimizer
    // and the finite-difference tests.
    std::vector<double>& w1() { return w1_; }
    std::vector<double>& b1() { return b1_; }
    std::vector<double>& w2() { return w2_; }
    std::vector<double>& b2() { return b2_; }
    const std::vector<double>& w1() const { return w1_; }
    const std::vector<double>& b1() const { return b1_; }
    const std::vector<double>& w2() const { return w2_; }
    const std::vector<double>& b2() const { return b2_; }

    nlohmann::json to_json() const;
    static QNetwork from_json(const nlohmann::json& j);

    bool operator==(const QNetwork& other) const = default;

private:
    int input_ = 0, output_ = 0, hidden_ = 0;
    std::vector<double> w1_, b1_, w2_, b2_;
};

/// Adam state for one QNetwork (beta1 0.9, beta2 0.999, eps 1e-8).
class AdamOptimizer {
public:
    AdamOptimizer() = default;
    explicit AdamOptimizer(const QNetwork& net);

    void step(QNetwork& net, const QNetwork::Gradients& grad, double learning_rate);

private:
    struct Moments {
        std::vector<double> m, v;
    };
    void step_group(std::vector<double>& params, const std::vector<double>& grad,
                    Moments& mom, double lr);

    Moments w1_, b1_, w2_, b2_;
    std::int64_t t_ = 0;
};

} // namespace qdts
