#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qdts {

struct Transition {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;            // empty on terminal transitions
    std::vector<std::uint8_t> next_valid;      // valid-action mask of next_state
    bool terminal = false;
};

/// Fixed-capacity FIFO transition store.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity = 2000);

    void push(Transition t);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return buffer_.size(); }

    /// Uniform sample with replacement; reproducible for a fixed rng.
    std::vector<const Transition*> sample(std::size_t batch, std::mt19937_64& rng) const;

private:
    std::vector<Transition> buffer_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
};

} // namespace qdts
