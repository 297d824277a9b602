#include "qdts/replay.hpp"

#include <cassert>

namespace qdts {

ReplayMemory::ReplayMemory(std::size_t capacity) {
    assert(capacity > 0);
    buffer_.resize(capacity);
}

void ReplayMemory::push(Transition t) {
    buffer_[head_] = std::move(t);
    head_ = (head_ + 1) % buffer_.size();
    if (size_ < buffer_.size()) ++size_;
}

std::vector<const Transition*> ReplayMemory::sample(std::size_t batch,
                                                    std::mt19937_64& rng) const {
    assert(size_ > 0);
    std::vector<const Transition*> out;
    out.reserve(batch);
    std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(&buffer_[pick(rng)]);
    return out;
}

} // namespace qdts
