#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "saferl/affordance.hpp"
#include "saferl/rng.hpp"

namespace saferl {

// One replay record. `s` (and `s_next` for safe records) are normalized
// affordance vectors. Collision-buffer records are terminal: td_target never
// bootstraps them, and their s_next is either absent (handcrafted/static
// events) or the predicted next state (dynamic events, metadata only).
struct Transition {
    AffordanceVector s{};
    int action = 0;
    std::optional<AffordanceVector> s_next;
    double reward = 0.0;
    bool terminal = false;
};

enum class BufferTag { Safe, Collision };

// Bounded FIFO ring; eviction strictly oldest-first.
class ReplayBuffer {
  public:
    ReplayBuffer(std::size_t capacity, BufferTag tag) : capacity_(capacity), tag_(tag) {
        if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be > 0");
        data_.reserve(std::min<std::size_t>(capacity, 4096));
    }

    void push(Transition t) {
        if (tag_ == BufferTag::Safe && (!t.s_next || t.terminal))
            throw std::logic_error("safe buffer requires non-terminal records with s_next");
        if (tag_ == BufferTag::Collision && !t.terminal)
            throw std::logic_error("collision buffer requires terminal records");
        if (data_.size() < capacity_) {
            data_.push_back(std::move(t));
        } else {
            data_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }
    }

    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    BufferTag tag() const { return tag_; }

    const Transition& sample(Rng& rng) const {
        if (data_.empty()) throw std::logic_error("sampling from an empty replay buffer");
        return data_[static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<int>(data_.size()) - 1))];
    }

    // Oldest-first iteration order is not exposed; tests may inspect raw slots.
    const Transition& at(std::size_t i) const { return data_.at(i); }

  private:
    std::vector<Transition> data_;
    std::size_t head_ = 0;
    std::size_t capacity_;
    BufferTag tag_;
};

}  // namespace saferl
