#pragma once

#include <optional>
#include <vector>

#include "folio/market/panel.hpp"
#include "folio/ndcore/tensor.hpp"

namespace folio::agent {

struct Transition {
    nd::Tensor state;           // cash-augmented observation streams
    std::vector<double> action; // executed portfolio weights
    double reward = 0.0;
    nd::Tensor next_state;
    bool terminal = false;
};

// Fixed-capacity FIFO experience store with uniform sampling without
// replacement. Indexing is logical: 0 is the oldest stored transition.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool can_sample(std::size_t n) const { return n >= 1 && n <= size(); }

    // Distinct logical indices drawn uniformly; nullopt while underfilled.
    std::optional<std::vector<std::size_t>> sample_indices(std::size_t n, Rng& rng) const;

    const Transition& operator[](std::size_t logical) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0; // slot the next push overwrites once full
    std::vector<Transition> data_;
};

} // namespace folio::agent
