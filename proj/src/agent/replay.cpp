#include "folio/agent/replay.hpp"

#include <numeric>

#include "folio/common.hpp"

namespace folio::agent {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    require(capacity >= 1, "ReplayBuffer: capacity must be at least 1");
    data_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[head_] = std::move(t);
        head_ = (head_ + 1) % capacity_;
    }
}

std::optional<std::vector<std::size_t>> ReplayBuffer::sample_indices(std::size_t n,
                                                                     Rng& rng) const {
    require(n >= 1, "ReplayBuffer::sample_indices: n must be at least 1");
    if (n > size()) return std::nullopt;
    std::vector<std::size_t> idx(size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(n);
    return idx;
}

const Transition& ReplayBuffer::operator[](std::size_t logical) const {
    require(logical < size(), "ReplayBuffer: index ", logical, " out of range for size ",
            size());
    if (data_.size() < capacity_) return data_[logical];
    return data_[(head_ + logical) % capacity_];
}

} // namespace folio::agent
