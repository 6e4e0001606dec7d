#pragma once

#include <cstdint>
#include <vector>

namespace inclab {

/// Binary indexed tree over nonnegative integer weights with O(log n)
/// point updates and inverse-prefix search.
class FenwickTree {
public:
    FenwickTree() = default;
    explicit FenwickTree(const std::vector<std::int64_t>& weights) { assign(weights); }

    void assign(const std::vector<std::int64_t>& weights) {
        n_ = weights.size();
        tree_.assign(n_ + 1, 0);
        raw_ = weights;
        for (std::size_t i = 1; i <= n_; ++i) {
            tree_[i] += weights[i - 1];
            const std::size_t parent = i + (i & (~i + 1));
            if (parent <= n_) tree_[parent] += tree_[i];
        }
        total_ = 0;
        for (auto w : weights) total_ += w;
        top_bit_ = 1;
        while (top_bit_ * 2 <= n_) top_bit_ *= 2;
    }

    void set(std::size_t i, std::int64_t w) { add(i, w - raw_[i]); }

    void add(std::size_t i, std::int64_t delta) {
        raw_[i] += delta;
        total_ += delta;
        for (std::size_t k = i + 1; k <= n_; k += k & (~k + 1)) tree_[k] += delta;
    }

    std::int64_t weight(std::size_t i) const { return raw_[i]; }
    std::int64_t total() const { return total_; }
    std::size_t size() const { return n_; }

    // Sum of weights [0, i).
    std::int64_t prefix(std::size_t i) const {
        std::int64_t s = 0;
        for (std::size_t k = i; k > 0; k -= k & (~k + 1)) s += tree_[k];
        return s;
    }

    // Smallest index i with prefix(i + 1) > r, for 0 <= r < total().
    std::size_t find(std::int64_t r) const {
        std::size_t pos = 0;
        for (std::size_t step = top_bit_; step > 0; step >>= 1) {
            const std::size_t next = pos + step;
            if (next <= n_ && tree_[next] <= r) {
                pos = next;
                r -= tree_[next];
            }
        }
        return pos;
    }

private:
    std::size_t n_ = 0;
    std::size_t top_bit_ = 1;
    std::int64_t total_ = 0;
    std::vector<std::int64_t> tree_;
    std::vector<std::int64_t> raw_;
};

}  // namespace inclab
