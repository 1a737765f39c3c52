// Copyright 2026 The Qeyboard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qeyboard::service {

/// An item popped from a FrameQueue plus the number of items dropped
/// immediately before it.
template <class T> struct Queued {
    T item;
    std::uint64_t dropped_before = 0;
};

/// Bounded FIFO that drops its oldest entry on overflow. Drops are charged to
/// the next item handed out, so consumers see where the gap is.
template <class T> class FrameQueue {
  public:
    explicit FrameQueue(std::size_t capacity = 64) : capacity_(capacity) {
        if (capacity == 0) {
            throw std::invalid_argument("queue capacity must be positive");
        }
    }

    std::size_t capacity() const { return capacity_; }

    /// Returns true if an old entry was dropped to make room.
    bool push(T item) {
        std::lock_guard lock(mu_);
        bool dropped = false;
        if (items_.size() == capacity_) {
            pending_gap_ += 1 + items_.front().dropped_before;
            items_.pop_front();
            total_dropped_ += 1;
            dropped = true;
        }
        items_.push_back({std::move(item), 0});
        if (pending_gap_ > 0) {
            // The gap sits before the new oldest entry.
            items_.front().dropped_before += pending_gap_;
            pending_gap_ = 0;
        }
        return dropped;
    }

    std::optional<Queued<T>> pop() {
        std::lock_guard lock(mu_);
        if (items_.empty()) {
            return std::nullopt;
        }
        auto q = std::move(items_.front());
        items_.pop_front();
        return q;
    }

    std::vector<Queued<T>> drain() {
        std::lock_guard lock(mu_);
        std::vector<Queued<T>> out(std::make_move_iterator(items_.begin()), std::make_move_iterator(items_.end()));
        items_.clear();
        return out;
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return items_.size();
    }

    std::uint64_t total_dropped() const {
        std::lock_guard lock(mu_);
        return total_dropped_;
    }

  private:
    std::size_t capacity_;
    mutable std::mutex mu_;
    std::deque<Queued<T>> items_;
    std::uint64_t pending_gap_ = 0;
    std::uint64_t total_dropped_ = 0;
};

}  // namespace qeyboard::service
