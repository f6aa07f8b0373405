#pragma once

#include <cstdint>
#include <list>
#include <stdexcept>
#include <unordered_map>

namespace trimsearch::disksim {

/// Least-recently-used cache with a fixed entry capacity. A hit refreshes
/// recency but never mutates the stored value.
template <typename Key, typename Value>
class LruCache {
  public:
    explicit LruCache(std::size_t capacity) : capacity_(capacity) {}

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return map_.size(); }

    const Value* get(const Key& key) {
        auto it = map_.find(key);
        if (it == map_.end())
            return nullptr;
        order_.splice(order_.begin(), order_, it->second);
        return &it->second->second;
    }

    bool contains(const Key& key) const { return map_.find(key) != map_.end(); }

    void put(const Key& key, Value value) {
        if (capacity_ == 0)
            return;
        auto it = map_.find(key);
        if (it != map_.end()) {
            order_.splice(order_.begin(), order_, it->second);
            return; // keep the cached content
        }
        if (map_.size() == capacity_) {
            map_.erase(order_.back().first);
            order_.pop_back();
        }
        order_.emplace_front(key, std::move(value));
        map_[key] = order_.begin();
    }

    void clear() {
        map_.clear();
        order_.clear();
    }

  private:
    std::size_t capacity_;
    std::list<std::pair<Key, Value>> order_;
    std::unordered_map<Key, typename std::list<std::pair<Key, Value>>::iterator> map_;
};

} // namespace trimsearch::disksim
