#pragma once
#include <cstddef>
#include <utility>

namespace util {
namespace detail {
inline std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b9u + (h << 6) + (h >> 2)); }
}  // namespace detail

template <class Key, class Value>
class FlatMap {
public:
    using value_type = std::pair<Key, Value>;

    Value* find(const Key& k) {
        for (auto& e : items_)
            if (e.first == k)
                return &e.second;
        return nullptr;
    }

    void clear() noexcept { items_.clear(); size_ = 0; }

private:
    value_type* items_ = nullptr;
    std::size_t size_ = 0;
};

}  // namespace util
