#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <utility>
#include <vector>

namespace madil {

// Pull-based lazy stream. next() yields items until exhaustion.
// Streams are single-pass; wrap in Memo<T> for random access.
template <typename T>
class Stream {
 public:
  using Puller = std::function<std::optional<T>()>;

  Stream() : pull_([] { return std::optional<T>{}; }) {}
  explicit Stream(Puller p) : pull_(std::move(p)) {}

  std::optional<T> next() { return pull_(); }

  static Stream empty() { return Stream(); }

  static Stream single(T v) {
    auto cell = std::make_shared<std::optional<T>>(std::move(v));
    return Stream([cell]() {
      std::optional<T> out;
      cell->swap(out);
      return out;
    });
  }

  static Stream of(std::vector<T> xs) {
    auto data = std::make_shared<std::vector<T>>(std::move(xs));
    auto idx = std::make_shared<size_t>(0);
    return Stream([data, idx]() -> std::optional<T> {
      if (*idx >= data->size()) return std::nullopt;
      return (*data)[(*idx)++];
    });
  }

  // Concatenation of a lazily produced sequence of streams.
  static Stream chain(Stream<Stream<T>> outer) {
    auto state = std::make_shared<std::pair<Stream<Stream<T>>, std::optional<Stream<T>>>>(
        std::move(outer), std::nullopt);
    return Stream([state]() -> std::optional<T> {
      for (;;) {
        if (!state->second) {
          auto s = state->first.next();
          if (!s) return std::nullopt;
          state->second = std::move(*s);
        }
        if (auto v = state->second->next()) return v;
        state->second.reset();
      }
    });
  }

  template <typename F>
  auto map(F f) && {
    using U = decltype(f(std::declval<T>()));
    auto self = std::make_shared<Stream>(std::move(*this));
    auto fn = std::make_shared<F>(std::move(f));
    return Stream<U>([self, fn]() -> std::optional<U> {
      if (auto v = self->next()) return (*fn)(std::move(*v));
      return std::nullopt;
    });
  }

  template <typename F>
  Stream filter(F f) && {
    auto self = std::make_shared<Stream>(std::move(*this));
    auto fn = std::make_shared<F>(std::move(f));
    return Stream([self, fn]() -> std::optional<T> {
      while (auto v = self->next())
        if ((*fn)(*v)) return v;
      return std::nullopt;
    });
  }

  std::vector<T> take(size_t n) {
    std::vector<T> out;
    while (out.size() < n) {
      auto v = next();
      if (!v) break;
      out.push_back(std::move(*v));
    }
    return out;
  }

 private:
  Puller pull_;
};

// Caches the prefix of a stream for indexed access.
template <typename T>
class Memo {
 public:
  Memo() = default;
  explicit Memo(Stream<T> s) : src_(std::make_shared<State>(std::move(s))) {}

  // Pointer valid until the next call; nullptr once exhausted before i.
  const T* get(size_t i) const {
    auto& st = *src_;
    while (!st.done && st.items.size() <= i) {
      if (auto v = st.src.next())
        st.items.push_back(std::move(*v));
      else
        st.done = true;
    }
    return i < st.items.size() ? &st.items[i] : nullptr;
  }

  size_t known_size() const { return src_->items.size(); }

 private:
  struct State {
    explicit State(Stream<T> s) : src(std::move(s)) {}
    Stream<T> src;
    std::vector<T> items;
    bool done = false;
  };
  std::shared_ptr<State> src_;
};

// Sorted Cartesian product by rank: yields index tuples over k component
// streams in non-decreasing rank-sum order (ties: lexicographic). Component
// streams may be infinite. With per-item costs, the same frontier search
// yields tuples in non-decreasing cost-sum order provided every component
// stream is itself sorted by cost.
template <typename T>
class SortedProduct {
 public:
  // cost(item) must be monotone along each component stream. A null cost
  // orders tuples by rank sum (sum of component stream positions).
  SortedProduct(std::vector<Memo<T>> comps, std::function<double(const T&)> cost)
      : comps_(std::move(comps)), cost_(std::move(cost)) {
    std::vector<size_t> zero(comps_.size(), 0);
    push(zero);
  }

  // Yields (items, total cost).
  std::optional<std::pair<std::vector<T>, double>> next() {
    while (!pq_.empty()) {
      auto top = pq_.top();
      pq_.pop();
      const auto& idx = top.second;
      // Successors first so the frontier stays complete even when this
      // tuple turns out valid.
      for (size_t i = 0; i < idx.size(); ++i) {
        auto nxt = idx;
        ++nxt[i];
        push(nxt);
      }
      std::vector<T> items;
      items.reserve(idx.size());
      bool ok = true;
      for (size_t i = 0; i < idx.size(); ++i) {
        const T* p = comps_[i].get(idx[i]);
        if (!p) { ok = false; break; }
        items.push_back(*p);
      }
      if (ok) return std::make_pair(std::move(items), top.first.first);
    }
    return std::nullopt;
  }

 private:
  using Key = std::pair<double, std::vector<size_t>>;  // (cost sum, lex tie)
  struct Cmp {
    bool operator()(const std::pair<Key, std::vector<size_t>>& a,
                    const std::pair<Key, std::vector<size_t>>& b) const {
      return b.first < a.first;  // min-heap
    }
  };

  void push(const std::vector<size_t>& idx) {
    if (!seen_.insert(idx).second) return;
    double c = 0;
    for (size_t i = 0; i < idx.size(); ++i) {
      const T* p = comps_[i].get(idx[i]);
      if (!p) return;  // exhausted component: all larger tuples invalid too
      c += cost_ ? cost_(*p) : static_cast<double>(idx[i]);
    }
    pq_.push({{c, idx}, idx});
  }

  std::vector<Memo<T>> comps_;
  std::function<double(const T&)> cost_;
  std::priority_queue<std::pair<Key, std::vector<size_t>>,
                      std::vector<std::pair<Key, std::vector<size_t>>>, Cmp>
      pq_;
  std::set<std::vector<size_t>> seen_;
};

// Stream adapter over SortedProduct.
template <typename T>
Stream<std::pair<std::vector<T>, double>> sorted_product_stream(
    std::vector<Memo<T>> comps, std::function<double(const T&)> cost) {
  auto prod = std::make_shared<SortedProduct<T>>(std::move(comps), std::move(cost));
  return Stream<std::pair<std::vector<T>, double>>(
      [prod]() { return prod->next(); });
}

// Merges sorted streams by a key function; ties resolved by seed order.
template <typename T>
Stream<T> merge_by_key(std::vector<Stream<T>> sources, std::function<double(const T&)> key) {
  struct Entry {
    double k;
    size_t src;
    T item;
  };
  struct State {
    std::vector<Stream<T>> sources;
    std::function<double(const T&)> key;
    std::multimap<std::pair<double, size_t>, T> heap;
  };
  auto st = std::make_shared<State>();
  st->sources = std::move(sources);
  st->key = std::move(key);
  for (size_t i = 0; i < st->sources.size(); ++i) {
    if (auto v = st->sources[i].next())
      st->heap.emplace(std::make_pair(st->key(*v), i), std::move(*v));
  }
  return Stream<T>([st]() -> std::optional<T> {
    if (st->heap.empty()) return std::nullopt;
    auto it = st->heap.begin();
    size_t src = it->first.second;
    T out = std::move(it->second);
    st->heap.erase(it);
    if (auto v = st->sources[src].next())
      st->heap.emplace(std::make_pair(st->key(*v), src), std::move(*v));
    return out;
  });
}

}  // namespace madil
