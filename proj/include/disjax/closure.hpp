#pragma once

#include <cstdint>
#include <vector>

#include "disjax/errors.hpp"
#include "disjax/iri.hpp"
#include "disjax/knowledge_base.hpp"

namespace disjax {

/// Fixed-width bit set sized at construction.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t bits)
      : bits_(bits), words_((bits + 63) / 64, 0) {}

  std::size_t size() const { return bits_; }

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }

  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1;
  }

  void or_with(const Bitset& other) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
  }

  bool intersects(const Bitset& other) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if (words_[w] & other.words_[w]) return true;
    }
    return false;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
  }

  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = __builtin_ctzll(bits);
        fn((w << 6) + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }

  bool operator==(const Bitset&) const = default;

 private:
  std::size_t bits_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Reflexive-transitive closure of the subclass relation. `ancestors_of(c)`
/// is the set of superclasses of c including c itself; `descendants_of(c)` is
/// the transpose. Subclass cycles collapse into mutual sub/superclassing.
class SubclassClosure {
 public:
  static SubclassClosure compute(const KnowledgeBase& kb) {
    const std::size_t n = kb.class_count();
    SubclassClosure cl;
    cl.up_.assign(n, Bitset(n));
    cl.down_.assign(n, Bitset(n));

    std::vector<std::vector<std::uint32_t>> parents(n);
    for (const auto& [child, parent] : kb.subclass_edges()) {
      parents[child.value].push_back(parent.value);
    }

    // Tarjan SCC, iterative. Components are emitted successors-first, so by
    // the time a component is finalized every parent component's reach row is
    // already complete.
    std::vector<std::int64_t> index(n, -1);
    std::vector<std::int64_t> lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::int64_t next_index = 0;

    struct Frame {
      std::uint32_t node;
      std::size_t edge = 0;
    };
    std::vector<Frame> dfs;

    for (std::uint32_t root = 0; root < n; ++root) {
      if (index[root] != -1) continue;
      dfs.push_back({root});
      while (!dfs.empty()) {
        Frame& fr = dfs.back();
        const std::uint32_t v = fr.node;
        if (fr.edge == 0) {
          index[v] = lowlink[v] = next_index++;
          stack.push_back(v);
          on_stack[v] = true;
        }
        bool descended = false;
        while (fr.edge < parents[v].size()) {
          const std::uint32_t w = parents[v][fr.edge];
          ++fr.edge;
          if (index[w] == -1) {
            dfs.push_back({w});
            descended = true;
            break;
          }
          if (on_stack[w] && index[w] < lowlink[v]) lowlink[v] = index[w];
        }
        if (descended) continue;
        if (lowlink[v] == index[v]) {
          // v closes a component: fold member rows together with all parents.
          std::vector<std::uint32_t> members;
          while (true) {
            const std::uint32_t w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            members.push_back(w);
            if (w == v) break;
          }
          Bitset reach(n);
          for (std::uint32_t m : members) {
            reach.set(m);
            for (std::uint32_t p : parents[m]) {
              if (!reach.test(p)) reach.or_with(cl.up_[p]);
              reach.set(p);
            }
          }
          for (std::uint32_t m : members) cl.up_[m] = reach;
        }
        dfs.pop_back();
        if (!dfs.empty()) {
          Frame& parent_frame = dfs.back();
          if (lowlink[v] < lowlink[parent_frame.node]) {
            lowlink[parent_frame.node] = lowlink[v];
          }
        }
      }
    }

    for (std::uint32_t c = 0; c < n; ++c) {
      cl.up_[c].for_each_set([&](std::size_t anc) {
        cl.down_[anc].set(c);
      });
    }
    return cl;
  }

  std::size_t size() const { return up_.size(); }

  /// True iff `descendant` ⊑ `ancestor`.
  bool reaches(ClassId descendant, ClassId ancestor) const {
    return up_[descendant.value].test(ancestor.value);
  }

  const Bitset& ancestors_of(ClassId c) const { return up_[c.value]; }
  const Bitset& descendants_of(ClassId c) const { return down_[c.value]; }

 private:
  std::vector<Bitset> up_;
  std::vector<Bitset> down_;
};

}  // namespace disjax
