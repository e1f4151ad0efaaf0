#pragma once

// Minimum E_HP at fixed composition, read off the contact map alone.
//
// The contact graph splits into connected components; beads without any
// contact form a free pool. For each component we tabulate, per number of
// selected beads k, the largest number of induced contacts and how many
// k-subsets reach it. A counting knapsack over components then gives the
// optimum for n_h H beads and its exact degeneracy.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "hpdesign/error.hpp"
#include "hpdesign/lattice.hpp"

namespace hpdesign {

inline constexpr int kMaxComponentSize = 24;

struct MinEhpSolution {
  int n_h = 0;
  int min_ehp = 0;
  std::uint64_t degeneracy = 0;
  /// Present when requested; sorted; at most the requested cap.
  std::optional<std::vector<HpSequence>> witnesses;
};

namespace detail {

struct ProfileEntry {
  int best = -1;  // -1: infeasible
  std::uint64_t count = 0;
};

struct Component {
  std::vector<int> beads;
  std::vector<std::uint32_t> adjacency;  // local neighbour masks
  std::vector<ProfileEntry> profile;     // index k = beads selected
};

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

inline int induced_contacts(const Component& c, std::uint32_t subset) {
  int total = 0;
  for (std::size_t v = 0; v < c.beads.size(); ++v) {
    if (subset >> v & 1u) total += std::popcount(c.adjacency[v] & subset);
  }
  return total / 2;
}

inline void tabulate(Component& c) {
  auto size = c.beads.size();
  c.profile.assign(size + 1, ProfileEntry{});
  std::vector<std::uint8_t> contacts(std::size_t{1} << size, 0);
  for (std::uint32_t subset = 0; subset < (1u << size); ++subset) {
    if (subset != 0) {
      int low = std::countr_zero(subset);
      std::uint32_t rest = subset & (subset - 1);
      contacts[subset] = static_cast<std::uint8_t>(contacts[rest] + std::popcount(c.adjacency[static_cast<std::size_t>(low)] & rest));
    }
    auto& entry = c.profile[static_cast<std::size_t>(std::popcount(subset))];
    int e = contacts[subset];
    if (e > entry.best) {
      entry.best = e;
      entry.count = 1;
    } else if (e == entry.best) {
      ++entry.count;
    }
  }
}

}  // namespace detail

/// Exact min E_HP over all placements of n_h H beads on the contact map,
/// with the number of optimal placements. When max_witnesses > 0, up to that
/// many optimal sequences are returned as well.
inline MinEhpSolution min_ehp_oracle(const ContactMap& cmap, int n_h, std::size_t max_witnesses = 0) {
  const int n = cmap.size();
  if (n_h < 0 || n_h > n) throw Error(Errc::CompositionOutOfRange, "n_h outside [0, N]");
  if (n > 64) throw Error(Errc::TooLarge, "more than 64 beads");

  // Union-find over contacts.
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (auto [i, j] : cmap.pairs()) {
    parent[static_cast<std::size_t>(find(i))] = find(j);
    ++degree[static_cast<std::size_t>(i)];
    ++degree[static_cast<std::size_t>(j)];
  }

  std::vector<int> free_pool;
  std::vector<detail::Component> components;
  std::vector<int> component_of(static_cast<std::size_t>(n), -1);
  std::vector<int> local_index(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    if (degree[static_cast<std::size_t>(v)] == 0) {
      free_pool.push_back(v);
      continue;
    }
    int root = find(v);
    if (component_of[static_cast<std::size_t>(root)] < 0) {
      component_of[static_cast<std::size_t>(root)] = static_cast<int>(components.size());
      components.emplace_back();
    }
    auto& comp = components[static_cast<std::size_t>(component_of[static_cast<std::size_t>(root)])];
    local_index[static_cast<std::size_t>(v)] = static_cast<int>(comp.beads.size());
    comp.beads.push_back(v);
  }
  for (auto& comp : components) {
    if (comp.beads.size() > kMaxComponentSize) {
      throw Error(Errc::ComponentTooLarge,
                  "contact cluster of " + std::to_string(comp.beads.size()) + " beads exceeds " +
                      std::to_string(kMaxComponentSize));
    }
    comp.adjacency.assign(comp.beads.size(), 0);
  }
  for (auto [i, j] : cmap.pairs()) {
    auto& comp = components[static_cast<std::size_t>(component_of[static_cast<std::size_t>(find(i))])];
    auto li = static_cast<std::size_t>(local_index[static_cast<std::size_t>(i)]);
    auto lj = static_cast<std::size_t>(local_index[static_cast<std::size_t>(j)]);
    comp.adjacency[li] |= 1u << lj;
    comp.adjacency[lj] |= 1u << li;
  }
  for (auto& comp : components) detail::tabulate(comp);

  // The free pool behaves as one more component with zero contacts.
  detail::Component pool;
  pool.beads = free_pool;
  pool.profile.resize(free_pool.size() + 1);
  for (int k = 0; k <= static_cast<int>(free_pool.size()); ++k) {
    pool.profile[static_cast<std::size_t>(k)] = {0, detail::binomial(static_cast<int>(free_pool.size()), k)};
  }

  // stages[c][k]: best over the first c parts with k beads selected.
  std::vector<const detail::Component*> parts;
  for (auto& comp : components) parts.push_back(&comp);
  parts.push_back(&pool);
  std::vector<std::vector<detail::ProfileEntry>> stages(parts.size() + 1,
                                                        std::vector<detail::ProfileEntry>(static_cast<std::size_t>(n) + 1));
  stages[0][0] = {0, 1};
  int used = 0;
  for (std::size_t c = 0; c < parts.size(); ++c) {
    const auto& profile = parts[c]->profile;
    int size = static_cast<int>(parts[c]->beads.size());
    for (int k = 0; k <= used; ++k) {
      const auto& prev = stages[c][static_cast<std::size_t>(k)];
      if (prev.best < 0) continue;
      for (int take = 0; take <= size; ++take) {
        const auto& part = profile[static_cast<std::size_t>(take)];
        if (part.best < 0) continue;
        auto& next = stages[c + 1][static_cast<std::size_t>(k + take)];
        int e = prev.best + part.best;
        std::uint64_t mult = prev.count * part.count;
        if (e > next.best) {
          next = {e, mult};
        } else if (e == next.best) {
          next.count += mult;
        }
      }
    }
    used += size;
  }

  MinEhpSolution sol;
  sol.n_h = n_h;
  const auto& final_entry = stages[parts.size()][static_cast<std::size_t>(n_h)];
  sol.min_ehp = -final_entry.best;
  sol.degeneracy = final_entry.count;

  if (max_witnesses > 0) {
    std::vector<HpSequence> found;
    std::vector<std::uint8_t> beads(static_cast<std::size_t>(n), 0);
    // Walk the stages backwards, choosing per-part counts that stay optimal,
    // then expand each part's optimal subsets.
    auto part_subsets = [&](const detail::Component& comp, int take, int best) {
      std::vector<std::uint64_t> subsets;
      if (&comp == &pool) {
        // Every take-subset of the pool, in increasing mask order.
        int size = static_cast<int>(comp.beads.size());
        if (take == 0) return std::vector<std::uint64_t>{0};
        std::uint64_t past_end = size == 64 ? 0 : (1ull << size);
        std::uint64_t s = take == 64 ? ~0ull : (1ull << take) - 1;
        for (;;) {
          subsets.push_back(s);
          if (subsets.size() >= max_witnesses) break;
          std::uint64_t lowbit = s & (~s + 1);
          std::uint64_t ripple = s + lowbit;
          if (ripple == 0) break;
          s = (((s ^ ripple) >> 2) / lowbit) | ripple;  // next subset of equal size
          if (past_end != 0 && s >= past_end) break;
        }
        return subsets;
      }
      for (std::uint32_t subset = 0; subset < (1u << comp.beads.size()); ++subset) {
        if (std::popcount(subset) == take && detail::induced_contacts(comp, subset) == best) {
          subsets.push_back(subset);
        }
      }
      return subsets;
    };
    auto recurse = [&](auto&& self, std::size_t c, int k) -> void {
      if (found.size() >= max_witnesses) return;
      if (c == 0) {
        if (k == 0) found.emplace_back(beads);
        return;
      }
      const auto& comp = *parts[c - 1];
      int target = stages[c][static_cast<std::size_t>(k)].best;
      for (int take = 0; take <= static_cast<int>(comp.beads.size()) && take <= k; ++take) {
        const auto& prev = stages[c - 1][static_cast<std::size_t>(k - take)];
        const auto& part = comp.profile[static_cast<std::size_t>(take)];
        if (prev.best < 0 || part.best < 0 || prev.best + part.best != target) continue;
        for (auto subset : part_subsets(comp, take, part.best)) {
          for (std::size_t v = 0; v < comp.beads.size(); ++v) {
            beads[static_cast<std::size_t>(comp.beads[v])] = static_cast<std::uint8_t>(subset >> v & 1u);
          }
          self(self, c - 1, k - take);
          if (found.size() >= max_witnesses) break;
        }
        for (int b : comp.beads) beads[static_cast<std::size_t>(b)] = 0;
        if (found.size() >= max_witnesses) return;
      }
    };
    recurse(recurse, parts.size(), n_h);
    std::sort(found.begin(), found.end(), [](const HpSequence& a, const HpSequence& b) { return a.str() < b.str(); });
    sol.witnesses = std::move(found);
  }
  return sol;
}

}  // namespace hpdesign
