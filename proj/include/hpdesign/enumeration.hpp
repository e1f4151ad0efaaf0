#pragma once

// Exhaustive ground-truth engines: self-avoiding walk enumeration modulo
// lattice symmetry, exact folding, designability ranking and the Boltzmann
// target population.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "hpdesign/error.hpp"
#include "hpdesign/lattice.hpp"
#include "hpdesign/parallel.hpp"

namespace hpdesign {

inline constexpr int kDefaultStructureLimit = 16;
inline constexpr int kDefaultDesignabilityLimit = 14;
/// Contact maps of walks up to this length fit a 64-bit pair mask
/// (beads at odd separation >= 3: 64 pairs for N = 18).
inline constexpr int kMaxIndexedBeads = 18;

struct FoldResult {
  int min_ehp = 0;
  std::vector<LatticeStructure> ground_states;  // canonical, in canonical order
  bool unique = false;
};

struct DesignabilityRecord {
  std::string moves;  // canonical move-string
  std::uint64_t count = 0;
  LatticeStructure structure() const { return LatticeStructure::parse(moves); }
};

struct DesignabilityTable {
  int n = 0;
  /// Descending by count; ties in canonical move-string order.
  std::vector<DesignabilityRecord> records;
  /// For every sequence mask, the index (into structure_moves) of its
  /// unique ground state, or -1 when the ground state is degenerate.
  std::vector<std::int32_t> unique_structure;
  std::vector<std::string> structure_moves;    // structure order (canonical lexicographic)
  std::uint64_t sequences_with_unique_ground_state = 0;

  const DesignabilityRecord& most_designable() const { return records.front(); }
};

inline void check_structure_limit(int n, int limit, const char* what) {
  if (n < 1) throw Error(Errc::InvalidArgument, std::string(what) + ": N must be >= 1");
  if (n > limit || n > kMaxIndexedBeads) {
    throw Error(Errc::LimitExceeded, std::string(what) + ": N=" + std::to_string(n) + " exceeds limit " +
                                         std::to_string(std::min(limit, kMaxIndexedBeads)));
  }
}

namespace detail {

/// Depth-first walk generator restricted to canonical representatives:
/// the first move is R, the first move that is not R is U. Moves are tried
/// in R, U, L, D order, so walks come out in canonical lexicographic order.
class WalkSearch {
 public:
  explicit WalkSearch(int n) : n_(n), side_(2 * n + 1), grid_(static_cast<std::size_t>(side_ * side_), 0) {
    coords_.resize(static_cast<std::size_t>(n));
    moves_.resize(static_cast<std::size_t>(std::max(0, n - 1)));
  }

  /// Replays a canonical prefix; returns false if it self-intersects.
  bool seed(std::string_view prefix) {
    std::fill(grid_.begin(), grid_.end(), 0);
    depth_ = 0;
    turned_ = false;
    coords_[0] = Point{};
    occupy(Point{}, true);
    for (char c : prefix) {
      int r = move_rank(c);
      Point next = step(coords_[depth_], r);
      if (occupied(next)) return false;
      moves_[depth_] = c;
      ++depth_;
      coords_[depth_] = next;
      occupy(next, true);
      if (r != 0) turned_ = true;
    }
    return true;
  }

  template <class Visitor>
  void run(Visitor&& visit) { recurse(visit); }

 private:
  template <class Visitor>
  void recurse(Visitor& visit) {
    if (depth_ == n_ - 1) {
      visit(std::string_view(moves_.data(), static_cast<std::size_t>(depth_)),
            std::span<const Point>(coords_.data(), static_cast<std::size_t>(n_)));
      return;
    }
    for (int r = 0; r < 4; ++r) {
      if (depth_ == 0 && r != 0) break;       // first move R
      if (!turned_ && (r == 2 || r == 3)) continue;  // first turn is U
      Point next = step(coords_[depth_], r);
      if (occupied(next)) continue;
      bool was_turned = turned_;
      if (r != 0) turned_ = true;
      moves_[depth_] = kMoveChars[static_cast<std::size_t>(r)];
      ++depth_;
      coords_[depth_] = next;
      occupy(next, true);
      recurse(visit);
      occupy(next, false);
      --depth_;
      turned_ = was_turned;
    }
  }

  static Point step(Point p, int r) {
    return Point{p.x + kMoveSteps[static_cast<std::size_t>(r)].x, p.y + kMoveSteps[static_cast<std::size_t>(r)].y};
  }
  std::size_t cell(Point p) const {
    return static_cast<std::size_t>((p.y + n_) * side_ + (p.x + n_));
  }
  bool occupied(Point p) const { return grid_[cell(p)] != 0; }
  void occupy(Point p, bool on) { grid_[cell(p)] = on ? 1 : 0; }

  int n_;
  int side_;
  std::vector<std::uint8_t> grid_;
  std::vector<Point> coords_;
  std::string moves_;
  int depth_ = 0;
  bool turned_ = false;
};

inline std::vector<std::string> canonical_prefixes(int n, int depth) {
  std::vector<std::string> out;
  WalkSearch search(depth + 1);
  search.seed("");
  search.run([&](std::string_view moves, std::span<const Point>) { out.emplace_back(moves); });
  (void)n;
  return out;
}

}  // namespace detail

/// Calls visit(moves, coords) for every canonical structure of n beads, in
/// canonical lexicographic order.
template <class Visitor>
void for_each_structure(int n, Visitor&& visit, int limit = kDefaultStructureLimit) {
  check_structure_limit(n, limit, "enumerate_structures");
  detail::WalkSearch search(n);
  search.seed("");
  search.run(visit);
}

inline std::vector<LatticeStructure> enumerate_structures(int n, int limit = kDefaultStructureLimit) {
  std::vector<LatticeStructure> out;
  for_each_structure(
      n, [&](std::string_view moves, std::span<const Point>) { out.push_back(LatticeStructure::parse(moves)); },
      limit);
  return out;
}

/// Bit positions of the possible contacts of an n-bead square-lattice walk.
class PairTable {
 public:
  explicit PairTable(int n) : n_(n), bit_(static_cast<std::size_t>(n * n), -1) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 3; j < n; j += 2) {
        bit_[static_cast<std::size_t>(i * n + j)] = static_cast<int>(pairs_.size());
        pairs_.emplace_back(i, j);
      }
    }
    if (pairs_.size() > 64) throw Error(Errc::LimitExceeded, "contact pairs do not fit a 64-bit mask");
  }

  int bit(int i, int j) const { return bit_[static_cast<std::size_t>(i * n_ + j)]; }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

  /// Mask of candidate pairs whose beads are both H.
  std::uint64_t hh_mask(std::uint64_t seq) const {
    std::uint64_t m = 0;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      auto [i, j] = pairs_[k];
      m |= (((seq >> i) & (seq >> j)) & 1ull) << k;
    }
    return m;
  }

  std::uint64_t mask_of(const ContactMap& cmap) const {
    std::uint64_t m = 0;
    for (auto [i, j] : cmap.pairs()) {
      int b = bit(i, j);
      if (b < 0) throw Error(Errc::InvalidContact, "contact with even chain separation");
      m |= 1ull << b;
    }
    return m;
  }

 private:
  int n_;
  std::vector<int> bit_;
  std::vector<std::pair<int, int>> pairs_;
};

/// All canonical n-bead structures with their contact maps, grouped into
/// classes of identical contact map. Energy is a function of the contact
/// map alone, so folding scans classes instead of structures.
class StructureIndex {
 public:
  explicit StructureIndex(int n) : n_(n), pairs_(n) {
    // Enumerate in parallel over canonical prefixes; merge in prefix order.
    int depth = std::min(n - 1, 7);
    auto prefixes = detail::canonical_prefixes(n, depth);
    std::vector<std::vector<std::uint64_t>> codes(prefixes.size());
    std::vector<std::vector<std::uint64_t>> masks(prefixes.size());
    parallel_for(
        prefixes.size(),
        [&](std::size_t p) {
          detail::WalkSearch search(n);
          if (!search.seed(prefixes[p])) return;
          search.run([&](std::string_view moves, std::span<const Point> coords) {
            codes[p].push_back(pack(moves));
            masks[p].push_back(contact_mask(coords));
          });
        },
        1);
    for (std::size_t p = 0; p < prefixes.size(); ++p) {
      codes_.insert(codes_.end(), codes[p].begin(), codes[p].end());
      masks_.insert(masks_.end(), masks[p].begin(), masks[p].end());
    }

    std::vector<std::uint32_t> order(codes_.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      int pa = std::popcount(masks_[a]);
      int pb = std::popcount(masks_[b]);
      if (pa != pb) return pa > pb;
      if (masks_[a] != masks_[b]) return masks_[a] < masks_[b];
      return a < b;
    });
    members_ = order;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k == 0 || masks_[order[k]] != masks_[order[k - 1]]) {
        group_mask_.push_back(masks_[order[k]]);
        group_pop_.push_back(static_cast<std::uint8_t>(std::popcount(masks_[order[k]])));
        group_begin_.push_back(static_cast<std::uint32_t>(k));
      }
    }
    group_begin_.push_back(static_cast<std::uint32_t>(order.size()));
  }

  int beads() const noexcept { return n_; }
  std::size_t structure_count() const noexcept { return codes_.size(); }
  std::size_t class_count() const noexcept { return group_mask_.size(); }
  const PairTable& pair_table() const noexcept { return pairs_; }

  std::string moves(std::size_t idx) const {
    std::string s(static_cast<std::size_t>(n_ - 1), 'R');
    for (int i = 0; i < n_ - 1; ++i) s[static_cast<std::size_t>(i)] = kMoveChars[(codes_[idx] >> (2 * i)) & 3u];
    return s;
  }
  std::uint64_t contact_mask(std::size_t idx) const { return masks_[idx]; }

  /// Exact fold of a sequence given as a bead mask.
  FoldResult fold(std::uint64_t seq) const {
    std::uint64_t hh = pairs_.hh_mask(seq);
    int best = -1;
    std::vector<std::uint32_t> winners;
    for (std::size_t g = 0; g < group_mask_.size(); ++g) {
      if (group_pop_[g] < best) break;
      int e = std::popcount(group_mask_[g] & hh);
      if (e > best) {
        best = e;
        winners.clear();
      }
      if (e == best) {
        winners.insert(winners.end(), members_.begin() + group_begin_[g], members_.begin() + group_begin_[g + 1]);
      }
    }
    std::sort(winners.begin(), winners.end());
    FoldResult r;
    r.min_ehp = -best;
    r.unique = winners.size() == 1;
    r.ground_states.reserve(winners.size());
    for (auto w : winners) r.ground_states.push_back(LatticeStructure::parse(moves(w)));
    return r;
  }

  /// Structure index of the unique ground state, or -1 when degenerate.
  std::int32_t unique_ground_state(std::uint64_t seq) const {
    std::uint64_t hh = pairs_.hh_mask(seq);
    int ceiling = std::popcount(hh);
    int best = -1;
    std::uint64_t ties = 0;
    std::size_t which = 0;
    for (std::size_t g = 0; g < group_mask_.size(); ++g) {
      if (group_pop_[g] < best) break;
      int e = std::popcount(group_mask_[g] & hh);
      if (e > best) {
        best = e;
        ties = group_begin_[g + 1] - group_begin_[g];
        which = g;
      } else if (e == best) {
        ties += group_begin_[g + 1] - group_begin_[g];
      }
      if (best == ceiling && ties >= 2) return -1;
    }
    return ties == 1 ? static_cast<std::int32_t>(members_[group_begin_[which]]) : -1;
  }

  /// Boltzmann weights summed per energy level: (E_HP, number of structures).
  std::map<int, std::uint64_t> energy_histogram(std::uint64_t seq) const {
    std::uint64_t hh = pairs_.hh_mask(seq);
    std::map<int, std::uint64_t> hist;
    for (std::size_t g = 0; g < group_mask_.size(); ++g) {
      hist[-std::popcount(group_mask_[g] & hh)] += group_begin_[g + 1] - group_begin_[g];
    }
    return hist;
  }

 private:
  std::uint64_t pack(std::string_view moves) const {
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < moves.size(); ++i) code |= static_cast<std::uint64_t>(move_rank(moves[i])) << (2 * i);
    return code;
  }

  std::uint64_t contact_mask(std::span<const Point> coords) const {
    std::uint64_t m = 0;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 3; j < n_; j += 2) {
        int dx = coords[static_cast<std::size_t>(i)].x - coords[static_cast<std::size_t>(j)].x;
        int dy = coords[static_cast<std::size_t>(i)].y - coords[static_cast<std::size_t>(j)].y;
        if (std::abs(dx) + std::abs(dy) == 1) m |= 1ull << pairs_.bit(i, j);
      }
    }
    return m;
  }

  int n_;
  PairTable pairs_;
  std::vector<std::uint64_t> codes_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::uint64_t> group_mask_;
  std::vector<std::uint8_t> group_pop_;
  std::vector<std::uint32_t> group_begin_;
  std::vector<std::uint32_t> members_;
};

/// Process-wide cache; indexes are immutable once built.
inline std::shared_ptr<const StructureIndex> structure_index(int n, int limit = kDefaultStructureLimit) {
  check_structure_limit(n, limit, "structure_index");
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const StructureIndex>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const StructureIndex>(n);
  return slot;
}

inline FoldResult fold_sequence(const HpSequence& seq, int limit = kDefaultStructureLimit) {
  auto index = structure_index(seq.size(), limit);
  return index->fold(seq.mask());
}

inline DesignabilityTable designability(int n, int limit = kDefaultDesignabilityLimit) {
  check_structure_limit(n, limit, "designability");
  auto index = structure_index(n, std::max(limit, n));
  DesignabilityTable table;
  table.n = n;
  std::size_t sequences = std::size_t{1} << n;
  table.unique_structure.assign(sequences, -1);
  parallel_for(
      sequences, [&](std::size_t s) { table.unique_structure[s] = index->unique_ground_state(s); }, 256);

  std::vector<std::uint64_t> counts(index->structure_count(), 0);
  for (auto u : table.unique_structure) {
    if (u >= 0) {
      ++counts[static_cast<std::size_t>(u)];
      ++table.sequences_with_unique_ground_state;
    }
  }
  table.structure_moves.reserve(index->structure_count());
  for (std::size_t i = 0; i < index->structure_count(); ++i) table.structure_moves.push_back(index->moves(i));

  std::vector<std::uint32_t> order(index->structure_count());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  // Structure order is already canonical lexicographic, so a stable sort by
  // count gives the required tie-break.
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return counts[a] > counts[b]; });
  table.records.reserve(order.size());
  for (auto i : order) table.records.push_back(DesignabilityRecord{table.structure_moves[i], counts[i]});
  return table;
}

/// Head of the designability ranking, memoized per N.
inline LatticeStructure most_designable(int n, int limit = kDefaultDesignabilityLimit) {
  check_structure_limit(n, limit, "most_designable");
  static std::mutex mutex;
  static std::map<int, std::string> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return LatticeStructure::parse(it->second);
  }
  auto table = designability(n, limit);
  std::lock_guard lock(mutex);
  cache[n] = table.most_designable().moves;
  return LatticeStructure::parse(cache[n]);
}

/// exp(-beta E(target)) / sum_C exp(-beta E(C)), one term per canonical
/// structure class.
inline double target_population(const HpSequence& seq, const LatticeStructure& target, double beta,
                                int limit = kDefaultStructureLimit) {
  if (seq.size() != static_cast<int>(target.size())) throw Error(Errc::LengthMismatch, "sequence/target length");
  if (beta < 0) throw Error(Errc::InvalidArgument, "beta must be nonnegative");
  auto index = structure_index(seq.size(), limit);
  auto hist = index->energy_histogram(seq.mask());
  int e_target = hp_energy(contact_map(target), seq);
  int e_min = hist.begin()->first;
  double z = 0.0;
  for (auto [e, count] : hist) z += static_cast<double>(count) * std::exp(-beta * (e - e_min));
  return std::exp(-beta * (e_target - e_min)) / z;
}

}  // namespace hpdesign
