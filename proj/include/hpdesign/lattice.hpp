#pragma once

// 2D square-lattice HP model: structures, sequences, contact maps and the
// energies evaluated on them.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hpdesign/error.hpp"
#include "hpdesign/rational.hpp"

namespace hpdesign {

struct Point {
  int x = 0;
  int y = 0;
  auto operator<=>(const Point&) const = default;
};

/// Moves are ranked counter-clockwise, R < U < L < D. This rank order is the
/// order used for "lexicographic" comparisons of move-strings everywhere: it
/// makes the smallest element of a symmetry orbit the one that starts with R
/// and first turns U.
inline constexpr std::array<char, 4> kMoveChars = {'R', 'U', 'L', 'D'};
inline constexpr std::array<Point, 4> kMoveSteps = {Point{1, 0}, Point{0, 1}, Point{-1, 0}, Point{0, -1}};

inline int move_rank(char c) {
  switch (c) {
    case 'R': return 0;
    case 'U': return 1;
    case 'L': return 2;
    case 'D': return 3;
    default: return -1;
  }
}

inline bool move_string_less(std::string_view a, std::string_view b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](char x, char y) { return move_rank(x) < move_rank(y); });
}

/// A self-avoiding walk, stored as its move-string. Coordinates start at the
/// origin and are derived on construction.
class LatticeStructure {
 public:
  LatticeStructure() : coords_{Point{}} {}

  /// Validates the move alphabet and self-avoidance.
  static LatticeStructure parse(std::string_view moves) {
    LatticeStructure s;
    s.moves_.assign(moves.begin(), moves.end());
    s.coords_.reserve(moves.size() + 1);
    std::unordered_map<std::int64_t, int> seen;
    seen.emplace(key(Point{}), 0);
    Point p{};
    for (std::size_t i = 0; i < moves.size(); ++i) {
      int r = move_rank(moves[i]);
      if (r < 0) {
        throw Error(Errc::InvalidCharacter,
                    std::string("move '") + moves[i] + "' at position " + std::to_string(i), static_cast<std::int64_t>(i));
      }
      p = Point{p.x + kMoveSteps[r].x, p.y + kMoveSteps[r].y};
      int bead = static_cast<int>(i) + 1;
      if (!seen.emplace(key(p), bead).second) {
        throw Error(Errc::SelfIntersection, "bead " + std::to_string(bead) + " revisits a lattice site", bead);
      }
      s.coords_.push_back(p);
    }
    return s;
  }

  const std::string& moves() const noexcept { return moves_; }
  std::span<const Point> coords() const noexcept { return coords_; }
  std::size_t size() const noexcept { return coords_.size(); }

  bool operator==(const LatticeStructure& other) const { return moves_ == other.moves_; }

 private:
  static std::int64_t key(Point p) {
    return (static_cast<std::int64_t>(p.x) << 32) ^ static_cast<std::uint32_t>(p.y);
  }

  std::string moves_;
  std::vector<Point> coords_;
};

/// Non-consecutive contact pairs (i, j), i < j, kept sorted and unique.
class ContactMap {
 public:
  ContactMap() = default;

  ContactMap(int n, std::vector<std::pair<int, int>> pairs) : n_(n), pairs_(std::move(pairs)) {
    if (n < 0) throw Error(Errc::InvalidArgument, "negative bead count");
    for (auto& [i, j] : pairs_) {
      if (i > j) std::swap(i, j);
      if (i < 0 || j >= n) {
        throw Error(Errc::InvalidContact, "pair (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
      }
      if (j <= i + 1) {
        throw Error(Errc::InvalidContact,
                    "pair (" + std::to_string(i) + "," + std::to_string(j) + ") is consecutive along the chain");
      }
    }
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
  }

  int size() const noexcept { return n_; }
  const std::vector<std::pair<int, int>>& pairs() const noexcept { return pairs_; }
  bool contains(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(pairs_.begin(), pairs_.end(), std::pair{i, j});
  }
  /// True when every contact joins beads at odd chain separation, as every
  /// map derived from a square-lattice walk does.
  bool lattice_parity() const {
    return std::all_of(pairs_.begin(), pairs_.end(), [](auto p) { return (p.second - p.first) % 2 == 1; });
  }

  bool operator==(const ContactMap&) const = default;

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> pairs_;
};

/// Binary HP sequence; bead value 1 = H, 0 = P.
class HpSequence {
 public:
  HpSequence() = default;
  explicit HpSequence(std::vector<std::uint8_t> beads) : beads_(std::move(beads)) {
    for (auto b : beads_) {
      if (b > 1) throw Error(Errc::InvalidArgument, "bead value must be 0 or 1");
    }
  }

  static HpSequence parse(std::string_view text) {
    std::vector<std::uint8_t> beads;
    beads.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      if (c == 'H' || c == 'h') {
        beads.push_back(1);
      } else if (c == 'P' || c == 'p') {
        beads.push_back(0);
      } else {
        throw Error(Errc::InvalidCharacter, std::string("sequence letter '") + c + "'", static_cast<std::int64_t>(i));
      }
    }
    return HpSequence(std::move(beads));
  }

  /// Bit i of `mask` is bead i.
  static HpSequence from_mask(std::uint64_t mask, int n) {
    std::vector<std::uint8_t> beads(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) beads[i] = static_cast<std::uint8_t>((mask >> i) & 1u);
    return HpSequence(std::move(beads));
  }

  std::uint64_t mask() const {
    if (beads_.size() > 64) throw Error(Errc::TooLarge, "sequence longer than 64 beads has no mask form");
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < beads_.size(); ++i) m |= static_cast<std::uint64_t>(beads_[i]) << i;
    return m;
  }

  std::string str() const {
    std::string s;
    s.reserve(beads_.size());
    for (auto b : beads_) s.push_back(b ? 'H' : 'P');
    return s;
  }

  int size() const noexcept { return static_cast<int>(beads_.size()); }
  int n_h() const noexcept { return static_cast<int>(std::count(beads_.begin(), beads_.end(), std::uint8_t{1})); }
  bool is_h(int i) const { return beads_[static_cast<std::size_t>(i)] != 0; }
  std::span<const std::uint8_t> beads() const noexcept { return beads_; }

  auto operator<=>(const HpSequence&) const = default;

 private:
  std::vector<std::uint8_t> beads_;
};

struct DesignEnergyModel {
  ContactMap cmap;
  Rational lambda{0};
  int n_h = 0;

  DesignEnergyModel() = default;
  DesignEnergyModel(ContactMap c, Rational l, int target_h) : cmap(std::move(c)), lambda(l), n_h(target_h) {
    if (lambda < 0) throw Error(Errc::InvalidArgument, "lambda must be nonnegative");
    if (n_h < 0 || n_h > cmap.size()) throw Error(Errc::CompositionOutOfRange, "N_H outside [0, N]");
  }

  int size() const noexcept { return cmap.size(); }
};

inline ContactMap contact_map(const LatticeStructure& s) {
  auto coords = s.coords();
  std::unordered_map<std::int64_t, int> site;
  auto key = [](Point p) { return (static_cast<std::int64_t>(p.x) << 32) ^ static_cast<std::uint32_t>(p.y); };
  for (std::size_t i = 0; i < coords.size(); ++i) site.emplace(key(coords[i]), static_cast<int>(i));
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (auto step : kMoveSteps) {
      auto it = site.find(key(Point{coords[i].x + step.x, coords[i].y + step.y}));
      if (it == site.end()) continue;
      int j = it->second;
      if (j > static_cast<int>(i) + 1) pairs.emplace_back(static_cast<int>(i), j);
    }
  }
  return ContactMap(static_cast<int>(coords.size()), std::move(pairs));
}

/// E_HP = -(number of HH contacts).
inline int hp_energy(const ContactMap& cmap, const HpSequence& seq) {
  if (seq.size() != cmap.size()) {
    throw Error(Errc::LengthMismatch,
                "sequence has " + std::to_string(seq.size()) + " beads, contact map " + std::to_string(cmap.size()));
  }
  int hh = 0;
  for (auto [i, j] : cmap.pairs()) hh += (seq.is_h(i) && seq.is_h(j)) ? 1 : 0;
  return -hh;
}

/// -sum w_ij s_i s_j + lambda (sum s_i - N_H)^2, exactly.
inline Rational design_energy(const DesignEnergyModel& model, const HpSequence& seq) {
  int ehp = hp_energy(model.cmap, seq);
  std::int64_t excess = seq.n_h() - model.n_h;
  return Rational(ehp) + model.lambda * Rational(excess * excess);
}

/// The eight images of a move-string under the square's symmetry group
/// (rotations by k*90deg, optionally preceded by the reflection y -> -y).
inline std::array<std::string, 8> dihedral_move_images(std::string_view moves) {
  std::array<std::string, 8> out;
  for (int reflect = 0; reflect < 2; ++reflect) {
    for (int rot = 0; rot < 4; ++rot) {
      std::string& img = out[static_cast<std::size_t>(reflect * 4 + rot)];
      img.resize(moves.size());
      for (std::size_t i = 0; i < moves.size(); ++i) {
        int r = move_rank(moves[i]);
        if (reflect) r = (4 - r) % 4;
        img[i] = kMoveChars[static_cast<std::size_t>((r + rot) % 4)];
      }
    }
  }
  return out;
}

/// Smallest move-string (in R<U<L<D order) among the eight symmetry images.
inline LatticeStructure canonicalize(const LatticeStructure& s) {
  auto images = dihedral_move_images(s.moves());
  auto best = std::min_element(images.begin(), images.end(), [](const std::string& a, const std::string& b) {
    return move_string_less(a, b);
  });
  if (*best == s.moves()) return s;
  return LatticeStructure::parse(*best);
}

inline bool is_canonical(std::string_view moves) {
  for (const auto& img : dihedral_move_images(moves)) {
    if (move_string_less(img, moves)) return false;
  }
  return true;
}

}  // namespace hpdesign
