#pragma once

// Supports and integration windows as disjoint unions of product pieces.

#include <array>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace sw {

inline constexpr int kMaxDim = 12;
using Point = std::array<double, kMaxDim>;
using Rng = std::mt19937_64;

double norm(std::span<const double> x);

/// {inner <= |z| <= outer} in R^dim, optionally intersected with {z_last > 0}.
/// dim == 0 is a single point of unit measure.
struct BallBlock {
  int dim;
  double inner;
  double outer;
  bool upper_half = false;
};

/// [lo, hi] in R.
struct IntervalBlock {
  double lo;
  double hi;
};

using Block = std::variant<BallBlock, IntervalBlock>;

/// Cartesian product of blocks; coordinates are the blocks' coordinates
/// concatenated in order.
class Piece {
 public:
  Piece() = default;
  explicit Piece(std::vector<Block> blocks);

  int dim() const { return dim_; }
  double volume() const { return volume_; }
  bool contains(std::span<const double> x) const;
  bool touches_origin() const;
  /// sup |x| over the piece.
  double outer_radius() const;
  Piece scaled(double s) const;
  /// Uniform sample into out[0, dim).
  void sample(Rng& rng, std::span<double> out) const;
  const std::vector<Block>& blocks() const { return blocks_; }

  static Piece ball(int dim, double inner, double outer, bool upper_half = false) {
    return Piece({BallBlock{dim, inner, outer, upper_half}});
  }

 private:
  std::vector<Block> blocks_;
  int dim_ = 0;
  double volume_ = 0;
};

/// Disjoint union of pieces of a common dimension.
struct Region {
  int dim = 0;
  std::vector<Piece> pieces;

  double volume() const;
  bool contains(std::span<const double> x) const;
  bool touches_origin() const;
  double outer_radius() const;
};

/// Geometric co-annuli {inner 2^j <= |x| <= inner 2^{j+1}} clipped at outer.
std::vector<Piece> geometric_shells(int dim, double inner, double outer, double ratio = 2.0, bool upper_half = false);

enum class SupportKind { Ball, Annulus, Interval, CylinderStack, Tail, HalfSpaceSlab, ShellSlice };

/// Declared support of a trial function: finitely many pieces plus an
/// optional unbounded tail {|x| >= tail_inner}.
class Support {
 public:
  Support(SupportKind kind, int dim, std::vector<Piece> pieces, std::optional<double> tail_inner = std::nullopt);

  SupportKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool bounded() const { return !tail_inner_; }
  std::optional<double> tail_inner() const { return tail_inner_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  bool contains(std::span<const double> x) const;
  bool touches_origin() const;
  /// +inf for unbounded supports.
  double outer_radius() const;
  /// Finite region used for integration; tails are cut at truncation_radius
  /// and split into geometric co-annuli.
  Region region(double truncation_radius) const;
  Support scaled(double s) const;

  /// Radial intervals [a, b] when every piece is a full ball/annulus
  /// (b may be +inf for a tail); empty otherwise.
  std::vector<std::pair<double, double>> radial_intervals() const;

 private:
  SupportKind kind_;
  int dim_;
  std::vector<Piece> pieces_;
  std::optional<double> tail_inner_;
};

}  // namespace sw
