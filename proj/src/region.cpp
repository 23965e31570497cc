#include "region.hpp"

#include "error.hpp"
#include "special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sw {

double norm(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

namespace {

int block_dim(const Block& b) {
  return std::visit(
      [](const auto& blk) -> int {
        if constexpr (std::is_same_v<std::decay_t<decltype(blk)>, BallBlock>)
          return blk.dim;
        else
          return 1;
      },
      b);
}

double block_volume(const Block& b) {
  if (auto* ball = std::get_if<BallBlock>(&b)) {
    if (ball->dim == 0) return 1.0;
    double v = ball_volume(ball->dim) * (std::pow(ball->outer, ball->dim) - std::pow(ball->inner, ball->dim));
    return ball->upper_half ? 0.5 * v : v;
  }
  const auto& iv = std::get<IntervalBlock>(b);
  return iv.hi - iv.lo;
}

void sample_direction(Rng& rng, std::span<double> out) {
  if (out.size() == 1) {
    out[0] = (rng() >> 63) ? 1.0 : -1.0;
    return;
  }
  std::normal_distribution<double> normal;
  double s = 0;
  do {
    s = 0;
    for (double& v : out) {
      v = normal(rng);
      s += v * v;
    }
  } while (s == 0.0);
  s = 1.0 / std::sqrt(s);
  for (double& v : out) v *= s;
}

}  // namespace

Piece::Piece(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  volume_ = 1.0;
  for (const auto& b : blocks_) {
    if (auto* ball = std::get_if<BallBlock>(&b)) {
      if (ball->dim < 0 || !(ball->inner >= 0) || !(ball->outer >= ball->inner))
        fail(ErrorCode::Domain, "ball block needs 0 <= inner <= outer");
      if (ball->upper_half && ball->dim == 0) fail(ErrorCode::Domain, "upper-half block needs dim >= 1");
    } else {
      const auto& iv = std::get<IntervalBlock>(b);
      if (!(iv.hi >= iv.lo)) fail(ErrorCode::Domain, "interval block needs lo <= hi");
    }
    dim_ += block_dim(b);
    volume_ *= block_volume(b);
  }
  if (dim_ > kMaxDim) fail(ErrorCode::Domain, "dimension exceeds " + std::to_string(kMaxDim));
}

bool Piece::contains(std::span<const double> x) const {
  std::size_t off = 0;
  for (const auto& b : blocks_) {
    if (auto* ball = std::get_if<BallBlock>(&b)) {
      auto sub = x.subspan(off, ball->dim);
      off += ball->dim;
      if (ball->dim == 0) continue;
      double r = norm(sub);
      if (r < ball->inner || r > ball->outer) return false;
      if (ball->upper_half && !(sub.back() > 0)) return false;
    } else {
      const auto& iv = std::get<IntervalBlock>(b);
      double v = x[off++];
      if (v < iv.lo || v > iv.hi) return false;
    }
  }
  return true;
}

bool Piece::touches_origin() const {
  for (const auto& b : blocks_) {
    if (auto* ball = std::get_if<BallBlock>(&b)) {
      if (ball->dim > 0 && ball->inner > 0) return false;
    } else {
      const auto& iv = std::get<IntervalBlock>(b);
      if (iv.lo > 0 || iv.hi < 0) return false;
    }
  }
  return true;
}

double Piece::outer_radius() const {
  double s = 0;
  for (const auto& b : blocks_) {
    if (auto* ball = std::get_if<BallBlock>(&b)) {
      if (ball->dim > 0) s += ball->outer * ball->outer;
    } else {
      const auto& iv = std::get<IntervalBlock>(b);
      double m = std::max(std::abs(iv.lo), std::abs(iv.hi));
      s += m * m;
    }
  }
  return std::sqrt(s);
}

Piece Piece::scaled(double s) const {
  std::vector<Block> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    if (auto* ball = std::get_if<BallBlock>(&b))
      out.emplace_back(BallBlock{ball->dim, ball->inner * s, ball->outer * s, ball->upper_half});
    else {
      const auto& iv = std::get<IntervalBlock>(b);
      out.emplace_back(IntervalBlock{iv.lo * s, iv.hi * s});
    }
  }
  return Piece(std::move(out));
}

void Piece::sample(Rng& rng, std::span<double> out) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t off = 0;
  for (const auto& b : blocks_) {
    if (auto* ball = std::get_if<BallBlock>(&b)) {
      if (ball->dim == 0) continue;
      auto sub = out.subspan(off, ball->dim);
      off += ball->dim;
      sample_direction(rng, sub);
      const double d = ball->dim;
      const double lo = std::pow(ball->inner, d), hi = std::pow(ball->outer, d);
      const double rad = std::pow(lo + unif(rng) * (hi - lo), 1.0 / d);
      for (double& v : sub) v *= rad;
      if (ball->upper_half) sub.back() = std::abs(sub.back());
    } else {
      const auto& iv = std::get<IntervalBlock>(b);
      out[off++] = iv.lo + unif(rng) * (iv.hi - iv.lo);
    }
  }
}

double Region::volume() const {
  double v = 0;
  for (const auto& p : pieces) v += p.volume();
  return v;
}

bool Region::contains(std::span<const double> x) const {
  return std::any_of(pieces.begin(), pieces.end(), [&](const Piece& p) { return p.contains(x); });
}

bool Region::touches_origin() const {
  return std::any_of(pieces.begin(), pieces.end(), [](const Piece& p) { return p.touches_origin(); });
}

double Region::outer_radius() const {
  double r = 0;
  for (const auto& p : pieces) r = std::max(r, p.outer_radius());
  return r;
}

std::vector<Piece> geometric_shells(int dim, double inner, double outer, double ratio, bool upper_half) {
  if (!(inner > 0) || !(outer > inner) || !(ratio > 1)) fail(ErrorCode::Domain, "geometric shells need 0 < inner < outer");
  std::vector<Piece> out;
  for (double a = inner; a < outer;) {
    double b = std::min(a * ratio, outer);
    // Absorb a sliver at the end into the previous shell.
    if (outer - b < 1e-9 * outer) b = outer;
    out.push_back(Piece::ball(dim, a, b, upper_half));
    a = b;
  }
  return out;
}

Support::Support(SupportKind kind, int dim, std::vector<Piece> pieces, std::optional<double> tail_inner)
    : kind_(kind), dim_(dim), pieces_(std::move(pieces)), tail_inner_(tail_inner) {
  for (const auto& p : pieces_)
    if (p.dim() != dim_) fail(ErrorCode::Domain, "support piece dimension mismatch");
  if (tail_inner_ && !(*tail_inner_ > 0)) fail(ErrorCode::Domain, "tail support needs a positive inner radius");
}

bool Support::contains(std::span<const double> x) const {
  if (tail_inner_ && norm(x) >= *tail_inner_) return true;
  return std::any_of(pieces_.begin(), pieces_.end(), [&](const Piece& p) { return p.contains(x); });
}

bool Support::touches_origin() const {
  return std::any_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.touches_origin(); });
}

double Support::outer_radius() const {
  if (tail_inner_) return std::numeric_limits<double>::infinity();
  double r = 0;
  for (const auto& p : pieces_) r = std::max(r, p.outer_radius());
  return r;
}

Region Support::region(double truncation_radius) const {
  Region reg{dim_, pieces_};
  if (tail_inner_ && truncation_radius > *tail_inner_)
    for (auto& p : geometric_shells(dim_, *tail_inner_, truncation_radius)) reg.pieces.push_back(std::move(p));
  return reg;
}

Support Support::scaled(double s) const {
  if (!(s > 0)) fail(ErrorCode::Domain, "scale must be > 0");
  std::vector<Piece> ps;
  ps.reserve(pieces_.size());
  for (const auto& p : pieces_) ps.push_back(p.scaled(s));
  std::optional<double> tail;
  if (tail_inner_) tail = *tail_inner_ * s;
  return Support(kind_, dim_, std::move(ps), tail);
}

std::vector<std::pair<double, double>> Support::radial_intervals() const {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : pieces_) {
    if (p.blocks().size() != 1) return {};
    auto* ball = std::get_if<BallBlock>(&p.blocks().front());
    if (!ball || ball->upper_half || ball->dim != dim_) return {};
    out.emplace_back(ball->inner, ball->outer);
  }
  if (tail_inner_) out.emplace_back(*tail_inner_, std::numeric_limits<double>::infinity());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sw
