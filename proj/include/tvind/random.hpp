#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tvind/core.hpp"

namespace tvind {

/// 128-bit seed for a root tape, accepted as hex on the CLI.
struct Seed {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  static Seed from_hex(std::string_view hex);
  std::string to_hex() const;
  bool operator==(const Seed&) const = default;
};

/// Replayable, path-addressed randomness source.
///
/// A tape is a pure value: draw `index` of tape (seed, path) is the same on
/// every platform and every replay. Distinct paths give computationally
/// independent streams. All derivation and drawing is counter-based; there is
/// no mutable generator state.
class Tape {
 public:
  Tape() : Tape(Seed{}) {}
  explicit Tape(Seed seed);

  /// Child tape with the path extended by an integer label.
  Tape derive(std::uint64_t label) const;
  /// Child tape with the path extended by a string label.
  Tape derive(std::string_view label) const;

  /// Raw 64 bits of draw `index`.
  std::uint64_t bits(std::uint64_t index) const;
  /// Draw `index` mapped to [0, 1) with 53-bit resolution.
  double uniform(std::uint64_t index) const;

  bool operator==(const Tape&) const = default;

 private:
  std::uint64_t s0_ = 0;
  std::uint64_t s1_ = 0;
};

/// Sequential reader over a tape. Also models UniformRandomBitGenerator so
/// standard distributions can consume tape draws.
class TapeCursor {
 public:
  explicit TapeCursor(Tape tape) : tape_(tape) {}

  std::uint64_t next_bits() { return tape_.bits(next_++); }
  double next_uniform() { return tape_.uniform(next_++); }

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }
  result_type operator()() { return next_bits(); }

 private:
  Tape tape_;
  std::uint64_t next_ = 0;
};

/// One point of the strip-layered Poisson process.
struct PoissonAtom {
  std::uint32_t ref_index = 0;  // index into the reference support
  double y = 0.0;               // in [strip, strip+1)
  double t = 0.0;               // in [window, window+1)
  std::uint32_t strip = 0;
  std::uint32_t order = 0;  // draw order inside the cell, for tie-breaking
};

/// Lazily realized Poisson point process with intensity
/// reference x Leb(y) x Leb(t), partitioned into unit cells
/// [j, j+1) x [m, m+1).
///
/// Atom generation for a cell depends only on (tape, reference, j, m): the
/// cell count is Poisson(1) by CDF inversion from one uniform, then each atom
/// takes (t, y, h) from three consecutive draws of the cell substream. No
/// target density ever enters generation, which is what the privacy argument
/// of the coupling consumers needs.
///
/// Cells are memoized behind a mutex; window_atoms is idempotent and safe
/// under concurrent invocation.
class PoissonStripStream {
 public:
  PoissonStripStream(Tape tape, FiniteDistribution reference);

  /// Sorted-by-t atom list of cell (strip j, window m).
  const std::vector<PoissonAtom>& window_atoms(std::uint32_t strip, std::uint64_t window) const;

  const FiniteDistribution& reference() const { return reference_; }
  const Tape& tape() const { return tape_; }

 private:
  Tape tape_;
  FiniteDistribution reference_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::uint32_t, std::uint64_t>, std::vector<PoissonAtom>> cells_;
};

/// Inverse-CDF Poisson(1) count from a single uniform draw.
std::uint32_t poisson_one_count(double u);

/// Draws n examples from a distribution over example ids.
Dataset draw_dataset(const FiniteDistribution& examples, std::size_t n, TapeCursor& cursor);

}  // namespace tvind
