#include "tvind/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tvind {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kDeriveC0 = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kDeriveC1 = 0x8CB92BA72F3D8DD7ULL;

// SplitMix64 finalizer; passes BigCrush as a counter-mode generator.
inline std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Seed Seed::from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.empty() || hex.size() > 32) throw std::invalid_argument("Seed: expected 1..32 hex digits");
  Seed s;
  for (char c : hex) {
    std::uint64_t digit;
    if (c >= '0' && c <= '9') digit = static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') digit = static_cast<std::uint64_t>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') digit = static_cast<std::uint64_t>(c - 'A' + 10);
    else throw std::invalid_argument("Seed: bad hex digit");
    s.hi = (s.hi << 4) | (s.lo >> 60);
    s.lo = (s.lo << 4) | digit;
  }
  return s;
}

std::string Seed::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out(32, '0');
  std::uint64_t h = hi, l = lo;
  for (int i = 31; i >= 16; --i) {
    out[static_cast<std::size_t>(i)] = digits[l & 0xF];
    l >>= 4;
  }
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

Tape::Tape(Seed seed) : s0_(mix(seed.lo ^ kDeriveC0)), s1_(mix(seed.hi + kDeriveC1)) {}

Tape Tape::derive(std::uint64_t label) const {
  Tape child;
  child.s0_ = mix(s0_ ^ mix(label * kGolden + kDeriveC0));
  child.s1_ = mix(s1_ + mix(label ^ kDeriveC1));
  return child;
}

Tape Tape::derive(std::string_view label) const { return derive(fnv1a(label)); }

std::uint64_t Tape::bits(std::uint64_t index) const {
  std::uint64_t z = mix(s0_ + index * kGolden);
  return mix(z ^ s1_);
}

double Tape::uniform(std::uint64_t index) const {
  return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
}

std::uint32_t poisson_one_count(double u) {
  // CDF inversion for Poisson(1): p_k = e^-1 / k!.
  double term = std::exp(-1.0);
  double cum = term;
  std::uint32_t k = 0;
  while (u >= cum && k < 64) {
    ++k;
    term /= static_cast<double>(k);
    cum += term;
  }
  return k;
}

PoissonStripStream::PoissonStripStream(Tape tape, FiniteDistribution reference)
    : tape_(tape.derive("poisson-strip")), reference_(std::move(reference)) {
  if (reference_.size() == 0) throw std::invalid_argument("PoissonStripStream: empty reference");
}

const std::vector<PoissonAtom>& PoissonStripStream::window_atoms(std::uint32_t strip,
                                                                 std::uint64_t window) const {
  const auto key = std::make_pair(strip, window);
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cells_.find(key);
  if (it != cells_.end()) return it->second;

  const Tape cell = tape_.derive(strip).derive(window);
  const std::uint32_t count = poisson_one_count(cell.uniform(0));
  std::vector<PoissonAtom> atoms;
  atoms.reserve(count);
  // Fixed three-draw budget per atom keeps replay alignment trivial.
  for (std::uint32_t i = 0; i < count; ++i) {
    PoissonAtom a;
    a.t = static_cast<double>(window) + cell.uniform(1 + 3ull * i);
    a.y = static_cast<double>(strip) + cell.uniform(2 + 3ull * i);
    const ItemId id = reference_.sample(cell.uniform(3 + 3ull * i));
    const auto& sup = reference_.support();
    a.ref_index =
        static_cast<std::uint32_t>(std::lower_bound(sup.begin(), sup.end(), id) - sup.begin());
    a.strip = strip;
    a.order = i;
    atoms.push_back(a);
  }
  std::sort(atoms.begin(), atoms.end(), [](const PoissonAtom& a, const PoissonAtom& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.order < b.order;
  });
  return cells_.emplace(key, std::move(atoms)).first->second;
}

Dataset draw_dataset(const FiniteDistribution& examples, std::size_t n, TapeCursor& cursor) {
  Dataset out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(example_of(examples.sample(cursor.next_uniform())));
  }
  return out;
}

}  // namespace tvind
