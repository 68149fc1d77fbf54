#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pasm {

using ItemId = int;

/** One observed (item, state) pair. */
struct Observation {
  ItemId item;
  int state;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/**
 * Small set of item ids backed by a bitmask. Items are dense ids in
 * [0, 64); instances beyond that are out of scope for this simulator.
 */
class ItemSet {
 public:
  static constexpr int max_items = 64;

  ItemSet() = default;
  static ItemSet of(std::initializer_list<ItemId> ids) {
    ItemSet s;
    for (ItemId e : ids) s.add(e);
    return s;
  }

  void add(ItemId e) { bits_ |= bit(e); }
  void remove(ItemId e) { bits_ &= ~bit(e); }
  bool contains(ItemId e) const { return (bits_ & bit(e)) != 0; }
  bool empty() const { return bits_ == 0; }
  int size() const { return __builtin_popcountll(bits_); }
  std::uint64_t mask() const { return bits_; }

  ItemSet with(ItemId e) const {
    ItemSet s = *this;
    s.add(e);
    return s;
  }
  ItemSet minus(const ItemSet& other) const {
    ItemSet s;
    s.bits_ = bits_ & ~other.bits_;
    return s;
  }
  ItemSet unite(const ItemSet& other) const {
    ItemSet s;
    s.bits_ = bits_ | other.bits_;
    return s;
  }
  bool subset_of(const ItemSet& other) const {
    return (bits_ & ~other.bits_) == 0;
  }

  /** Member ids in increasing order. */
  std::vector<ItemId> to_vector() const {
    std::vector<ItemId> v;
    v.reserve(size());
    for (std::uint64_t b = bits_; b != 0; b &= b - 1)
      v.push_back(__builtin_ctzll(b));
    return v;
  }

  friend bool operator==(const ItemSet&, const ItemSet&) = default;

 private:
  static std::uint64_t bit(ItemId e) { return std::uint64_t{1} << e; }
  std::uint64_t bits_ = 0;
};

/** Malformed model data (bad probabilities, state labels, sizes). */
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Conditioning on a zero-probability partial realization. */
struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** An enumeration or oracle size cap was exceeded. */
struct EnumerationCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** A utility function could not be evaluated (e.g. tabular miss). */
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Invalid policy or experiment configuration. */
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Malformed instance file or CLI input. */
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pasm
