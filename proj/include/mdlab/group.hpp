#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mdlab/errors.hpp"

namespace mdlab {

enum class GroupKind : std::uint8_t { Free, Zn, Finite, SL2Z, SL2ZSemidirect };

std::string_view kind_name(GroupKind kind);

// Canonical form of a group element. The meaning of `data` depends on kind:
//   Free            reduced word, letter i+1 for generator i and -(i+1) for its inverse
//   Zn              integer coordinates
//   Finite          a single table index
//   SL2Z            row-major entries a, b, c, d
//   SL2ZSemidirect  a, b, c, d, v1, v2 for the pair (A, v)
// The default ordering is length-then-lexicographic on `data`, which is the
// canonical enumeration order inside each sphere of a ball.
struct Element {
  GroupKind kind = GroupKind::Free;
  std::vector<std::int64_t> data;

  bool operator==(const Element&) const = default;
  std::strong_ordering operator<=>(const Element& other) const;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept;
};

class Group;
struct Ball;

// Resource caps fixed at construction.
struct GroupLimits {
  std::size_t max_ball_size = 2'000'000;
  // BFS radius explored by word_length on realizations without a normal form.
  std::size_t length_horizon = 14;
};

// Normal subgroup Gamma, quotient map q and a lifting sigma with q(sigma(x)) = x.
struct QuotientStructure {
  std::shared_ptr<const Group> quotient;
  std::shared_ptr<const Group> kernel;
  std::function<bool(const Element&)> in_kernel;
  std::function<Element(const Element&)> project;
  std::function<Element(const Element&)> lift;
  // Gamma realization -> G, and its inverse on elements of Gamma.
  std::function<Element(const Element&)> embed_kernel;
  std::function<Element(const Element&)> kernel_coordinates;
};

// A finitely generated group with exact element arithmetic.
//
// Instances are immutable after construction except for the internal BFS
// length cache, which is guarded by a mutex so concurrent readers are safe.
class Group : public std::enable_shared_from_this<Group> {
 public:
  virtual ~Group() = default;

  virtual GroupKind kind() const = 0;
  virtual std::string name() const = 0;
  virtual Element identity() const = 0;
  virtual Element multiply(const Element& a, const Element& b) const = 0;
  virtual Element inverse(const Element& a) const = 0;
  virtual std::string to_string(const Element& a) const = 0;
  virtual Element parse(std::string_view text) const = 0;
  // Throws ValidationError if `a` is not a canonical element of this realization.
  virtual void validate(const Element& a) const = 0;
  virtual std::optional<std::size_t> order() const { return std::nullopt; }
  virtual const QuotientStructure* quotient() const { return nullptr; }

  const std::vector<Element>& generators() const { return generators_; }

  // Word length with respect to generators(). Closed form where the
  // realization has a normal form, BFS distance otherwise (throws
  // HorizonError beyond the configured horizon).
  std::size_t word_length(const Element& t) const;

  // Deterministic BFS enumeration of {t : l(t) <= radius}.
  Ball ball(std::size_t radius) const;

  const GroupLimits& limits() const { return limits_; }

 protected:
  // Realizations with a normal form override this; nullopt means "use BFS".
  virtual std::optional<std::size_t> closed_form_length(const Element&) const {
    return std::nullopt;
  }
  explicit Group(GroupLimits limits) : limits_(limits) {}
  void check_same(const Element& a) const;

  std::vector<Element> generators_;

 private:
  void extend_bfs_cache(std::size_t radius) const;

  GroupLimits limits_;

  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<Element, std::size_t, ElementHash> length_cache_;
  mutable std::vector<Element> cache_frontier_;
  mutable std::size_t cache_radius_ = 0;
  mutable bool cache_started_ = false;
};

using GroupPtr = std::shared_ptr<const Group>;

// Elements with l(t) <= radius in canonical order, identity first.
struct Ball {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  GroupPtr group;
  std::size_t radius = 0;
  std::vector<Element> elements;
  std::vector<std::size_t> lengths;
  // adjacency[i][g] = index of elements[i] * generators()[g], or npos if outside.
  std::vector<std::vector<std::size_t>> adjacency;
  std::unordered_map<Element, std::size_t, ElementHash> index;

  std::size_t size() const { return elements.size(); }
  std::optional<std::size_t> find(const Element& t) const;
  // Number of elements with length <= r.
  std::size_t prefix_size(std::size_t r) const;
};

GroupPtr make_free_group(std::size_t rank, GroupLimits limits = {});
GroupPtr make_zn(std::size_t n, GroupLimits limits = {});
// Multiplication table: table[i][j] = index of g_i g_j. Generators default to
// every non-identity element.
GroupPtr make_finite_group(std::vector<std::vector<std::size_t>> table,
                           std::optional<std::vector<std::size_t>> generators = std::nullopt,
                           GroupLimits limits = {});
GroupPtr make_cyclic_group(std::size_t n, GroupLimits limits = {});
GroupPtr make_sl2z(GroupLimits limits = {});
GroupPtr make_sl2z_semidirect(GroupLimits limits = {});

// Convenience constructors for canonical elements.
Element free_word(std::initializer_list<std::int64_t> letters);
Element zn_element(std::vector<std::int64_t> coords);
Element sl2z_element(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d);
Element semidirect_element(const Element& matrix, std::int64_t v1, std::int64_t v2);

// (q(t), sigma(q(t))^{-1} t) for realizations carrying a quotient structure.
struct CosetDecomposition {
  Element coset;       // element of G / Gamma
  Element kernel_part; // element of the Gamma realization
};
CosetDecomposition quotient_and_lift(const Group& g, const Element& t);

// An injective homomorphism from `sub` into `ambient`.
struct Embedding {
  GroupPtr sub;
  GroupPtr ambient;
  std::function<Element(const Element&)> map;
};

// <generator> ~= Z inside a free group.
Embedding cyclic_subgroup(const GroupPtr& free_group, std::size_t generator);
// Z^2 = {(I, v)} inside SL(2,Z) x| Z^2.
Embedding lattice_subgroup(const GroupPtr& semidirect);

}  // namespace mdlab

template <>
struct std::hash<mdlab::Element> : mdlab::ElementHash {};
