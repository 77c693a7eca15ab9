// Concrete group realizations.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <sstream>

#include "checked_int.hpp"
#include "mdlab/group.hpp"

namespace mdlab {

using detail::checked_add;
using detail::checked_dot2;
using detail::checked_neg;

namespace {

// Every signed integer appearing in `text`, in order.
std::vector<std::int64_t> scan_integers(std::string_view text) {
  std::vector<std::int64_t> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const bool sign = text[i] == '-' || text[i] == '+';
    const std::size_t start = i;
    std::size_t j = sign ? i + 1 : i;
    if (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      std::int64_t value = 0;
      const char* first = text.data() + start + (text[start] == '+' ? 1 : 0);
      auto [ptr, ec] = std::from_chars(first, text.data() + j, value);
      if (ec != std::errc{}) throw ValidationError("integer out of range in '" + std::string(text) + "'");
      out.push_back(value);
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

std::string join_ints(const std::int64_t* first, std::size_t n) {
  std::ostringstream os;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) os << ',';
    os << first[i];
  }
  return os.str();
}

// ---------------------------------------------------------------- free group

class FreeGroup final : public Group {
 public:
  FreeGroup(std::size_t rank, GroupLimits limits) : Group(limits), rank_(rank) {
    if (rank == 0 || rank > 26) throw ValidationError("free group rank must be in 1..26");
    for (std::size_t i = 0; i < rank; ++i) {
      const auto g = static_cast<std::int64_t>(i + 1);
      generators_.push_back({GroupKind::Free, {g}});
      generators_.push_back({GroupKind::Free, {-g}});
    }
  }

  GroupKind kind() const override { return GroupKind::Free; }
  std::string name() const override { return "F_" + std::to_string(rank_); }
  Element identity() const override { return {GroupKind::Free, {}}; }

  Element multiply(const Element& a, const Element& b) const override {
    check_same(a);
    check_same(b);
    std::vector<std::int64_t> w = a.data;
    for (auto x : b.data) {
      if (!w.empty() && w.back() == -x) {
        w.pop_back();
      } else {
        w.push_back(x);
      }
    }
    return {GroupKind::Free, std::move(w)};
  }

  Element inverse(const Element& a) const override {
    check_same(a);
    std::vector<std::int64_t> w(a.data.rbegin(), a.data.rend());
    for (auto& x : w) x = -x;
    return {GroupKind::Free, std::move(w)};
  }

  std::string to_string(const Element& a) const override {
    if (a.data.empty()) return "e";
    std::string s;
    for (auto x : a.data) {
      const char base = x > 0 ? 'a' : 'A';
      s.push_back(static_cast<char>(base + (x > 0 ? x : -x) - 1));
    }
    return s;
  }

  Element parse(std::string_view text) const override {
    Element out{GroupKind::Free, {}};
    if (text == "e") return out;
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      std::int64_t letter = 0;
      if (c >= 'a' && c <= 'z') letter = c - 'a' + 1;
      else if (c >= 'A' && c <= 'Z') letter = -(c - 'A' + 1);
      else throw ValidationError("bad free-group letter '" + std::string(1, c) + "'");
      if (static_cast<std::size_t>(letter > 0 ? letter : -letter) > rank_) {
        throw ValidationError("letter '" + std::string(1, c) + "' exceeds rank of " + name());
      }
      out = multiply(out, Element{GroupKind::Free, {letter}});
    }
    return out;
  }

  void validate(const Element& a) const override {
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      const auto x = a.data[i];
      if (x == 0 || static_cast<std::size_t>(x > 0 ? x : -x) > rank_) {
        throw ValidationError("invalid letter in element of " + name());
      }
      if (i > 0 && a.data[i - 1] == -x) throw ValidationError("word is not freely reduced");
    }
  }

 protected:
  std::optional<std::size_t> closed_form_length(const Element& a) const override {
    return a.data.size();
  }

 private:
  std::size_t rank_;
};

// ---------------------------------------------------------------------- Z^n

class ZnGroup final : public Group {
 public:
  ZnGroup(std::size_t n, GroupLimits limits) : Group(limits), n_(n) {
    if (n == 0) throw ValidationError("Z^n needs n >= 1");
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::int64_t> plus(n, 0), minus(n, 0);
      plus[i] = 1;
      minus[i] = -1;
      generators_.push_back({GroupKind::Zn, std::move(plus)});
      generators_.push_back({GroupKind::Zn, std::move(minus)});
    }
  }

  GroupKind kind() const override { return GroupKind::Zn; }
  std::string name() const override { return "Z^" + std::to_string(n_); }
  Element identity() const override { return {GroupKind::Zn, std::vector<std::int64_t>(n_, 0)}; }

  Element multiply(const Element& a, const Element& b) const override {
    check_same(a);
    check_same(b);
    Element r{GroupKind::Zn, a.data};
    for (std::size_t i = 0; i < n_; ++i) r.data[i] = checked_add(r.data[i], b.data[i]);
    return r;
  }

  Element inverse(const Element& a) const override {
    check_same(a);
    Element r{GroupKind::Zn, a.data};
    for (auto& x : r.data) x = checked_neg(x);
    return r;
  }

  std::string to_string(const Element& a) const override {
    return "(" + join_ints(a.data.data(), a.data.size()) + ")";
  }

  Element parse(std::string_view text) const override {
    Element r{GroupKind::Zn, scan_integers(text)};
    validate(r);
    return r;
  }

  void validate(const Element& a) const override {
    if (a.data.size() != n_) throw ValidationError("element has wrong dimension for " + name());
  }

 protected:
  std::optional<std::size_t> closed_form_length(const Element& a) const override {
    std::size_t l = 0;
    for (auto x : a.data) l += static_cast<std::size_t>(x < 0 ? -x : x);
    return l;
  }

 private:
  std::size_t n_;
};

// ------------------------------------------------------------- finite group

class FiniteGroup final : public Group {
 public:
  FiniteGroup(std::vector<std::vector<std::size_t>> table,
              std::optional<std::vector<std::size_t>> gens, GroupLimits limits)
      : Group(limits), table_(std::move(table)) {
    const std::size_t n = table_.size();
    if (n == 0) throw ValidationError("empty multiplication table");
    for (const auto& row : table_) {
      if (row.size() != n) throw ValidationError("multiplication table is not square");
      for (auto x : row) {
        if (x >= n) throw ValidationError("multiplication table entry out of range");
      }
    }
    std::optional<std::size_t> e;
    for (std::size_t i = 0; i < n && !e; ++i) {
      bool ok = true;
      for (std::size_t j = 0; j < n && ok; ++j) ok = table_[i][j] == j && table_[j][i] == j;
      if (ok) e = i;
    }
    if (!e) throw ValidationError("multiplication table has no identity");
    identity_ = *e;
    inverse_.assign(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (table_[i][j] == identity_ && table_[j][i] == identity_) inverse_[i] = j;
      }
      if (inverse_[i] == n) throw ValidationError("element without inverse in table");
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t c = 0; c < n; ++c) {
          if (table_[table_[a][b]][c] != table_[a][table_[b][c]]) {
            throw ValidationError("multiplication table is not associative");
          }
        }
      }
    }
    std::vector<std::size_t> g;
    if (gens) {
      g = *gens;
      for (auto x : g) {
        if (x >= n) throw ValidationError("generator index out of range");
        if (x == identity_) throw ValidationError("generating set contains the identity");
      }
      for (auto x : std::vector<std::size_t>(g)) {
        if (std::find(g.begin(), g.end(), inverse_[x]) == g.end()) g.push_back(inverse_[x]);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (i != identity_) g.push_back(i);
      }
    }
    std::sort(g.begin(), g.end());
    for (auto x : g) generators_.push_back(make(x));
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{identity_};
    seen[identity_] = true;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (auto x : g) {
        const std::size_t b = table_[a][x];
        if (!seen[b]) {
          seen[b] = true;
          stack.push_back(b);
        }
      }
    }
    if (std::count(seen.begin(), seen.end(), true) != static_cast<std::ptrdiff_t>(n)) {
      throw ValidationError("generators do not generate the group");
    }
  }

  GroupKind kind() const override { return GroupKind::Finite; }
  std::string name() const override { return "finite(" + std::to_string(table_.size()) + ")"; }
  Element identity() const override { return make(identity_); }
  std::optional<std::size_t> order() const override { return table_.size(); }

  Element multiply(const Element& a, const Element& b) const override {
    check_same(a);
    check_same(b);
    return make(table_[idx(a)][idx(b)]);
  }

  Element inverse(const Element& a) const override {
    check_same(a);
    return make(inverse_[idx(a)]);
  }

  std::string to_string(const Element& a) const override { return "g" + std::to_string(a.data.at(0)); }

  Element parse(std::string_view text) const override {
    auto v = scan_integers(text);
    if (v.size() != 1 || v[0] < 0) throw ValidationError("bad finite-group element '" + std::string(text) + "'");
    Element r = make(static_cast<std::size_t>(v[0]));
    validate(r);
    return r;
  }

  void validate(const Element& a) const override {
    if (a.data.size() != 1 || a.data[0] < 0 || static_cast<std::size_t>(a.data[0]) >= table_.size()) {
      throw ValidationError("element index out of range for " + name());
    }
  }

 private:
  static Element make(std::size_t i) { return {GroupKind::Finite, {static_cast<std::int64_t>(i)}}; }
  static std::size_t idx(const Element& a) { return static_cast<std::size_t>(a.data[0]); }

  std::vector<std::vector<std::size_t>> table_;
  std::vector<std::size_t> inverse_;
  std::size_t identity_ = 0;
};

// ----------------------------------------------------------------- SL(2,Z)

using Mat2 = std::array<std::int64_t, 4>;

Mat2 mat_mul(const Mat2& x, const Mat2& y) {
  return {checked_dot2(x[0], y[0], x[1], y[2]), checked_dot2(x[0], y[1], x[1], y[3]),
          checked_dot2(x[2], y[0], x[3], y[2]), checked_dot2(x[2], y[1], x[3], y[3])};
}

Mat2 mat_inv(const Mat2& x) { return {x[3], checked_neg(x[1]), checked_neg(x[2]), x[0]}; }

void check_det(const std::int64_t* m) {
  std::int64_t d;
  std::int64_t p, q;
  if (__builtin_mul_overflow(m[0], m[3], &p) || __builtin_mul_overflow(m[1], m[2], &q) ||
      __builtin_sub_overflow(p, q, &d) || d != 1) {
    throw ValidationError("matrix does not have determinant 1");
  }
}

std::string mat_string(const std::int64_t* m) {
  std::ostringstream os;
  os << "[[" << m[0] << ',' << m[1] << "],[" << m[2] << ',' << m[3] << "]]";
  return os.str();
}

const std::array<Mat2, 4> kSl2Generators = {Mat2{1, 1, 0, 1}, Mat2{1, -1, 0, 1},
                                            Mat2{0, -1, 1, 0}, Mat2{0, 1, -1, 0}};

class Sl2zGroup final : public Group {
 public:
  explicit Sl2zGroup(GroupLimits limits) : Group(limits) {
    for (const auto& g : kSl2Generators) generators_.push_back(make(g));
  }

  GroupKind kind() const override { return GroupKind::SL2Z; }
  std::string name() const override { return "SL(2,Z)"; }
  Element identity() const override { return make({1, 0, 0, 1}); }

  Element multiply(const Element& a, const Element& b) const override {
    check_same(a);
    check_same(b);
    return make(mat_mul(get(a), get(b)));
  }

  Element inverse(const Element& a) const override {
    check_same(a);
    return make(mat_inv(get(a)));
  }

  std::string to_string(const Element& a) const override { return mat_string(a.data.data()); }

  Element parse(std::string_view text) const override {
    Element r{GroupKind::SL2Z, scan_integers(text)};
    validate(r);
    return r;
  }

  void validate(const Element& a) const override {
    if (a.data.size() != 4) throw ValidationError("SL(2,Z) element needs 4 entries");
    check_det(a.data.data());
  }

  static Element make(const Mat2& m) { return {GroupKind::SL2Z, {m[0], m[1], m[2], m[3]}}; }
  static Mat2 get(const Element& a) { return {a.data[0], a.data[1], a.data[2], a.data[3]}; }
};

// ------------------------------------------------------ SL(2,Z) x| Z^2

class SemidirectGroup final : public Group {
 public:
  explicit SemidirectGroup(GroupLimits limits)
      : Group(limits), sl2_(std::make_shared<Sl2zGroup>(limits)), lattice_(make_zn(2, limits)) {
    for (const auto& g : kSl2Generators) generators_.push_back(make(g, 0, 0));
    generators_.push_back(make({1, 0, 0, 1}, 1, 0));
    generators_.push_back(make({1, 0, 0, 1}, -1, 0));
    generators_.push_back(make({1, 0, 0, 1}, 0, 1));
    generators_.push_back(make({1, 0, 0, 1}, 0, -1));

    quotient_.quotient = sl2_;
    quotient_.kernel = lattice_;
    quotient_.in_kernel = [](const Element& t) {
      return t.data[0] == 1 && t.data[1] == 0 && t.data[2] == 0 && t.data[3] == 1;
    };
    quotient_.project = [](const Element& t) {
      return Element{GroupKind::SL2Z, {t.data[0], t.data[1], t.data[2], t.data[3]}};
    };
    quotient_.lift = [](const Element& a) {
      if (a.kind != GroupKind::SL2Z) throw ValidationError("lift expects an SL(2,Z) element");
      return make(Sl2zGroup::get(a), 0, 0);
    };
    quotient_.embed_kernel = [](const Element& v) {
      if (v.kind != GroupKind::Zn || v.data.size() != 2) throw ValidationError("kernel element must lie in Z^2");
      return make({1, 0, 0, 1}, v.data[0], v.data[1]);
    };
    quotient_.kernel_coordinates = [](const Element& t) {
      return Element{GroupKind::Zn, {t.data[4], t.data[5]}};
    };
  }

  GroupKind kind() const override { return GroupKind::SL2ZSemidirect; }
  std::string name() const override { return "SL(2,Z)xZ^2"; }
  Element identity() const override { return make({1, 0, 0, 1}, 0, 0); }
  const QuotientStructure* quotient() const override { return &quotient_; }

  // (A, v)(B, w) = (AB, v + A w)
  Element multiply(const Element& a, const Element& b) const override {
    check_same(a);
    check_same(b);
    const Mat2 A = mat(a), B = mat(b);
    const Mat2 AB = mat_mul(A, B);
    const auto& v = a.data;
    const auto& w = b.data;
    const std::int64_t x = checked_add(v[4], checked_dot2(A[0], w[4], A[1], w[5]));
    const std::int64_t y = checked_add(v[5], checked_dot2(A[2], w[4], A[3], w[5]));
    return make(AB, x, y);
  }

  // (A, v)^{-1} = (A^{-1}, -A^{-1} v)
  Element inverse(const Element& a) const override {
    check_same(a);
    const Mat2 Ai = mat_inv(mat(a));
    const std::int64_t x = checked_neg(checked_dot2(Ai[0], a.data[4], Ai[1], a.data[5]));
    const std::int64_t y = checked_neg(checked_dot2(Ai[2], a.data[4], Ai[3], a.data[5]));
    return make(Ai, x, y);
  }

  std::string to_string(const Element& a) const override {
    return "(" + mat_string(a.data.data()) + ",(" + join_ints(a.data.data() + 4, 2) + "))";
  }

  Element parse(std::string_view text) const override {
    Element r{GroupKind::SL2ZSemidirect, scan_integers(text)};
    validate(r);
    return r;
  }

  void validate(const Element& a) const override {
    if (a.data.size() != 6) throw ValidationError("semidirect element needs 6 entries");
    check_det(a.data.data());
  }

  static Element make(const Mat2& m, std::int64_t x, std::int64_t y) {
    return {GroupKind::SL2ZSemidirect, {m[0], m[1], m[2], m[3], x, y}};
  }
  static Mat2 mat(const Element& a) { return {a.data[0], a.data[1], a.data[2], a.data[3]}; }

 private:
  std::shared_ptr<const Group> sl2_;
  std::shared_ptr<const Group> lattice_;
  QuotientStructure quotient_;
};

}  // namespace

GroupPtr make_free_group(std::size_t rank, GroupLimits limits) {
  return std::make_shared<FreeGroup>(rank, limits);
}

GroupPtr make_zn(std::size_t n, GroupLimits limits) { return std::make_shared<ZnGroup>(n, limits); }

GroupPtr make_finite_group(std::vector<std::vector<std::size_t>> table,
                           std::optional<std::vector<std::size_t>> generators, GroupLimits limits) {
  return std::make_shared<FiniteGroup>(std::move(table), std::move(generators), limits);
}

GroupPtr make_cyclic_group(std::size_t n, GroupLimits limits) {
  if (n == 0) throw ValidationError("cyclic group order must be positive");
  std::vector<std::vector<std::size_t>> table(n, std::vector<std::size_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) table[i][j] = (i + j) % n;
  }
  std::optional<std::vector<std::size_t>> gens;
  if (n > 1) gens = std::vector<std::size_t>{1};
  return make_finite_group(std::move(table), gens, limits);
}

GroupPtr make_sl2z(GroupLimits limits) { return std::make_shared<Sl2zGroup>(limits); }

GroupPtr make_sl2z_semidirect(GroupLimits limits) { return std::make_shared<SemidirectGroup>(limits); }

Element free_word(std::initializer_list<std::int64_t> letters) {
  Element r{GroupKind::Free, {}};
  for (auto x : letters) {
    if (!r.data.empty() && r.data.back() == -x) {
      r.data.pop_back();
    } else {
      r.data.push_back(x);
    }
  }
  return r;
}

Element zn_element(std::vector<std::int64_t> coords) { return {GroupKind::Zn, std::move(coords)}; }

Element sl2z_element(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  return {GroupKind::SL2Z, {a, b, c, d}};
}

Element semidirect_element(const Element& matrix, std::int64_t v1, std::int64_t v2) {
  if (matrix.kind != GroupKind::SL2Z || matrix.data.size() != 4) {
    throw ValidationError("semidirect_element expects an SL(2,Z) matrix");
  }
  const auto& m = matrix.data;
  return {GroupKind::SL2ZSemidirect, {m[0], m[1], m[2], m[3], v1, v2}};
}

Embedding cyclic_subgroup(const GroupPtr& free_group, std::size_t generator) {
  if (!free_group || free_group->kind() != GroupKind::Free) {
    throw ValidationError("cyclic_subgroup expects a free group");
  }
  if (2 * generator >= free_group->generators().size()) throw ValidationError("generator index out of range");
  const auto letter = static_cast<std::int64_t>(generator + 1);
  Embedding emb;
  emb.sub = make_zn(1);
  emb.ambient = free_group;
  emb.map = [letter](const Element& n) {
    if (n.kind != GroupKind::Zn || n.data.size() != 1) throw ValidationError("expected an element of Z");
    const std::int64_t k = n.data[0];
    Element w{GroupKind::Free, std::vector<std::int64_t>(static_cast<std::size_t>(k < 0 ? -k : k),
                                                         k < 0 ? -letter : letter)};
    return w;
  };
  return emb;
}

Embedding lattice_subgroup(const GroupPtr& semidirect) {
  if (!semidirect || semidirect->quotient() == nullptr) {
    throw ValidationError("lattice_subgroup expects SL(2,Z) x| Z^2");
  }
  const QuotientStructure* qs = semidirect->quotient();
  return {qs->kernel, semidirect, qs->embed_kernel};
}

}  // namespace mdlab
