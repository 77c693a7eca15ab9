#include "mdlab/group.hpp"

#include <algorithm>

namespace mdlab {

std::string_view kind_name(GroupKind kind) {
  switch (kind) {
    case GroupKind::Free: return "free";
    case GroupKind::Zn: return "zn";
    case GroupKind::Finite: return "finite";
    case GroupKind::SL2Z: return "sl2z";
    case GroupKind::SL2ZSemidirect: return "sl2z_semidirect";
  }
  return "unknown";
}

namespace {

// Free letters sort as a < A < b < B < ...
std::int64_t letter_key(GroupKind kind, std::int64_t x) {
  if (kind != GroupKind::Free) return x;
  const std::int64_t g = x > 0 ? x : -x;
  return 2 * (g - 1) + (x < 0 ? 1 : 0);
}

}  // namespace

std::strong_ordering Element::operator<=>(const Element& other) const {
  if (auto c = kind <=> other.kind; c != 0) return c;
  if (auto c = data.size() <=> other.data.size(); c != 0) return c;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto a = letter_key(kind, data[i]);
    const auto b = letter_key(kind, other.data[i]);
    if (auto c = a <=> b; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::size_t ElementHash::operator()(const Element& e) const noexcept {
  std::size_t h = static_cast<std::size_t>(e.kind) * 0x9e3779b97f4a7c15ULL;
  for (auto x : e.data) {
    h ^= std::hash<std::int64_t>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::optional<std::size_t> Ball::find(const Element& t) const {
  auto it = index.find(t);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::size_t Ball::prefix_size(std::size_t r) const {
  return static_cast<std::size_t>(
      std::upper_bound(lengths.begin(), lengths.end(), r) - lengths.begin());
}

void Group::check_same(const Element& a) const {
  if (a.kind != kind()) {
    throw ValidationError("element of kind '" + std::string(kind_name(a.kind)) +
                          "' used with group " + name());
  }
  validate(a);
}

void Group::extend_bfs_cache(std::size_t radius) const {
  if (!cache_started_) {
    const Element e = identity();
    length_cache_.emplace(e, 0);
    cache_frontier_ = {e};
    cache_radius_ = 0;
    cache_started_ = true;
  }
  while (cache_radius_ < radius && !cache_frontier_.empty()) {
    std::vector<Element> next;
    for (const auto& t : cache_frontier_) {
      for (const auto& s : generators_) {
        Element u = multiply(t, s);
        if (length_cache_.emplace(u, cache_radius_ + 1).second) next.push_back(std::move(u));
      }
    }
    if (length_cache_.size() > limits_.max_ball_size) {
      throw ResourceError("BFS length cache exceeded the ball size cap for " + name());
    }
    cache_frontier_ = std::move(next);
    ++cache_radius_;
  }
}

std::size_t Group::word_length(const Element& t) const {
  check_same(t);
  if (auto l = closed_form_length(t)) return *l;
  std::lock_guard lock(cache_mutex_);
  if (!cache_started_) extend_bfs_cache(0);
  while (true) {
    if (auto it = length_cache_.find(t); it != length_cache_.end()) return it->second;
    if (cache_radius_ >= limits_.length_horizon || cache_frontier_.empty()) break;
    extend_bfs_cache(cache_radius_ + 1);
  }
  throw HorizonError("element " + to_string(t) + " lies beyond the BFS horizon " +
                     std::to_string(limits_.length_horizon) + " of " + name());
}

Ball Group::ball(std::size_t radius) const {
  Ball b;
  b.group = shared_from_this();
  b.radius = radius;
  const Element e = identity();
  b.elements.push_back(e);
  b.lengths.push_back(0);
  b.index.emplace(e, 0);

  std::vector<Element> sphere{e};
  for (std::size_t r = 1; r <= radius && !sphere.empty(); ++r) {
    std::vector<Element> next;
    for (const auto& t : sphere) {
      for (const auto& s : generators_) {
        Element u = multiply(t, s);
        if (!b.index.contains(u)) {
          b.index.emplace(u, Ball::npos);
          next.push_back(std::move(u));
        }
      }
    }
    std::sort(next.begin(), next.end());
    for (auto& u : next) {
      b.index[u] = b.elements.size();
      b.elements.push_back(u);
      b.lengths.push_back(r);
    }
    if (b.elements.size() > limits_.max_ball_size) {
      throw ResourceError("ball of radius " + std::to_string(radius) + " in " + name() +
                          " exceeds the size cap " + std::to_string(limits_.max_ball_size));
    }
    sphere = std::move(next);
  }

  b.adjacency.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto& row = b.adjacency[i];
    row.reserve(generators_.size());
    for (const auto& s : generators_) {
      auto it = b.index.find(multiply(b.elements[i], s));
      row.push_back(it == b.index.end() ? Ball::npos : it->second);
    }
  }
  return b;
}

CosetDecomposition quotient_and_lift(const Group& g, const Element& t) {
  const QuotientStructure* qs = g.quotient();
  if (qs == nullptr) throw ValidationError(g.name() + " has no quotient structure");
  Element coset = qs->project(t);
  Element part = g.multiply(g.inverse(qs->lift(coset)), t);
  if (!qs->in_kernel(part)) {
    throw ContractError("lift residual " + g.to_string(part) + " is not in the kernel");
  }
  return {std::move(coset), qs->kernel_coordinates(part)};
}

}  // namespace mdlab
