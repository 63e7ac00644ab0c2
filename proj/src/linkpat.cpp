#include "slepf/linkpat.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "slepf/errors.hpp"

namespace slepf {

namespace {

constexpr int kMaxEnumerate = 10;

bool crosses(const Link& l, const Link& m) {
  return (l.a < m.a && m.a < l.b && l.b < m.b) || (m.a < l.a && l.a < m.b && m.b < l.b);
}

// All noncrossing matchings of the consecutive range [lo, hi].
void matchings(int lo, int hi, std::vector<std::vector<Link>>& out) {
  if (lo > hi) {
    out.push_back({});
    return;
  }
  for (int p = lo + 1; p <= hi; p += 2) {
    std::vector<std::vector<Link>> inner, outer;
    matchings(lo + 1, p - 1, inner);
    matchings(p + 1, hi, outer);
    for (const auto& in : inner) {
      for (const auto& ou : outer) {
        std::vector<Link> m;
        m.reserve(1 + in.size() + ou.size());
        m.push_back({lo, p});
        m.insert(m.end(), in.begin(), in.end());
        m.insert(m.end(), ou.begin(), ou.end());
        out.push_back(std::move(m));
      }
    }
  }
}

}  // namespace

LinkPattern::LinkPattern(std::vector<Link> links) : links_(std::move(links)) {
  for (auto& l : links_) {
    if (l.a > l.b) std::swap(l.a, l.b);
  }
  std::sort(links_.begin(), links_.end());
  const int n = n_points();
  std::vector<int> seen(n + 1, 0);
  for (const auto& l : links_) {
    if (l.a < 1 || l.b > n || l.a == l.b) {
      throw DomainError("link " + std::to_string(l.a) + "-" + std::to_string(l.b) + " out of range 1.." +
                        std::to_string(n));
    }
    if (seen[l.a]++ || seen[l.b]++) throw DomainError("index used by more than one link");
  }
  for (std::size_t i = 0; i < links_.size(); ++i) {
    for (std::size_t k = i + 1; k < links_.size(); ++k) {
      if (crosses(links_[i], links_[k])) throw DomainError("link pattern is not planar");
    }
  }
}

LinkPattern LinkPattern::parse(std::string_view text) {
  std::vector<Link> links;
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) return LinkPattern{};
  while (!text.empty()) {
    auto comma = text.find(',');
    auto item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    auto dash = item.find('-');
    if (dash == std::string_view::npos) throw DomainError("malformed link '" + std::string(item) + "'");
    auto lhs = trim(item.substr(0, dash));
    auto rhs = trim(item.substr(dash + 1));
    int a = 0, b = 0;
    auto r1 = std::from_chars(lhs.data(), lhs.data() + lhs.size(), a);
    auto r2 = std::from_chars(rhs.data(), rhs.data() + rhs.size(), b);
    if (r1.ec != std::errc{} || r1.ptr != lhs.data() + lhs.size() || r2.ec != std::errc{} ||
        r2.ptr != rhs.data() + rhs.size()) {
      throw DomainError("malformed link '" + std::string(item) + "'");
    }
    links.push_back({a, b});
  }
  return LinkPattern(std::move(links));
}

bool LinkPattern::contains(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(links_.begin(), links_.end(), Link{a, b});
}

int LinkPattern::partner(int i) const {
  for (const auto& l : links_) {
    if (l.a == i) return l.b;
    if (l.b == i) return l.a;
  }
  throw DomainError("index " + std::to_string(i) + " not in pattern");
}

std::string LinkPattern::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (i) os << ',';
    os << links_[i].a << '-' << links_[i].b;
  }
  return os.str();
}

std::uint64_t catalan(int n) {
  if (n < 0) throw DomainError("catalan of negative argument");
  std::uint64_t c = 1;
  for (int k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

std::vector<LinkPattern> enumerate(int n) {
  if (n < 0) throw DomainError("negative number of links");
  if (n > kMaxEnumerate) {
    throw CapacityError("enumerate: N=" + std::to_string(n) + " exceeds limit " + std::to_string(kMaxEnumerate));
  }
  std::vector<std::vector<Link>> raw;
  matchings(1, 2 * n, raw);
  std::vector<LinkPattern> out;
  out.reserve(raw.size());
  for (auto& m : raw) out.emplace_back(std::move(m));
  std::sort(out.begin(), out.end());
  return out;
}

LinkPattern remove_pair(const LinkPattern& alpha, int a, int b) {
  if (a > b) std::swap(a, b);
  if (!alpha.contains(a, b)) {
    throw PreconditionError("link " + std::to_string(a) + "-" + std::to_string(b) + " not in pattern " +
                            alpha.to_string());
  }
  auto relabel = [a, b](int i) { return i - (i > a) - (i > b); };
  std::vector<Link> rest;
  for (const auto& l : alpha.links()) {
    if (l.a == a && l.b == b) continue;
    rest.push_back({relabel(l.a), relabel(l.b)});
  }
  return LinkPattern(std::move(rest));
}

LinkPattern remove_link(const LinkPattern& alpha, int j) { return remove_pair(alpha, j, j + 1); }

LinkPattern insert_link(const LinkPattern& alpha, int j) {
  if (j < 1 || j > alpha.n_points() + 1) throw DomainError("insert position out of range");
  auto shift = [j](int i) { return i >= j ? i + 2 : i; };
  std::vector<Link> links{{j, j + 1}};
  for (const auto& l : alpha.links()) links.push_back({shift(l.a), shift(l.b)});
  return LinkPattern(std::move(links));
}

LinkPattern subpattern(const LinkPattern& alpha, const std::vector<int>& order) {
  std::map<int, int> pos;
  for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<int>(k) + 1;
  std::vector<Link> links;
  for (const auto& l : alpha.links()) {
    const bool ina = pos.count(l.a) != 0;
    const bool inb = pos.count(l.b) != 0;
    if (ina != inb) throw PreconditionError("index set is not closed under the pairing");
    if (ina) links.push_back({pos[l.a], pos[l.b]});
  }
  if (2 * links.size() != order.size()) throw PreconditionError("subpattern: index list has duplicates");
  return LinkPattern(std::move(links));
}

ValencedLinkPattern::ValencedLinkPattern(std::vector<int> valences, std::vector<MultiLink> links)
    : valences_(std::move(valences)), links_(std::move(links)) {
  const int n = n_endpoints();
  std::vector<int> ends(n + 1, 0);
  for (auto& l : links_) {
    if (l.a > l.b) std::swap(l.a, l.b);
    if (l.a == l.b) throw DomainError("valenced link joins an endpoint to itself");
    if (l.a < 1 || l.b > n) throw DomainError("valenced link endpoint out of range");
    if (l.multiplicity < 1) throw DomainError("link multiplicity must be positive");
    ends[l.a] += l.multiplicity;
    ends[l.b] += l.multiplicity;
  }
  for (int j = 1; j <= n; ++j) {
    if (valences_[j - 1] < 1) throw DomainError("valences must be positive");
    if (ends[j] != valences_[j - 1]) {
      throw DomainError("link ends at endpoint " + std::to_string(j) + " do not match its valence");
    }
  }
  for (std::size_t i = 0; i < links_.size(); ++i) {
    for (std::size_t k = i + 1; k < links_.size(); ++k) {
      const Link l{links_[i].a, links_[i].b}, m{links_[k].a, links_[k].b};
      if (l == m) throw DomainError("repeated valenced link; use the multiplicity");
      if (crosses(l, m)) throw DomainError("valenced link pattern is not planar");
    }
  }
}

int ValencedLinkPattern::multiplicity(int a, int b) const {
  if (a > b) std::swap(a, b);
  for (const auto& l : links_) {
    if (l.a == a && l.b == b) return l.multiplicity;
  }
  return 0;
}

LinkPattern collapse_map(const ValencedLinkPattern& omega) {
  // Each unit point records the endpoint its link goes to. Left-going ends come
  // first, ordered from the nearest endpoint outwards; right-going ends follow,
  // farthest first. Pairing with a stack then yields nested parallel links.
  const int n = omega.n_endpoints();
  std::vector<std::pair<int, int>> points;  // (own endpoint, target endpoint)
  for (int j = 1; j <= n; ++j) {
    for (int t = j - 1; t >= 1; --t) {
      for (int m = omega.multiplicity(j, t); m > 0; --m) points.emplace_back(j, t);
    }
    for (int t = n; t > j; --t) {
      for (int m = omega.multiplicity(j, t); m > 0; --m) points.emplace_back(j, t);
    }
  }
  std::vector<Link> links;
  std::vector<int> stack;
  for (int p = 0; p < static_cast<int>(points.size()); ++p) {
    const auto [own, target] = points[p];
    if (target > own) {
      stack.push_back(p);
      continue;
    }
    if (stack.empty()) throw ConsistencyError("collapse_map: unmatched link end");
    const int q = stack.back();
    stack.pop_back();
    if (points[q].first != target || points[q].second != own) {
      throw ConsistencyError("collapse_map: link ends do not nest");
    }
    links.push_back({q + 1, p + 1});
  }
  if (!stack.empty()) throw ConsistencyError("collapse_map: unmatched link end");
  return LinkPattern(std::move(links));
}

std::optional<SideSplit> side_split(const LinkPattern& alpha, const std::vector<Side>& side_of) {
  if (static_cast<int>(side_of.size()) != alpha.n_points()) {
    throw DomainError("side_split: side assignment must cover every index");
  }
  for (const auto& l : alpha.links()) {
    if (side_of[l.a - 1] != side_of[l.b - 1]) return std::nullopt;
  }
  SideSplit out;
  for (int i = 1; i <= alpha.n_points(); ++i) {
    (side_of[i - 1] == Side::left ? out.left_indices : out.right_indices).push_back(i);
  }
  out.left = subpattern(alpha, out.left_indices);
  out.right = subpattern(alpha, out.right_indices);
  return out;
}

}  // namespace slepf
