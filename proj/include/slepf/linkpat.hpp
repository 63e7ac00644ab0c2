#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace slepf {

/// A link {a, b} between 1-based boundary indices, stored with a < b.
struct Link {
  int a;
  int b;
  friend auto operator<=>(const Link&, const Link&) = default;
};

/// Planar pair partition of {1, ..., 2N}.
///
/// Links are kept as (min, max) pairs in lexicographic order, so two patterns
/// compare equal exactly when they describe the same pairing.
class LinkPattern {
 public:
  LinkPattern() = default;

  /// Validates the perfect-matching and planarity invariants.
  explicit LinkPattern(std::vector<Link> links);

  static LinkPattern parse(std::string_view text);

  int n_links() const { return static_cast<int>(links_.size()); }
  int n_points() const { return 2 * n_links(); }
  bool empty() const { return links_.empty(); }
  const std::vector<Link>& links() const { return links_; }

  bool contains(int a, int b) const;
  /// Index paired with i.
  int partner(int i) const;

  /// "1-2,3-4"; the empty pattern encodes as "".
  std::string to_string() const;

  friend bool operator==(const LinkPattern&, const LinkPattern&) = default;
  friend auto operator<=>(const LinkPattern& l, const LinkPattern& r) { return l.links_ <=> r.links_; }

 private:
  std::vector<Link> links_;
};

std::uint64_t catalan(int n);

/// All of LP_N in lexicographic order of their sorted link lists. N <= 10.
std::vector<LinkPattern> enumerate(int n);

/// Removes {j, j+1} and relabels the remaining indices 1..2N-2 in order.
LinkPattern remove_link(const LinkPattern& alpha, int j);

/// Removes an arbitrary link {a, b} and relabels the rest in order.
LinkPattern remove_pair(const LinkPattern& alpha, int a, int b);

/// Inverse of remove_link: opens a new link {j, j+1}, shifting indices >= j by two.
LinkPattern insert_link(const LinkPattern& alpha, int j);

/// Restricts alpha to the given indices, relabelled by their position in `order`
/// (1-based). The indices must be closed under the pairing; a cyclic rotation of
/// an increasing list keeps the result planar.
LinkPattern subpattern(const LinkPattern& alpha, const std::vector<int>& order);

/// Planar valenced link pattern on n endpoints.
class ValencedLinkPattern {
 public:
  struct MultiLink {
    int a;
    int b;
    int multiplicity;
  };

  ValencedLinkPattern(std::vector<int> valences, std::vector<MultiLink> links);

  int n_endpoints() const { return static_cast<int>(valences_.size()); }
  const std::vector<int>& valences() const { return valences_; }
  const std::vector<MultiLink>& links() const { return links_; }
  /// l_{a,b}(omega), symmetric in a and b.
  int multiplicity(int a, int b) const;

 private:
  std::vector<int> valences_;
  std::vector<MultiLink> links_;
};

/// Splits endpoint j into valence(j) unit points and reads off the induced
/// planar pairing.
LinkPattern collapse_map(const ValencedLinkPattern& omega);

enum class Side : std::uint8_t { left, right };

struct SideSplit {
  LinkPattern left;
  LinkPattern right;
  std::vector<int> left_indices;   // original indices, increasing
  std::vector<int> right_indices;
};

/// Sub-patterns of alpha on each side, or nullopt when some link has its two
/// ends on different sides. side_of[i - 1] is the side of index i.
std::optional<SideSplit> side_split(const LinkPattern& alpha, const std::vector<Side>& side_of);

}  // namespace slepf
