#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaitd/parents.hpp"

namespace gaitd {

/// Infinite truncation of every value off the lattice {offset, offset+step, ...}.
/// Values below `offset` are truncated too.
struct Lattice {
  Count step = 1;
  Count offset = 0;

  bool on_lattice(Count y) const { return y >= offset && (y - offset) % step == 0; }
  bool operator==(const Lattice&) const = default;
};

/// The seven disjoint special-value sets. Truncation is the only set allowed
/// to be infinite; it is held as a finite list plus an optional upper tail
/// (values >= trunc_tail_start) and an optional lattice restriction.
struct SpecialSets {
  std::vector<Count> trunc;
  std::optional<Count> trunc_tail_start;
  std::optional<Lattice> lattice;
  std::vector<Count> alt_p, alt_np;
  std::vector<Count> inf_p, inf_np;
  std::vector<Count> def_p, def_np;

  bool is_truncated(Count y) const;
  /// True when no value is special (the model is the parent itself).
  bool empty() const;
  /// Sorts every list and removes duplicates.
  SpecialSets& normalize();

  bool operator==(const SpecialSets&) const = default;
};

enum class SetKind { Nonspecial, Truncated, AltP, AltNp, InfP, InfNp, DefP, DefNp };

std::string_view set_kind_name(SetKind k);

struct SetViolation {
  std::string constraint;
  std::vector<Count> elements;
  std::string message;
};

/// Every violated constraint, with the offending elements. An empty result
/// means the sets are pairwise disjoint, inside the parent support, leave at
/// least one nonspecial value and (when strict) no parametric set is a singleton.
std::vector<SetViolation> validate_sets(const SpecialSets& sets, Family family,
                                        bool strict_identifiability);
std::vector<SetViolation> validate_sets(const SpecialSets& sets, const ParentSpec& parent,
                                        bool strict_identifiability);

/// Union S of the seven sets with O(log n) classification.
class SpecialUnion {
 public:
  struct Slot {
    SetKind kind = SetKind::Nonspecial;
    int index = -1;  // position within its set; -1 for tail/lattice truncation
  };

  explicit SpecialUnion(const SpecialSets& sets);

  Slot classify(Count y) const;
  bool contains(Count y) const { return classify(y).kind != SetKind::Nonspecial; }
  /// Finite members in increasing order (tail/lattice truncation excluded).
  std::vector<Count> finite_members() const;
  std::optional<Count> tail_start() const { return tail_; }
  const std::optional<Lattice>& lattice() const { return lattice_; }
  /// Largest finite member, if any.
  std::optional<Count> max_finite() const;

 private:
  struct Entry {
    Count value;
    Slot slot;
  };
  std::vector<Entry> entries_;
  std::optional<Count> tail_;
  std::optional<Lattice> lattice_;
};

SpecialUnion special_union(const SpecialSets& sets);

}  // namespace gaitd
