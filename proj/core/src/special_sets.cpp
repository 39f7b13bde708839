#include "gaitd/special_sets.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace gaitd {

namespace {

struct NamedSet {
  const char* name;
  const std::vector<Count>* values;
  SetKind kind;
};

std::array<NamedSet, 7> named_sets(const SpecialSets& s) {
  return {{{"T", &s.trunc, SetKind::Truncated},
           {"A_p", &s.alt_p, SetKind::AltP},
           {"A_np", &s.alt_np, SetKind::AltNp},
           {"I_p", &s.inf_p, SetKind::InfP},
           {"I_np", &s.inf_np, SetKind::InfNp},
           {"D_p", &s.def_p, SetKind::DefP},
           {"D_np", &s.def_np, SetKind::DefNp}}};
}

std::vector<Count> duplicates(std::vector<Count> v) {
  std::sort(v.begin(), v.end());
  std::vector<Count> out;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] == v[i - 1] && (out.empty() || out.back() != v[i])) out.push_back(v[i]);
  }
  return out;
}

}  // namespace

bool SpecialSets::is_truncated(Count y) const {
  if (trunc_tail_start && y >= *trunc_tail_start) return true;
  if (lattice && !lattice->on_lattice(y)) return true;
  return std::find(trunc.begin(), trunc.end(), y) != trunc.end();
}

bool SpecialSets::empty() const {
  return trunc.empty() && !trunc_tail_start && !lattice && alt_p.empty() && alt_np.empty() &&
         inf_p.empty() && inf_np.empty() && def_p.empty() && def_np.empty();
}

SpecialSets& SpecialSets::normalize() {
  for (auto* v : {&trunc, &alt_p, &alt_np, &inf_p, &inf_np, &def_p, &def_np}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  return *this;
}

std::string_view set_kind_name(SetKind k) {
  switch (k) {
    case SetKind::Nonspecial:
      return "nonspecial";
    case SetKind::Truncated:
      return "T";
    case SetKind::AltP:
      return "A_p";
    case SetKind::AltNp:
      return "A_np";
    case SetKind::InfP:
      return "I_p";
    case SetKind::InfNp:
      return "I_np";
    case SetKind::DefP:
      return "D_p";
    case SetKind::DefNp:
      return "D_np";
  }
  return "?";
}

std::vector<SetViolation> validate_sets(const SpecialSets& sets, Family family,
                                        bool strict_identifiability) {
  std::vector<SetViolation> out;
  const Count lo = support_min(family);
  const auto named = named_sets(sets);

  for (const auto& ns : named) {
    if (auto d = duplicates(*ns.values); !d.empty()) {
      out.push_back({"distinct elements", d, std::string(ns.name) + " lists a value more than once"});
    }
    std::vector<Count> outside;
    for (Count v : *ns.values) {
      if (v < lo) outside.push_back(v);
    }
    if (!outside.empty()) {
      out.push_back({"within parent support", outside,
                     std::string(ns.name) + " has values below the support minimum " + std::to_string(lo)});
    }
  }

  // Pairwise disjointness among the seven sets; infinite truncation included.
  for (std::size_t i = 0; i < named.size(); ++i) {
    for (std::size_t j = i + 1; j < named.size(); ++j) {
      std::vector<Count> a = *named[i].values, b = *named[j].values, both;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
      both.erase(std::unique(both.begin(), both.end()), both.end());
      if (!both.empty()) {
        out.push_back({"disjoint sets", both,
                       std::string(named[i].name) + " and " + named[j].name + " intersect"});
      }
    }
  }
  for (std::size_t i = 1; i < named.size(); ++i) {
    std::vector<Count> clash;
    for (Count v : *named[i].values) {
      const bool in_tail = sets.trunc_tail_start && v >= *sets.trunc_tail_start;
      const bool off_lattice = sets.lattice && !sets.lattice->on_lattice(v);
      if (in_tail || off_lattice) clash.push_back(v);
    }
    if (!clash.empty()) {
      out.push_back({"disjoint sets", clash,
                     std::string(named[i].name) + " has values inside the infinite truncation set"});
    }
  }

  if (sets.lattice && sets.lattice->step < 1) {
    out.push_back({"lattice step >= 1", {sets.lattice->step}, "lattice step must be positive"});
  }

  if (strict_identifiability) {
    for (const auto& ns : {named[1], named[3], named[5]}) {
      if (ns.values->size() == 1) {
        out.push_back({std::string("|") + ns.name + "| != 1", *ns.values,
                       std::string(ns.name) + " is a singleton; use the nonparametric set instead"});
      }
    }
  }

  // |R \ S| > 0: only decidable by scanning when the upper tail is truncated.
  if (sets.trunc_tail_start) {
    const SpecialUnion u(sets);
    bool found = false;
    for (Count y = lo; y < *sets.trunc_tail_start; ++y) {
      if (!u.contains(y)) {
        found = true;
        break;
      }
    }
    if (!found) {
      out.push_back({"|R \\ S| > 0", {}, "no nonspecial support value remains"});
    }
  }
  return out;
}

std::vector<SetViolation> validate_sets(const SpecialSets& sets, const ParentSpec& parent,
                                        bool strict_identifiability) {
  return validate_sets(sets, parent.family(), strict_identifiability);
}

SpecialUnion::SpecialUnion(const SpecialSets& sets)
    : tail_(sets.trunc_tail_start), lattice_(sets.lattice) {
  for (const auto& ns : named_sets(sets)) {
    for (std::size_t i = 0; i < ns.values->size(); ++i) {
      entries_.push_back({(*ns.values)[i], {ns.kind, static_cast<int>(i)}});
    }
  }
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) { return a.value < b.value; });
}

SpecialUnion::Slot SpecialUnion::classify(Count y) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), y,
                             [](const Entry& e, Count v) { return e.value < v; });
  if (it != entries_.end() && it->value == y) return it->slot;
  if ((tail_ && y >= *tail_) || (lattice_ && !lattice_->on_lattice(y))) {
    return {SetKind::Truncated, -1};
  }
  return {};
}

std::vector<Count> SpecialUnion::finite_members() const {
  std::vector<Count> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.value);
  return out;
}

std::optional<Count> SpecialUnion::max_finite() const {
  if (entries_.empty()) return std::nullopt;
  return entries_.back().value;
}

SpecialUnion special_union(const SpecialSets& sets) { return SpecialUnion(sets); }

}  // namespace gaitd
