#pragma once

#include <cstdint>
#include <vector>

#include "specvar/systems.hpp"

namespace specvar {

/// Signed permutation acting by (s.x)_i = signs[i] * x[perm[i]].
/// Coordinates beyond perm.size() (the lifted scalar) are left unchanged.
struct GroupElement {
    std::vector<int> perm;
    std::vector<int> signs;

    static GroupElement identity(int n);

    int dim() const { return static_cast<int>(perm.size()); }
    int negative_count() const;

    Vec apply(const Vec& x) const;
    /// (a * b).apply(x) == a.apply(b.apply(x))
    GroupElement compose(const GroupElement& b) const;
    GroupElement inverse() const;

    bool operator==(const GroupElement&) const = default;
};

/// Membership of s in the group declared by `g` on dimension s.dim().
bool belongs_to(const GroupElement& s, GroupClass g);

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Order of the group of `kind`, saturating at UINT64_MAX.
std::uint64_t group_order(const SystemKind& kind);

/// Exhaustive, duplicate-free enumeration; TooLarge above `cap`.
std::vector<GroupElement> group_enumerate(const SystemKind& kind,
                                          std::uint64_t cap = kDefaultEnumerationCap);
std::vector<GroupElement> group_enumerate(GroupClass g, int dim,
                                          std::uint64_t cap = kDefaultEnumerationCap);

/// Uniformly random group element.
GroupElement group_sample(const SystemKind& kind, Rng& rng);
GroupElement group_sample(GroupClass g, int dim, Rng& rng);

} // namespace specvar
