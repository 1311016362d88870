#include "specvar/group.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace specvar {

GroupElement GroupElement::identity(int n) {
    GroupElement s;
    s.perm.resize(n);
    std::iota(s.perm.begin(), s.perm.end(), 0);
    s.signs.assign(n, 1);
    return s;
}

int GroupElement::negative_count() const {
    return static_cast<int>(std::count(signs.begin(), signs.end(), -1));
}

Vec GroupElement::apply(const Vec& x) const {
    const int n = dim();
    if (x.size() < n) {
        throw Error(ErrorCode::InvalidShape, "group element acts on dimension " +
                                                 std::to_string(n) + ", got " +
                                                 std::to_string(x.size()));
    }
    Vec out = x;
    for (int i = 0; i < n; ++i) out[i] = signs[i] * x[perm[i]];
    return out;
}

GroupElement GroupElement::compose(const GroupElement& b) const {
    // (a(b x))_i = sa_i (b x)_{pa_i} = sa_i sb_{pa_i} x_{pb_{pa_i}}
    const int n = dim();
    GroupElement out;
    out.perm.resize(n);
    out.signs.resize(n);
    for (int i = 0; i < n; ++i) {
        out.perm[i] = b.perm[perm[i]];
        out.signs[i] = signs[i] * b.signs[perm[i]];
    }
    return out;
}

GroupElement GroupElement::inverse() const {
    // y_i = s_i x_{p_i}  =>  x_j = s_{p^-1 j} y_{p^-1 j}
    const int n = dim();
    GroupElement out;
    out.perm.resize(n);
    out.signs.resize(n);
    for (int i = 0; i < n; ++i) {
        out.perm[perm[i]] = i;
        out.signs[perm[i]] = signs[i];
    }
    return out;
}

bool belongs_to(const GroupElement& s, GroupClass g) {
    switch (g) {
    case GroupClass::Permutation: return s.negative_count() == 0;
    case GroupClass::EvenSigned: return s.negative_count() % 2 == 0;
    case GroupClass::Signed: return true;
    }
    return false;
}

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::uint64_t order_of(GroupClass g, int dim) {
    std::uint64_t n = 1;
    for (int i = 2; i <= dim; ++i) n = saturating_mul(n, static_cast<std::uint64_t>(i));
    if (g == GroupClass::Permutation) return n;
    std::uint64_t signs = 1;
    const int sign_bits = g == GroupClass::Signed ? dim : dim - 1;
    for (int i = 0; i < sign_bits; ++i) signs = saturating_mul(signs, 2);
    return saturating_mul(n, signs);
}

} // namespace

std::uint64_t group_order(const SystemKind& kind) {
    return order_of(group_class(kind), kind.group_dim());
}

std::vector<GroupElement> group_enumerate(GroupClass g, int dim, std::uint64_t cap) {
    const std::uint64_t order = order_of(g, dim);
    if (order > cap) {
        throw Error(ErrorCode::TooLarge, "group of order " + std::to_string(order) +
                                             " exceeds enumeration cap " + std::to_string(cap));
    }
    std::vector<GroupElement> out;
    out.reserve(order);
    std::vector<int> perm(dim);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        for (std::uint32_t mask = 0; mask < (1u << dim); ++mask) {
            GroupElement s;
            s.perm = perm;
            s.signs.resize(dim);
            for (int i = 0; i < dim; ++i) s.signs[i] = (mask >> i) & 1u ? -1 : 1;
            if (belongs_to(s, g)) out.push_back(std::move(s));
            if (g == GroupClass::Permutation) break;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

std::vector<GroupElement> group_enumerate(const SystemKind& kind, std::uint64_t cap) {
    return group_enumerate(group_class(kind), kind.group_dim(), cap);
}

GroupElement group_sample(GroupClass g, int dim, Rng& rng) {
    GroupElement s = GroupElement::identity(dim);
    std::shuffle(s.perm.begin(), s.perm.end(), rng);
    if (g == GroupClass::Permutation) return s;
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < dim; ++i) s.signs[i] = coin(rng) ? -1 : 1;
    if (g == GroupClass::EvenSigned && s.negative_count() % 2 != 0) {
        // Uniform over the even coset: fix parity by the last sign.
        s.signs[dim - 1] = -s.signs[dim - 1];
    }
    return s;
}

GroupElement group_sample(const SystemKind& kind, Rng& rng) {
    return group_sample(group_class(kind), kind.group_dim(), rng);
}

} // namespace specvar
