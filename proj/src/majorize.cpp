#include "specvar/majorize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "specvar/hull.hpp"

namespace specvar {

namespace {

std::vector<int> argsort_desc(const Vec& v) {
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
    return idx;
}

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

} // namespace

SupportValue support_oracle(GroupClass g, const Vec& c, const Vec& y) {
    if (c.size() != y.size()) throw Error(ErrorCode::InvalidShape, "c and y differ in size");
    const int n = static_cast<int>(c.size());
    SupportValue out;
    out.maximizer = GroupElement::identity(n);
    if (n == 0) return out;
    GroupElement& s = out.maximizer;

    if (g == GroupClass::Permutation) {
        const auto ic = argsort_desc(c);
        const auto iy = argsort_desc(y);
        for (int k = 0; k < n; ++k) s.perm[ic[k]] = iy[k];
    } else {
        const auto ic = argsort_desc(c.cwiseAbs());
        const auto iy = argsort_desc(y.cwiseAbs());
        for (int k = 0; k < n; ++k) {
            s.perm[ic[k]] = iy[k];
            s.signs[ic[k]] = sign_of(c[ic[k]]) * sign_of(y[iy[k]]);
        }
        if (g == GroupClass::EvenSigned && s.negative_count() % 2 == 1) {
            int flip = 0;
            double least = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) {
                const double contrib = std::abs(c[i] * y[s.perm[i]]);
                if (contrib < least) {
                    least = contrib;
                    flip = i;
                }
            }
            s.signs[flip] = -s.signs[flip];
        }
    }
    out.value = c.dot(s.apply(y));
    return out;
}

SupportValue support_oracle(const SystemKind& kind, const Vec& c, const Vec& y) {
    const int n = kind.spectrum_dim();
    if (c.size() != n || y.size() != n)
        throw Error(ErrorCode::InvalidShape, "vectors do not match the reduced space");
    const int gd = kind.group_dim();
    SupportValue out = support_oracle(group_class(kind), c.head(gd), y.head(gd));
    if (kind.product) out.value += c[gd] * y[gd];
    return out;
}

namespace {

struct ElementKey {
    std::vector<int> perm, signs;
    bool operator<(const ElementKey& o) const {
        return std::tie(perm, signs) < std::tie(o.perm, o.signs);
    }
};

HullCertificate hull_distance(const std::function<SupportValue(const Vec&)>& support,
                              const Vec& y, const Vec& x, double tol, int max_iter) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParam, "tol must be > 0");
    if (x.size() != y.size()) throw Error(ErrorCode::InvalidShape, "x and y differ in size");
    std::map<ElementKey, long> tags;
    std::vector<GroupElement> elements;
    LinearMaximizer lmo = [&](const Vec& c) {
        SupportValue sv = support(c);
        ElementKey key{sv.maximizer.perm, sv.maximizer.signs};
        auto it = tags.find(key);
        long tag;
        if (it == tags.end()) {
            tag = static_cast<long>(elements.size());
            tags.emplace(key, tag);
            elements.push_back(sv.maximizer);
        } else {
            tag = it->second;
        }
        return std::make_pair(sv.maximizer.apply(y), tag);
    };
    MinNormOptions opts;
    opts.max_iter = max_iter;
    opts.gap_rel = tol / 4.0;
    opts.distance_floor = 1e-3 * tol / (1.0 + 2.0 * x.norm() + y.norm());
    const MinNormPoint mnp = wolfe_min_norm_point(lmo, x, opts);

    HullCertificate cert;
    cert.distance = mnp.distance;
    cert.nearest = mnp.nearest;
    cert.gap = mnp.gap;
    cert.iterations = mnp.iterations;
    cert.converged = mnp.converged;
    for (std::size_t i = 0; i < mnp.tags.size(); ++i)
        cert.coefficients.emplace_back(elements[mnp.tags[i]], mnp.weights[i]);
    if (cert.distance > tol) cert.separating_direction = (x - cert.nearest).normalized();
    return cert;
}

} // namespace

HullCertificate orbit_hull_distance(GroupClass g, const Vec& y, const Vec& x, double tol,
                                    int max_iter) {
    return hull_distance([&](const Vec& c) { return support_oracle(g, c, y); }, y, x, tol,
                         max_iter);
}

HullCertificate orbit_hull_distance(const SystemKind& kind, const Vec& y, const Vec& x,
                                    double tol, int max_iter) {
    if (y.size() != kind.spectrum_dim() || x.size() != kind.spectrum_dim())
        throw Error(ErrorCode::InvalidShape, "vectors do not match the reduced space");
    return hull_distance([&](const Vec& c) { return support_oracle(kind, c, y); }, y, x, tol,
                         max_iter);
}

Verdict majorization_inequalities(GroupClass g, const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw Error(ErrorCode::InvalidShape, "x and y differ in size");
    if (g == GroupClass::EvenSigned)
        throw Error(ErrorCode::Unsupported,
                    "no partial-sum test for even-signed groups; use orbit_hull_distance");
    constexpr double tol = 1e-9;
    Vec xs = g == GroupClass::Signed ? Vec(x.cwiseAbs()) : x;
    Vec ys = g == GroupClass::Signed ? Vec(y.cwiseAbs()) : y;
    std::sort(xs.begin(), xs.end(), std::greater<>());
    std::sort(ys.begin(), ys.end(), std::greater<>());

    double worst = -std::numeric_limits<double>::infinity();
    int worst_k = -1;
    double px = 0.0, py = 0.0;
    for (Eigen::Index k = 0; k < xs.size(); ++k) {
        px += xs[k];
        py += ys[k];
        if (px - py > worst) {
            worst = px - py;
            worst_k = static_cast<int>(k);
        }
    }
    if (g == GroupClass::Permutation && std::abs(px - py) > worst) {
        worst = std::abs(px - py);
        worst_k = static_cast<int>(xs.size()) - 1;
    }
    Verdict v;
    v.estimate = std::max(worst, 0.0);
    v.pass = worst <= tol;
    std::ostringstream os;
    os << (g == GroupClass::Signed ? "weak absolute majorization" : "majorization")
       << ", largest partial-sum excess " << worst << " at k=" << worst_k + 1;
    v.detail = os.str();
    return v;
}

LidskiiReport lidskii_check(const SystemKind& kind, const Ambient& X, const Ambient& Y,
                            double tol) {
    LidskiiReport r;
    const Vec gx = spectrum(kind, X);
    r.increment = spectrum(kind, X + Y) - gx;
    r.target = spectrum(kind, Y);
    r.certificate = orbit_hull_distance(kind, r.target, r.increment, tol);
    r.pass = r.certificate.distance <= tol;
    const GroupClass g = group_class(kind);
    if (!kind.product && g != GroupClass::EvenSigned) {
        r.majorization = majorization_inequalities(g, r.increment, r.target);
        r.verdicts_agree = r.majorization->pass == r.pass;
    }
    return r;
}

} // namespace specvar
