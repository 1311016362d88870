#pragma once

#include <Eigen/Dense>

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "specvar/error.hpp"

namespace specvar {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

enum class Family { TrivialNorm, EigSym, Svd, SignedSvd };

/// Which concrete spectral decomposition system we are working in.
///
/// `rows`/`cols` give the ambient matrix shape (TrivialNorm: N x 1,
/// EigSym and SignedSvd: N x N). `product` marks the lift to the direct sum
/// with the real line; the extra scalar rides along unchanged.
struct SystemKind {
    Family family = Family::EigSym;
    int rows = 2;
    int cols = 2;
    bool product = false;

    static SystemKind trivial_norm(int n);
    static SystemKind eig_sym(int n);
    static SystemKind svd(int m, int n);
    static SystemKind signed_svd(int n);

    /// Dimension of the group-acted part of the reduced space.
    int group_dim() const;
    /// Dimension of the reduced space (group part plus one when lifted).
    int spectrum_dim() const;
    std::string name() const;

    bool operator==(const SystemKind&) const = default;
};

/// Returns Product(kind); nested products throw Unsupported.
SystemKind product_lift(const SystemKind& kind);
SystemKind inner_kind(const SystemKind& kind);

/// Groups ordered by inclusion: Permutation < EvenSigned < Signed.
enum class GroupClass { Permutation = 0, EvenSigned = 1, Signed = 2 };

GroupClass group_class(const SystemKind& kind);
std::string to_string(GroupClass g);
/// True when every element of `sub` belongs to `super`.
inline bool group_contained(GroupClass sub, GroupClass super) {
    return static_cast<int>(sub) <= static_cast<int>(super);
}

/// A point of the ambient Euclidean space. `xi` is only nonzero for
/// lifted (product) systems.
struct Ambient {
    Mat data;
    double xi = 0.0;

    Ambient() = default;
    explicit Ambient(Mat m, double scalar = 0.0) : data(std::move(m)), xi(scalar) {}

    double inner(const Ambient& other) const {
        return data.cwiseProduct(other.data).sum() + xi * other.xi;
    }
    double norm() const { return std::sqrt(inner(*this)); }

    Ambient& operator+=(const Ambient& o) { data += o.data; xi += o.xi; return *this; }
    Ambient& operator-=(const Ambient& o) { data -= o.data; xi -= o.xi; return *this; }
    Ambient& operator*=(double s) { data *= s; xi *= s; return *this; }

    friend Ambient operator+(Ambient a, const Ambient& b) { return a += b; }
    friend Ambient operator-(Ambient a, const Ambient& b) { return a -= b; }
    friend Ambient operator*(double s, Ambient a) { return a *= s; }
    friend Ambient operator*(Ambient a, double s) { return a *= s; }
};

Ambient zero_ambient(const SystemKind& kind);
/// Throws InvalidShape / InvalidData; symmetrizes EigSym data in place.
void validate_ambient(const SystemKind& kind, Ambient& X);

/// One element of A_X: an isometry from the reduced space into the ambient
/// space. U is used by every family; V only by Svd and SignedSvd.
struct Decomposition {
    SystemKind kind;
    Mat U;
    Mat V;
};

/// gamma(X): the ordered spectrum.
Vec spectrum(const SystemKind& kind, const Ambient& X);
/// tau(x): the orbit representative in the ordered cone.
Vec order(const SystemKind& kind, const Vec& x);
/// True when x lies in the ordered cone ran(tau), up to `tol`.
bool in_ordered_cone(const SystemKind& kind, const Vec& x, double tol = 0.0);

double default_tie_tol(const Ambient& X);

Decomposition decompose(const SystemKind& kind, const Ambient& X,
                        std::optional<double> tie_tol = std::nullopt);

Ambient apply_isometry(const Decomposition& d, const Vec& x);
Vec adjoint_apply(const Decomposition& d, const Ambient& X);

/// Canonical decomposition followed by `count - 1` randomized members of A_X
/// obtained by rotating within spectral clusters (and null spaces).
std::vector<Decomposition> sample_decompositions(const SystemKind& kind, const Ambient& X,
                                                 int count, std::optional<double> tie_tol,
                                                 Rng& rng);

/// Maximal runs of the spectrum whose consecutive gaps are within tie_tol.
/// Each entry is a half-open index range [first, second).
std::vector<std::pair<int, int>> spectral_clusters(const Vec& spec, double tie_tol);

// Random generation helpers shared by tests, verification and the CLI.
Mat haar_orthogonal(int n, Rng& rng);
Mat haar_special_orthogonal(int n, Rng& rng);
Vec random_gaussian(int n, Rng& rng);
Ambient random_ambient(const SystemKind& kind, Rng& rng, double scale = 1.0);
/// Random point whose spectrum has planted ties and zeros.
Ambient random_ambient_with_ties(const SystemKind& kind, Rng& rng);

/// Isometric coordinates of the ambient space (EigSym uses an orthonormal
/// basis of symmetric matrices, so perturbations stay symmetric).
int ambient_dim(const SystemKind& kind);
Vec to_coords(const SystemKind& kind, const Ambient& X);
Ambient from_coords(const SystemKind& kind, const Vec& c);

} // namespace specvar
