#include "specvar/systems.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace specvar {

SystemKind SystemKind::trivial_norm(int n) {
    if (n < 2) throw Error(ErrorCode::InvalidShape, "TrivialNorm needs N >= 2");
    return {Family::TrivialNorm, n, 1, false};
}

SystemKind SystemKind::eig_sym(int n) {
    if (n < 2) throw Error(ErrorCode::InvalidShape, "EigSym needs N >= 2");
    return {Family::EigSym, n, n, false};
}

SystemKind SystemKind::svd(int m, int n) {
    if (m < 1 || n < 1) throw Error(ErrorCode::InvalidShape, "Svd needs M, N >= 1");
    return {Family::Svd, m, n, false};
}

SystemKind SystemKind::signed_svd(int n) {
    if (n < 2) throw Error(ErrorCode::InvalidShape, "SignedSvd needs N >= 2");
    return {Family::SignedSvd, n, n, false};
}

int SystemKind::group_dim() const {
    switch (family) {
    case Family::TrivialNorm: return 1;
    case Family::EigSym:
    case Family::SignedSvd: return rows;
    case Family::Svd: return std::min(rows, cols);
    }
    return 0;
}

int SystemKind::spectrum_dim() const { return group_dim() + (product ? 1 : 0); }

std::string SystemKind::name() const {
    std::string base;
    switch (family) {
    case Family::TrivialNorm: base = "trivial-norm(" + std::to_string(rows) + ")"; break;
    case Family::EigSym: base = "eigsym(" + std::to_string(rows) + ")"; break;
    case Family::Svd:
        base = "svd(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
        break;
    case Family::SignedSvd: base = "signed-svd(" + std::to_string(rows) + ")"; break;
    }
    return product ? "product[" + base + "]" : base;
}

SystemKind product_lift(const SystemKind& kind) {
    if (kind.product) throw Error(ErrorCode::Unsupported, "nested product systems");
    SystemKind out = kind;
    out.product = true;
    return out;
}

SystemKind inner_kind(const SystemKind& kind) {
    SystemKind out = kind;
    out.product = false;
    return out;
}

GroupClass group_class(const SystemKind& kind) {
    switch (kind.family) {
    case Family::EigSym: return GroupClass::Permutation;
    case Family::SignedSvd: return GroupClass::EvenSigned;
    case Family::Svd:
    case Family::TrivialNorm: return GroupClass::Signed;
    }
    return GroupClass::Signed;
}

std::string to_string(GroupClass g) {
    switch (g) {
    case GroupClass::Permutation: return "permutation";
    case GroupClass::EvenSigned: return "even-signed";
    case GroupClass::Signed: return "signed";
    }
    return "?";
}

Ambient zero_ambient(const SystemKind& kind) {
    return Ambient(Mat::Zero(kind.rows, kind.cols), 0.0);
}

void validate_ambient(const SystemKind& kind, Ambient& X) {
    if (X.data.rows() != kind.rows || X.data.cols() != kind.cols) {
        throw Error(ErrorCode::InvalidShape,
                    kind.name() + " expects a " + std::to_string(kind.rows) + "x" +
                        std::to_string(kind.cols) + " matrix, got " +
                        std::to_string(X.data.rows()) + "x" + std::to_string(X.data.cols()));
    }
    if (!X.data.allFinite() || !std::isfinite(X.xi))
        throw Error(ErrorCode::InvalidData, "non-finite entries");
    if (!kind.product && X.xi != 0.0)
        throw Error(ErrorCode::InvalidShape, "scalar component given to a non-product system");
    if (kind.family == Family::EigSym) {
        const double asym = (X.data - X.data.transpose()).norm();
        if (asym > 1e-8 * (1.0 + X.data.norm()))
            throw Error(ErrorCode::InvalidData, "EigSym input is not symmetric");
        X.data = (0.5 * (X.data + X.data.transpose())).eval();
    }
}

double default_tie_tol(const Ambient& X) { return 1e-8 * (1.0 + X.norm()); }

namespace {

void check_spectrum_size(const SystemKind& kind, const Vec& x) {
    if (x.size() != kind.spectrum_dim()) {
        throw Error(ErrorCode::InvalidShape, kind.name() + " reduced space has dimension " +
                                                 std::to_string(kind.spectrum_dim()) + ", got " +
                                                 std::to_string(x.size()));
    }
}

struct SvdFactors {
    Mat U;
    Mat V;
    Vec sigma;
};

SvdFactors full_svd(const Mat& X) {
    Eigen::JacobiSVD<Mat> svd(X, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (!svd.singularValues().allFinite())
        throw Error(ErrorCode::NumericalFailure, "SVD did not converge");
    return {svd.matrixU(), svd.matrixV(), svd.singularValues()};
}

/// SVD with U, V in SO(N); the sign of det X is carried by the last entry.
SvdFactors signed_svd(const Mat& X) {
    SvdFactors f = full_svd(X);
    const int n = static_cast<int>(f.sigma.size());
    const bool zero_last = f.sigma[n - 1] == 0.0;
    if (f.U.determinant() < 0) {
        f.U.col(n - 1) *= -1.0;
        f.sigma[n - 1] = -f.sigma[n - 1];
    }
    if (f.V.determinant() < 0) {
        f.V.col(n - 1) *= -1.0;
        f.sigma[n - 1] = -f.sigma[n - 1];
    }
    if (zero_last) f.sigma[n - 1] = 0.0;
    return f;
}

Mat eig_vectors_decreasing(const Mat& X, Vec* values) {
    Eigen::SelfAdjointEigenSolver<Mat> es(X);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::NumericalFailure, "eigensolver did not converge");
    if (values) *values = es.eigenvalues().reverse();
    return es.eigenvectors().rowwise().reverse();
}

Vec with_scalar(const SystemKind& kind, const Vec& inner, double xi) {
    if (!kind.product) return inner;
    Vec out(inner.size() + 1);
    out << inner, xi;
    return out;
}

/// Orthogonal U with U e_1 = v for a unit vector v (Householder reflector).
Mat householder_completion(const Vec& v) {
    const int n = static_cast<int>(v.size());
    Vec w = Vec::Zero(n);
    w[0] = 1.0;
    const bool flip = v[0] > 0.0;
    w += flip ? Vec(v) : Vec(-v);
    Mat H = Mat::Identity(n, n) - (2.0 / w.squaredNorm()) * w * w.transpose();
    return flip ? Mat(-H) : H;
}

} // namespace

Vec spectrum(const SystemKind& kind, const Ambient& X_in) {
    Ambient X = X_in;
    validate_ambient(kind, X);
    Vec g;
    switch (kind.family) {
    case Family::TrivialNorm:
        g = Vec::Constant(1, X.data.norm());
        break;
    case Family::EigSym: {
        Eigen::SelfAdjointEigenSolver<Mat> es(X.data, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw Error(ErrorCode::NumericalFailure, "eigensolver did not converge");
        g = es.eigenvalues().reverse();
        break;
    }
    case Family::Svd:
        g = full_svd(X.data).sigma;
        break;
    case Family::SignedSvd:
        g = signed_svd(X.data).sigma;
        break;
    }
    return with_scalar(kind, g, X.xi);
}

Vec order(const SystemKind& kind, const Vec& x) {
    check_spectrum_size(kind, x);
    const int n = kind.group_dim();
    Vec out = x;
    auto head = out.head(n);
    const GroupClass g = group_class(kind);
    if (g == GroupClass::Permutation) {
        std::sort(head.begin(), head.end(), std::greater<>());
        return out;
    }
    int negatives = 0;
    for (int i = 0; i < n; ++i) negatives += x[i] < 0.0 ? 1 : 0;
    head = head.cwiseAbs();
    std::sort(head.begin(), head.end(), std::greater<>());
    if (g == GroupClass::EvenSigned && negatives % 2 == 1 && head[n - 1] != 0.0)
        head[n - 1] = -head[n - 1];
    return out;
}

bool in_ordered_cone(const SystemKind& kind, const Vec& x, double tol) {
    check_spectrum_size(kind, x);
    const int n = kind.group_dim();
    switch (group_class(kind)) {
    case GroupClass::Permutation:
        for (int i = 0; i + 1 < n; ++i)
            if (x[i] < x[i + 1] - tol) return false;
        return true;
    case GroupClass::Signed:
        for (int i = 0; i < n; ++i)
            if (x[i] < -tol) return false;
        for (int i = 0; i + 1 < n; ++i)
            if (x[i] < x[i + 1] - tol) return false;
        return true;
    case GroupClass::EvenSigned:
        for (int i = 0; i + 1 < n; ++i)
            if (x[i] < -tol) return false;
        for (int i = 0; i + 2 < n; ++i)
            if (x[i] < x[i + 1] - tol) return false;
        return x[n - 2] >= std::abs(x[n - 1]) - tol;
    }
    return false;
}

Decomposition decompose(const SystemKind& kind, const Ambient& X_in,
                        std::optional<double> tie_tol) {
    if (tie_tol && *tie_tol < 0.0) throw Error(ErrorCode::InvalidParam, "tie_tol must be >= 0");
    Ambient X = X_in;
    validate_ambient(kind, X);
    Decomposition d{kind, {}, {}};
    switch (kind.family) {
    case Family::TrivialNorm: {
        const double r = X.data.norm();
        d.U = r == 0.0 ? Mat(Mat::Identity(kind.rows, kind.rows))
                       : householder_completion(X.data.col(0) / r);
        break;
    }
    case Family::EigSym:
        d.U = eig_vectors_decreasing(X.data, nullptr);
        break;
    case Family::Svd: {
        SvdFactors f = full_svd(X.data);
        d.U = std::move(f.U);
        d.V = std::move(f.V);
        break;
    }
    case Family::SignedSvd: {
        SvdFactors f = signed_svd(X.data);
        d.U = std::move(f.U);
        d.V = std::move(f.V);
        break;
    }
    }
    return d;
}

Ambient apply_isometry(const Decomposition& d, const Vec& x) {
    const SystemKind& kind = d.kind;
    check_spectrum_size(kind, x);
    const int n = kind.group_dim();
    const auto head = x.head(n);
    Ambient out;
    out.xi = kind.product ? x[n] : 0.0;
    switch (kind.family) {
    case Family::TrivialNorm:
        out.data = x[0] * d.U.col(0);
        break;
    case Family::EigSym:
        out.data = d.U * head.asDiagonal() * d.U.transpose();
        break;
    case Family::Svd:
    case Family::SignedSvd:
        out.data = d.U.leftCols(n) * head.asDiagonal() * d.V.leftCols(n).transpose();
        break;
    }
    return out;
}

Vec adjoint_apply(const Decomposition& d, const Ambient& X) {
    const SystemKind& kind = d.kind;
    if (X.data.rows() != kind.rows || X.data.cols() != kind.cols)
        throw Error(ErrorCode::InvalidShape, "adjoint_apply: ambient shape mismatch");
    const int n = kind.group_dim();
    Vec head;
    switch (kind.family) {
    case Family::TrivialNorm:
        head = Vec::Constant(1, d.U.col(0).dot(X.data.col(0)));
        break;
    case Family::EigSym:
        head = (d.U.transpose() * X.data * d.U).diagonal();
        break;
    case Family::Svd:
    case Family::SignedSvd:
        head = (d.U.leftCols(n).transpose() * X.data * d.V.leftCols(n)).diagonal();
        break;
    }
    return with_scalar(kind, head, X.xi);
}

std::vector<std::pair<int, int>> spectral_clusters(const Vec& spec, double tie_tol) {
    std::vector<std::pair<int, int>> out;
    const int n = static_cast<int>(spec.size());
    int start = 0;
    for (int i = 1; i <= n; ++i) {
        if (i == n || std::abs(spec[i - 1] - spec[i]) > tie_tol) {
            out.emplace_back(start, i);
            start = i;
        }
    }
    return out;
}

Mat haar_orthogonal(int n, Rng& rng) {
    if (n == 0) return Mat(0, 0);
    std::normal_distribution<double> normal;
    Mat G(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) G(i, j) = normal(rng);
    Eigen::HouseholderQR<Mat> qr(G);
    Mat Q = qr.householderQ();
    const Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i)
        if (R(i, i) < 0) Q.col(i) *= -1.0;
    return Q;
}

Mat haar_special_orthogonal(int n, Rng& rng) {
    Mat Q = haar_orthogonal(n, rng);
    if (n > 0 && Q.determinant() < 0) Q.col(0) *= -1.0;
    return Q;
}

Vec random_gaussian(int n, Rng& rng) {
    std::normal_distribution<double> normal;
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
}

namespace {

void rotate_columns(Mat& U, const std::vector<int>& cols, const Mat& Q) {
    if (cols.empty()) return;
    Mat block(U.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) block.col(j) = U.col(cols[j]);
    block = block * Q;
    for (std::size_t j = 0; j < cols.size(); ++j) U.col(cols[j]) = block.col(j);
}

std::vector<int> index_range(int first, int last) {
    std::vector<int> out(std::max(0, last - first));
    std::iota(out.begin(), out.end(), first);
    return out;
}

/// Haar orthogonal matrix with prescribed determinant sign.
Mat haar_with_det(int n, double det_sign, Rng& rng) {
    Mat Q = haar_orthogonal(n, rng);
    if (n > 0 && Q.determinant() * det_sign < 0) Q.col(0) *= -1.0;
    return Q;
}

Decomposition resample(const Decomposition& base, const Vec& g, double tie_tol, Rng& rng) {
    Decomposition d = base;
    const SystemKind& kind = base.kind;
    const int n = kind.group_dim();
    switch (kind.family) {
    case Family::TrivialNorm:
        if (std::abs(g[0]) <= tie_tol) {
            d.U = haar_orthogonal(kind.rows, rng);
        } else {
            rotate_columns(d.U, index_range(1, kind.rows), haar_orthogonal(kind.rows - 1, rng));
        }
        break;
    case Family::EigSym:
        for (auto [first, last] : spectral_clusters(g.head(n), tie_tol))
            rotate_columns(d.U, index_range(first, last), haar_orthogonal(last - first, rng));
        break;
    case Family::Svd: {
        int nonzero = n;
        while (nonzero > 0 && g[nonzero - 1] <= tie_tol) --nonzero;
        for (auto [first, last] : spectral_clusters(g.head(nonzero), tie_tol)) {
            const Mat Q = haar_orthogonal(last - first, rng);
            rotate_columns(d.U, index_range(first, last), Q);
            rotate_columns(d.V, index_range(first, last), Q);
        }
        rotate_columns(d.U, index_range(nonzero, kind.rows),
                       haar_orthogonal(kind.rows - nonzero, rng));
        rotate_columns(d.V, index_range(nonzero, kind.cols),
                       haar_orthogonal(kind.cols - nonzero, rng));
        break;
    }
    case Family::SignedSvd: {
        int nonzero = n;
        while (nonzero > 0 && std::abs(g[nonzero - 1]) <= tie_tol) --nonzero;
        const auto clusters = spectral_clusters(g.head(nonzero), tie_tol);
        std::vector<Mat> qs;
        double parity = 1.0;
        for (auto [first, last] : clusters) {
            qs.push_back(haar_orthogonal(last - first, rng));
            parity *= qs.back().determinant() < 0 ? -1.0 : 1.0;
        }
        if (nonzero < n) {
            // Null block absorbs the parity: U and V rotate independently there.
            rotate_columns(d.U, index_range(nonzero, n), haar_with_det(n - nonzero, parity, rng));
            rotate_columns(d.V, index_range(nonzero, n), haar_with_det(n - nonzero, parity, rng));
        } else if (parity < 0 && !qs.empty()) {
            qs.back().col(0) *= -1.0;
        }
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            const auto [first, last] = clusters[c];
            rotate_columns(d.U, index_range(first, last), qs[c]);
            rotate_columns(d.V, index_range(first, last), qs[c]);
        }
        break;
    }
    }
    return d;
}

} // namespace

std::vector<Decomposition> sample_decompositions(const SystemKind& kind, const Ambient& X,
                                                 int count, std::optional<double> tie_tol,
                                                 Rng& rng) {
    if (count < 1) throw Error(ErrorCode::InvalidParam, "count must be >= 1");
    const double tol = tie_tol.value_or(default_tie_tol(X));
    const Decomposition base = decompose(kind, X, tol);
    const Vec g = spectrum(kind, X);
    std::vector<Decomposition> out;
    out.reserve(count);
    out.push_back(base);
    for (int i = 1; i < count; ++i) out.push_back(resample(base, g, tol, rng));
    return out;
}

Ambient random_ambient(const SystemKind& kind, Rng& rng, double scale) {
    std::normal_distribution<double> normal;
    Ambient X(Mat(kind.rows, kind.cols), 0.0);
    for (int j = 0; j < kind.cols; ++j)
        for (int i = 0; i < kind.rows; ++i) X.data(i, j) = scale * normal(rng);
    if (kind.family == Family::EigSym) X.data = (0.5 * (X.data + X.data.transpose())).eval();
    if (kind.product) X.xi = scale * normal(rng);
    return X;
}

Ambient random_ambient_with_ties(const SystemKind& kind, Rng& rng) {
    const int n = kind.group_dim();
    std::uniform_int_distribution<int> pick(0, 3);
    const double levels[] = {-1.0, 0.0, 1.0, 2.0};
    Vec x(kind.spectrum_dim());
    for (int i = 0; i < n; ++i) x[i] = levels[pick(rng)];
    if (kind.product) x[n] = std::normal_distribution<double>()(rng);
    Decomposition d{kind, {}, {}};
    switch (kind.family) {
    case Family::TrivialNorm:
    case Family::EigSym:
        d.U = haar_orthogonal(kind.rows, rng);
        break;
    case Family::Svd:
        d.U = haar_orthogonal(kind.rows, rng);
        d.V = haar_orthogonal(kind.cols, rng);
        break;
    case Family::SignedSvd:
        d.U = haar_special_orthogonal(kind.rows, rng);
        d.V = haar_special_orthogonal(kind.cols, rng);
        break;
    }
    return apply_isometry(d, x);
}

int ambient_dim(const SystemKind& kind) {
    const int base = kind.family == Family::EigSym ? kind.rows * (kind.rows + 1) / 2
                                                   : kind.rows * kind.cols;
    return base + (kind.product ? 1 : 0);
}

Vec to_coords(const SystemKind& kind, const Ambient& X) {
    Vec c(ambient_dim(kind));
    int k = 0;
    if (kind.family == Family::EigSym) {
        const int n = kind.rows;
        for (int i = 0; i < n; ++i) c[k++] = X.data(i, i);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                c[k++] = std::sqrt(2.0) * 0.5 * (X.data(i, j) + X.data(j, i));
    } else {
        for (int j = 0; j < kind.cols; ++j)
            for (int i = 0; i < kind.rows; ++i) c[k++] = X.data(i, j);
    }
    if (kind.product) c[k++] = X.xi;
    return c;
}

Ambient from_coords(const SystemKind& kind, const Vec& c) {
    if (c.size() != ambient_dim(kind))
        throw Error(ErrorCode::InvalidShape, "coordinate vector has wrong dimension");
    Ambient X(Mat(kind.rows, kind.cols), 0.0);
    int k = 0;
    if (kind.family == Family::EigSym) {
        const int n = kind.rows;
        for (int i = 0; i < n; ++i) X.data(i, i) = c[k++];
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) X.data(i, j) = X.data(j, i) = c[k++] / std::sqrt(2.0);
    } else {
        for (int j = 0; j < kind.cols; ++j)
            for (int i = 0; i < kind.rows; ++i) X.data(i, j) = c[k++];
    }
    if (kind.product) X.xi = c[k++];
    return X;
}

} // namespace specvar
