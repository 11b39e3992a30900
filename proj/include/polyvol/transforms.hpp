#pragma once

// Linear preprocessing: random rotations and MVEE rounding.

#include "polyvol/inner_ball.hpp"
#include "polyvol/polytope.hpp"
#include "polyvol/rng.hpp"
#include "polyvol/walks.hpp"

#include <cmath>
#include <optional>

namespace polyvol {

/// {x : (x - c)^T E (x - c) <= 1}.
template <typename Scalar>
struct Ellipsoid {
    Vec<Scalar> center;
    Mat<Scalar> shape;

    Index dimension() const { return center.size(); }

    Scalar distance2(const Vec<Scalar>& x) const
    {
        Vec<Scalar> y = x - center;
        return y.dot(shape * y);
    }

    bool contains(const Vec<Scalar>& x, Scalar tol = Scalar(0)) const { return distance2(x) <= 1 + tol; }
};

template <typename Scalar>
struct RoundingResult {
    Polytope<Scalar> rounded;
    Mat<Scalar> T;       // rounded = {T (x - shift) : x in P}
    Vec<Scalar> shift;
    Scalar det;          // det(T)
};

namespace detail {

template <typename Scalar>
std::optional<Scalar> scale_volume(const std::optional<Scalar>& v, Scalar factor)
{
    if (!v) return std::nullopt;
    return *v * factor;
}

// x -> T (x - c) applied to a polytope.
template <typename Scalar>
Polytope<Scalar> apply_affine(const Polytope<Scalar>& P, const Mat<Scalar>& T, const Vec<Scalar>& c)
{
    Eigen::PartialPivLU<Mat<Scalar>> lu(T);
    const Scalar adet = std::abs(lu.determinant());
    return std::visit(
        [&](const auto& q) -> Polytope<Scalar> {
            using Q = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<Q, HPolytope<Scalar>>) {
                Mat<Scalar> Ainv = lu.solve(Mat<Scalar>::Identity(T.rows(), T.cols()));
                return HPolytope<Scalar>(q.A * Ainv, q.b - q.A * c, scale_volume(q.known_volume, adet));
            } else if constexpr (std::is_same_v<Q, VPolytope<Scalar>>) {
                return VPolytope<Scalar>((q.V.rowwise() - c.transpose()) * T.transpose(),
                                         scale_volume(q.known_volume, adet));
            } else if constexpr (std::is_same_v<Q, Zonotope<Scalar>>) {
                // generators are directions; a shift would leave the class
                require(c.isZero(), "apply_affine: zonotopes admit linear maps only");
                return Zonotope<Scalar>(q.G * T.transpose(), scale_volume(q.known_volume, adet));
            } else {
                return VPolyIntersection<Scalar>((q.V1.rowwise() - c.transpose()) * T.transpose(),
                                                 (q.V2.rowwise() - c.transpose()) * T.transpose(),
                                                 scale_volume(q.known_volume, adet));
            }
        },
        P);
}

}  // namespace detail

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with R's
/// diagonal made positive.
template <typename Scalar>
Mat<Scalar> random_orthogonal(Index d, Rng& rng)
{
    Mat<Scalar> G(d, d);
    for (Index j = 0; j < d; ++j) G.col(j) = rng.gaussian_vector<Scalar>(d);
    Eigen::HouseholderQR<Mat<Scalar>> qr(G);
    Mat<Scalar> Q = qr.householderQ() * Mat<Scalar>::Identity(d, d);
    Mat<Scalar> R = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (Index j = 0; j < d; ++j)
        if (R(j, j) < Scalar(0)) Q.col(j) = -Q.col(j);
    return Q;
}

template <typename Scalar>
struct RotationResult {
    Polytope<Scalar> rotated;
    Mat<Scalar> T;
};

/// P' = {T x : x in P}; a random orthogonal T when none is given.
template <typename Scalar>
RotationResult<Scalar> rotate_polytope(const Polytope<Scalar>& P, std::optional<Mat<Scalar>> T, std::uint64_t seed)
{
    const Index d = dimension(P);
    Mat<Scalar> M;
    if (T) {
        M = *T;
        require(M.rows() == d && M.cols() == d, "rotate_polytope: T must be d x d");
        Eigen::FullPivLU<Mat<Scalar>> lu(M);
        if (!lu.isInvertible()) throw InputError("rotate_polytope: T is singular");
    } else {
        Rng rng(seed);
        M = random_orthogonal<Scalar>(d, rng);
    }
    return {detail::apply_affine(P, M, Vec<Scalar>(Vec<Scalar>::Zero(d))), M};
}

/// Khachiyan's algorithm for the minimum volume enclosing ellipsoid of the
/// rows of X, with Todd-Yildirim away steps. Rank-one updates keep each
/// iteration at O(n d). The result is scaled so that every point is inside.
template <typename Scalar>
Ellipsoid<Scalar> mvee(const Mat<Scalar>& X, Scalar tolerance = Scalar(1e-6), int max_iter = 100000)
{
    const Index n = X.rows(), d = X.cols();
    if (n < d + 1) throw DegenerateError("mvee: need at least d+1 points");
    Mat<Scalar> Q(d + 1, n);
    Q.topRows(d) = X.transpose();
    Q.row(d).setOnes();
    {
        Eigen::FullPivLU<Mat<Scalar>> lu(Q);
        lu.setThreshold(Scalar(1e-10));
        if (lu.rank() < d + 1) throw DegenerateError("mvee: points do not span the space");
    }
    const Scalar dd = Scalar(d + 1);
    Vec<Scalar> u = Vec<Scalar>::Constant(n, Scalar(1) / Scalar(n));
    Mat<Scalar> Xinv;
    Vec<Scalar> M;
    auto refresh = [&] {
        Mat<Scalar> S = Q * u.asDiagonal() * Q.transpose();
        Xinv = S.ldlt().solve(Mat<Scalar>::Identity(d + 1, d + 1));
        M = (Q.transpose() * Xinv).cwiseProduct(Q.transpose()).rowwise().sum();
    };
    refresh();
    int it = 0;
    for (; it < max_iter; ++it) {
        Index jmax;
        Scalar kmax = M.maxCoeff(&jmax);
        Index jmin = -1;
        Scalar kmin = std::numeric_limits<Scalar>::infinity();
        for (Index i = 0; i < n; ++i)
            if (u(i) > Scalar(0) && M(i) < kmin) {
                kmin = M(i);
                jmin = i;
            }
        if (kmax <= dd * (1 + tolerance)) break;
        Index j;
        Scalar kappa, tau;
        if (kmax / dd - 1 >= 1 - kmin / dd) {
            j = jmax;
            kappa = kmax;
            tau = (kappa - dd) / (dd * (kappa - 1));
        } else {
            j = jmin;
            kappa = kmin;
            tau = (kappa - dd) / (dd * (kappa - 1));
            tau = std::max(tau, -u(j) / (1 - u(j)));
        }
        Vec<Scalar> w = Xinv * Q.col(j);
        Vec<Scalar> proj = Q.transpose() * w;
        const Scalar denom = (1 - tau) + tau * kappa;
        Xinv = (Xinv - (tau / denom) * w * w.transpose()) / (1 - tau);
        M = (M - (tau / denom) * proj.cwiseAbs2()) / (1 - tau);
        u *= (1 - tau);
        u(j) += tau;
        if (u(j) < Scalar(0)) u(j) = 0;
        if ((it + 1) % 1000 == 0) refresh();
    }
    if (it == max_iter) throw NumericalError("mvee: iteration cap reached");
    Vec<Scalar> c = X.transpose() * u;
    Mat<Scalar> C = X.transpose() * u.asDiagonal() * X - c * c.transpose();
    Mat<Scalar> E = C.ldlt().solve(Mat<Scalar>::Identity(d, d)) / Scalar(d);
    E = Scalar(0.5) * (E + E.transpose());
    Ellipsoid<Scalar> ell{c, E};
    Scalar worst = 0;
    for (Index i = 0; i < n; ++i) worst = std::max(worst, ell.distance2(Vec<Scalar>(X.row(i).transpose())));
    if (worst > Scalar(1)) ell.shape /= worst;
    return ell;
}

namespace detail {

template <typename Scalar>
Mat<Scalar> rounding_points(const Polytope<Scalar>& P, Rng& rng)
{
    return std::visit(
        [&](const auto& q) -> Mat<Scalar> {
            using Q = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<Q, VPolytope<Scalar>>) {
                return q.V;
            } else {
                const Index d = q.dimension();
                Mat<Scalar> S = sample_points(q, 10 * d, TargetDistribution<Scalar>::uniform(), rng).points;
                if constexpr (std::is_same_v<Q, Zonotope<Scalar>>) {
                    // zonotopes are centrally symmetric; so is their MVEE
                    Mat<Scalar> both(2 * S.rows(), d);
                    both << S, -S;
                    return both;
                }
                return S;
            }
        },
        P);
}

}  // namespace detail

/// Maps the MVEE of a point set of P (10d uniform samples, or the vertices
/// of a V-polytope) to the unit ball and applies the same map to P.
template <typename Scalar>
RoundingResult<Scalar> round_polytope(const Polytope<Scalar>& P, Rng& rng)
{
    Mat<Scalar> X = detail::rounding_points(P, rng);
    Ellipsoid<Scalar> ell = mvee(X);
    if (std::holds_alternative<Zonotope<Scalar>>(P)) ell.center.setZero();
    Eigen::LLT<Mat<Scalar>> llt(ell.shape);
    if (llt.info() != Eigen::Success) throw DegenerateError("round_polytope: rounding ellipsoid is not positive definite");
    Mat<Scalar> T = llt.matrixL().transpose();
    Scalar det = T.diagonal().prod();
    return {detail::apply_affine(P, T, ell.center), T, ell.center, det};
}

template <typename Scalar>
RoundingResult<Scalar> round_polytope(const Polytope<Scalar>& P, std::uint64_t seed)
{
    Rng rng(seed);
    return round_polytope(P, rng);
}

}  // namespace polyvol
