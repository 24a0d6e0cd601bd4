#pragma once

/**
 * @file projective_geometry.hpp
 * @brief Homogeneous-coordinate primitives, twisted polygons and their canonical (z, w) coordinates.
 *
 * Representatives are rescaled to unit max-absolute-entry after every construction.
 *
 * Canonical coordinates of a twisted polygon v (indices mod n, wrapped through the monodromy):
 *
 *   z_i = [ v_{i-2}, v_{i-1}, (v_{i-2}v_{i-1}) ^ (v_i v_{i+1}), (v_{i-2}v_{i-1}) ^ (v_{i+1}v_{i+2}) ]
 *   w_i = [ (v_{i-2}v_{i-1}) ^ (v_{i+1}v_{i+2}), (v_{i-1}v_i) ^ (v_{i+1}v_{i+2}), v_{i+1}, v_{i+2} ]
 *
 * where (pq) is the line through p and q, ^ is intersection and [.,.,.,.] the cross ratio.
 *
 * Labeling of the pentagram image: vertex i of the image is (v_{i-1}v_{i+1}) ^ (v_i v_{i+2}).
 * With this labeling canonical_coordinates(geometric_pentagram_step(P)) == step_T(canonical_coordinates(P));
 * every other shift of the labels breaks that identity.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pentatrope/errors.hpp"
#include "pentatrope/pentagram_dynamics.hpp"

namespace pentatrope {

/// Incidence residual allowed for points declared collinear.
inline constexpr double collinearity_tol = 1e-8;
/// Threshold on normalized cross products, determinants and cross-ratio denominators.
inline constexpr double degeneracy_tol = 1e-12;

namespace detail {

inline Eigen::Vector3d normalize_max(const Eigen::Vector3d& h) {
    const double m = h.cwiseAbs().maxCoeff();
    return h / m;
}

}  // namespace detail

/// A point of RP^2 held as a nonzero homogeneous triple.
class ProjectivePoint {
public:
    ProjectivePoint(double h0, double h1, double h2) : ProjectivePoint(Eigen::Vector3d(h0, h1, h2)) {}

    explicit ProjectivePoint(const Eigen::Vector3d& h) {
        if (!h.allFinite() || h.cwiseAbs().maxCoeff() == 0.0) {
            throw degeneracy_error("projective point needs a finite nonzero representative");
        }
        h_ = detail::normalize_max(h);
    }

    const Eigen::Vector3d& coords() const noexcept { return h_; }

    /// Equality up to scale: |p x q| <= tol |p| |q|.
    bool equivalent(const ProjectivePoint& other, double tol = 1e-9) const {
        return h_.cross(other.h_).norm() <= tol * h_.norm() * other.h_.norm();
    }

private:
    Eigen::Vector3d h_;
};

/// A line of RP^2 by its coefficient triple l, incidence <l, p> = 0.
class ProjectiveLine {
public:
    explicit ProjectiveLine(const Eigen::Vector3d& l) {
        if (!l.allFinite() || l.cwiseAbs().maxCoeff() == 0.0) {
            throw degeneracy_error("projective line needs a finite nonzero coefficient triple");
        }
        l_ = detail::normalize_max(l);
    }

    const Eigen::Vector3d& coeffs() const noexcept { return l_; }

    /// |<l, p>| relative to |l| |p|.
    double incidence(const ProjectivePoint& p) const {
        return std::abs(l_.dot(p.coords())) / (l_.norm() * p.coords().norm());
    }

    bool equivalent(const ProjectiveLine& other, double tol = 1e-9) const {
        return l_.cross(other.l_).norm() <= tol * l_.norm() * other.l_.norm();
    }

private:
    Eigen::Vector3d l_;
};

namespace detail {

inline Eigen::Vector3d checked_cross(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const char* what) {
    const Eigen::Vector3d ua = a / a.norm();
    const Eigen::Vector3d ub = b / b.norm();
    const Eigen::Vector3d c = ua.cross(ub);
    if (c.norm() <= degeneracy_tol) {
        throw degeneracy_error(what);
    }
    return c;
}

}  // namespace detail

inline ProjectiveLine line_through(const ProjectivePoint& p, const ProjectivePoint& q) {
    return ProjectiveLine(detail::checked_cross(p.coords(), q.coords(), "line_through: coincident points"));
}

inline ProjectivePoint intersect(const ProjectiveLine& l1, const ProjectiveLine& l2) {
    return ProjectivePoint(detail::checked_cross(l1.coeffs(), l2.coeffs(), "intersect: identical lines"));
}

/// [t1,t2,t3,t4] = (t1-t2)(t3-t4) / ((t1-t3)(t2-t4)).
inline double cross_ratio(double t1, double t2, double t3, double t4) {
    const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4), 1e-300});
    const double d13 = t1 - t3;
    const double d24 = t2 - t4;
    if (std::abs(d13) <= degeneracy_tol * scale || std::abs(d24) <= degeneracy_tol * scale) {
        throw degeneracy_error("cross_ratio: vanishing denominator");
    }
    return (t1 - t2) * (t3 - t4) / (d13 * d24);
}

/// Cross ratio of four collinear points computed in the line basis {a, b}:
/// each p_k = alpha_k a + beta_k b and the affine parameters beta/alpha are used homogeneously,
/// so points at the parameter's infinity are handled. The basis must span the common line.
inline double cross_ratio_in_basis(const std::array<ProjectivePoint, 4>& p, const Eigen::Vector3d& a,
                                   const Eigen::Vector3d& b) {
    Eigen::Matrix<double, 3, 2> basis;
    basis.col(0) = a;
    basis.col(1) = b;
    const auto solver = basis.colPivHouseholderQr();
    std::array<Eigen::Vector2d, 4> par;
    for (std::size_t k = 0; k < 4; ++k) {
        Eigen::Vector3d h = p[k].coords() / p[k].coords().norm();
        par[k] = solver.solve(h);
        par[k] /= par[k].norm();
    }
    auto det = [&](std::size_t i, std::size_t j) { return par[i](0) * par[j](1) - par[j](0) * par[i](1); };
    const double d13 = det(0, 2);
    const double d24 = det(1, 3);
    if (std::abs(d13) <= degeneracy_tol || std::abs(d24) <= degeneracy_tol) {
        throw degeneracy_error("cross_ratio_points: vanishing denominator");
    }
    return det(0, 1) * det(2, 3) / (d13 * d24);
}

/// Cross ratio of four collinear, pairwise distinct points.
inline double cross_ratio_points(const ProjectivePoint& p1, const ProjectivePoint& p2, const ProjectivePoint& p3,
                                 const ProjectivePoint& p4) {
    const std::array<ProjectivePoint, 4> p{p1, p2, p3, p4};
    Eigen::Matrix<double, 4, 3> rows;
    for (std::size_t k = 0; k < 4; ++k) {
        rows.row(static_cast<Eigen::Index>(k)) = (p[k].coords() / p[k].coords().norm()).transpose();
    }
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            if (rows.row(static_cast<Eigen::Index>(i)).cross(rows.row(static_cast<Eigen::Index>(j))).norm() <=
                degeneracy_tol) {
                throw degeneracy_error("cross_ratio_points: coincident points");
            }
        }
    }
    // Best-fit line: right singular vector of the smallest singular value.
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(rows, Eigen::ComputeFullV);
    const Eigen::Vector3d line = svd.matrixV().col(2);
    for (std::size_t k = 0; k < 4; ++k) {
        if (std::abs(rows.row(static_cast<Eigen::Index>(k)).dot(line)) > collinearity_tol) {
            throw geometry_error("cross_ratio_points: points are not collinear");
        }
    }
    // Basis of the line: the two dominant singular directions.
    return cross_ratio_in_basis(p, svd.matrixV().col(0), svd.matrixV().col(1));
}

/// A bi-infinite vertex sequence with vertex(k + n) = M vertex(k).
class TwistedPolygon {
public:
    TwistedPolygon(std::vector<ProjectivePoint> base_vertices, const Eigen::Matrix3d& monodromy)
        : vertices_(std::move(base_vertices)) {
        if (vertices_.size() < min_polygon_size) {
            throw domain_error("twisted polygons need n >= 5, got n = " + std::to_string(vertices_.size()));
        }
        if (!monodromy.allFinite()) {
            throw domain_error("monodromy must be finite");
        }
        const double fro = monodromy.norm();
        if (fro == 0.0 || std::abs((monodromy / fro).determinant()) <= degeneracy_tol) {
            throw degeneracy_error("monodromy must be invertible");
        }
        monodromy_ = monodromy;
        inverse_ = monodromy.inverse();
    }

    /// Closed polygon: monodromy = identity.
    static TwistedPolygon closed(std::vector<ProjectivePoint> vertices) {
        return TwistedPolygon(std::move(vertices), Eigen::Matrix3d::Identity());
    }

    std::size_t size() const noexcept { return vertices_.size(); }
    const std::vector<ProjectivePoint>& base_vertices() const noexcept { return vertices_; }
    const Eigen::Matrix3d& monodromy() const noexcept { return monodromy_; }

    /// vertex(k) for any integer k, applying M or M^{-1} |k div n| times.
    ProjectivePoint vertex(std::ptrdiff_t k) const {
        const auto n = static_cast<std::ptrdiff_t>(vertices_.size());
        std::ptrdiff_t q = k / n;
        std::ptrdiff_t r = k % n;
        if (r < 0) {
            r += n;
            --q;
        }
        Eigen::Vector3d h = vertices_[static_cast<std::size_t>(r)].coords();
        for (std::ptrdiff_t i = 0; i < q; ++i) {
            h = detail::normalize_max(monodromy_ * h);
        }
        for (std::ptrdiff_t i = 0; i > q; --i) {
            h = detail::normalize_max(inverse_ * h);
        }
        return ProjectivePoint(h);
    }

    /// Applies Psi to every vertex and conjugates the monodromy: M -> Psi M Psi^{-1}.
    TwistedPolygon transformed(const Eigen::Matrix3d& psi) const {
        std::vector<ProjectivePoint> out;
        out.reserve(vertices_.size());
        for (const auto& v : vertices_) {
            out.emplace_back(psi * v.coords());
        }
        return TwistedPolygon(std::move(out), psi * monodromy_ * psi.inverse());
    }

private:
    std::vector<ProjectivePoint> vertices_;
    Eigen::Matrix3d monodromy_;
    Eigen::Matrix3d inverse_;
};

/// The 2n canonical coordinates. Throws geometry_error (with index()) at the first degenerate index.
inline SignedState canonical_coordinates(const TwistedPolygon& poly) {
    const std::size_t n = poly.size();
    std::vector<double> z(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto base = static_cast<std::ptrdiff_t>(i);
        auto v = [&](std::ptrdiff_t k) { return poly.vertex(base + k); };
        try {
            const ProjectiveLine back = line_through(v(-2), v(-1));
            const ProjectivePoint a = intersect(back, line_through(v(0), v(1)));
            const ProjectivePoint b = intersect(back, line_through(v(1), v(2)));
            const ProjectivePoint c = intersect(line_through(v(-1), v(0)), line_through(v(1), v(2)));
            z[i] = cross_ratio_points(v(-2), v(-1), a, b);
            w[i] = cross_ratio_points(b, c, v(1), v(2));
        } catch (const geometry_error& e) {
            throw geometry_error(std::string("canonical_coordinates at i = ") + std::to_string(i) + ": " + e.what(),
                                 i);
        }
    }
    return SignedState(std::move(z), std::move(w));
}

/// One pentagram step: image vertex i = (v_{i-1} v_{i+1}) ^ (v_i v_{i+2}); monodromy unchanged.
inline TwistedPolygon geometric_pentagram_step(const TwistedPolygon& poly) {
    const std::size_t n = poly.size();
    std::vector<ProjectivePoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        try {
            out.push_back(intersect(line_through(poly.vertex(k - 1), poly.vertex(k + 1)),
                                    line_through(poly.vertex(k), poly.vertex(k + 2))));
        } catch (const geometry_error& e) {
            throw geometry_error(std::string("pentagram step at i = ") + std::to_string(i) + ": " + e.what(), i);
        }
    }
    TwistedPolygon image(std::move(out), poly.monodromy());
    // Three collinear consecutive vertices make two image vertices coincide.
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        if (image.vertex(k).equivalent(image.vertex(k + 1), degeneracy_tol * 1e3)) {
            throw degeneracy_error("pentagram step: image vertices " + std::to_string(i) + " and " +
                                       std::to_string(i + 1) + " coincide",
                                   i);
        }
    }
    return image;
}

}  // namespace pentatrope
