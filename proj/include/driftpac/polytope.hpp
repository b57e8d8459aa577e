#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace driftpac {

/// Dense row-major matrix, just enough for facet normals.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }

    bool operator==(const Matrix&) const = default;
};

double dot(std::span<const double> a, std::span<const double> b);

/// Facet representation {x : a_j . x + b_j <= 0 for all j}.
struct Polytope {
    Matrix A;
    std::vector<double> b;

    Polytope() = default;
    Polytope(Matrix a, std::vector<double> offsets);

    std::size_t facets() const { return b.size(); }
    std::size_t dim() const { return A.cols; }

    /// max_j (a_j . x + b_j); -inf for a polytope with no facets.
    double max_violation(std::span<const double> x) const;

    bool operator==(const Polytope&) const = default;
};

/// Indicator of the polytope: 1 iff every facet inequality holds (boundary included).
int label(const Polytope& p, std::span<const double> x);

struct BoxDomain {
    std::vector<double> lower;
    std::vector<double> upper;

    BoxDomain() = default;
    BoxDomain(std::vector<double> lo, std::vector<double> hi);
    std::size_t dim() const { return lower.size(); }
    bool contains(std::span<const double> x, double tol = 0.0) const;
};

/// Per-facet box for (a_j, b_j); the last coordinate is the offset.
struct CoeffBox {
    std::vector<std::vector<double>> lower;  // n_f rows of length n+1
    std::vector<std::vector<double>> upper;

    std::size_t facets() const { return lower.size(); }

    /// Same box [-a_bound, a_bound]^n x [-b_bound, b_bound] for every facet.
    static CoeffBox uniform(std::size_t n_f, std::size_t n, double a_bound, double b_bound);

    /// Degenerate a-part fixed to the rows of A, offsets in [b_lo_j, b_hi_j].
    static CoeffBox fixed_normals(const Matrix& A, std::span<const double> b_lo,
                                  std::span<const double> b_hi);

    /// True iff every interval has lower < 0 < upper.
    bool origin_interior() const;
};

struct BigM {
    std::vector<double> upper;  // M_j
    std::vector<double> lower;  // m_j

    bool operator==(const BigM&) const = default;
};

/// Exact sup/inf of a_j . x + b_j over X x C_j. Where the exact values fail
/// M_j > 0 > m_j (degenerate coefficient boxes), they are moved to +margin /
/// -margin respectively.
BigM big_m_bounds(const BoxDomain& domain, const CoeffBox& coeffs, double margin = 1.0);

enum class VolumeMode { Exact2D, OffsetSum };

/// Exact2D: area of a bounded 2-D polytope; OffsetSum: sum_j (-b_j).
double volume_surrogate(const Polytope& p, VolumeMode mode);

/// Vertices of a 2-D polytope in counter-clockwise order (empty if the
/// polytope is empty). Throws std::domain_error if it is unbounded.
std::vector<std::array<double, 2>> vertices_2d(const Polytope& p, double tol = 1e-9);

/// The fixed rotated-rectangle normals [R(t); -R(t)] used for the braking
/// example: rows (cos t, sin t), (-sin t, cos t), (-cos t, -sin t), (sin t, -cos t).
Matrix rotated_box_normals(double angle);

nlohmann::json to_json(const Polytope& p);
Polytope polytope_from_json(const nlohmann::json& j);

}  // namespace driftpac
