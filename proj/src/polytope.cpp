#include "driftpac/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace driftpac {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m;
    m.rows = rows.size();
    m.cols = rows.empty() ? 0 : rows.front().size();
    m.data.reserve(m.rows * m.cols);
    for (const auto& r : rows) {
        if (r.size() != m.cols) throw std::invalid_argument("Matrix: ragged rows");
        m.data.insert(m.data.end(), r.begin(), r.end());
    }
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

Polytope::Polytope(Matrix a, std::vector<double> offsets) : A(std::move(a)), b(std::move(offsets)) {
    if (A.rows != b.size()) throw std::invalid_argument("Polytope: rows of A must match length of b");
}

double Polytope::max_violation(std::span<const double> x) const {
    if (x.size() != A.cols) throw std::invalid_argument("Polytope: point dimension mismatch");
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) worst = std::max(worst, dot(A.row(j), x) + b[j]);
    return worst;
}

int label(const Polytope& p, std::span<const double> x) {
    if (x.size() != p.A.cols) throw std::invalid_argument("label: point dimension mismatch");
    for (std::size_t j = 0; j < p.b.size(); ++j)
        if (dot(p.A.row(j), x) + p.b[j] > 0.0) return 0;
    return 1;
}

BoxDomain::BoxDomain(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) throw std::invalid_argument("BoxDomain: bound lengths differ");
    for (std::size_t k = 0; k < lower.size(); ++k)
        if (!(lower[k] <= upper[k])) throw std::invalid_argument("BoxDomain: lower > upper");
}

bool BoxDomain::contains(std::span<const double> x, double tol) const {
    if (x.size() != lower.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] < lower[k] - tol || x[k] > upper[k] + tol) return false;
    return true;
}

CoeffBox CoeffBox::uniform(std::size_t n_f, std::size_t n, double a_bound, double b_bound) {
    CoeffBox c;
    std::vector<double> lo(n + 1, -a_bound), hi(n + 1, a_bound);
    lo[n] = -b_bound;
    hi[n] = b_bound;
    c.lower.assign(n_f, lo);
    c.upper.assign(n_f, hi);
    return c;
}

CoeffBox CoeffBox::fixed_normals(const Matrix& A, std::span<const double> b_lo,
                                 std::span<const double> b_hi) {
    if (b_lo.size() != A.rows || b_hi.size() != A.rows)
        throw std::invalid_argument("CoeffBox: offset bounds must have one entry per facet");
    CoeffBox c;
    for (std::size_t j = 0; j < A.rows; ++j) {
        std::vector<double> r(A.row(j).begin(), A.row(j).end());
        auto lo = r, hi = r;
        lo.push_back(b_lo[j]);
        hi.push_back(b_hi[j]);
        c.lower.push_back(std::move(lo));
        c.upper.push_back(std::move(hi));
    }
    return c;
}

bool CoeffBox::origin_interior() const {
    for (std::size_t j = 0; j < lower.size(); ++j)
        for (std::size_t k = 0; k < lower[j].size(); ++k)
            if (!(lower[j][k] < 0.0 && 0.0 < upper[j][k])) return false;
    return true;
}

BigM big_m_bounds(const BoxDomain& domain, const CoeffBox& coeffs, double margin) {
    const std::size_t n = domain.dim();
    BigM out;
    for (std::size_t j = 0; j < coeffs.facets(); ++j) {
        const auto& lo = coeffs.lower[j];
        const auto& hi = coeffs.upper[j];
        if (lo.size() != n + 1 || hi.size() != n + 1)
            throw std::invalid_argument("big_m_bounds: coefficient box has wrong dimension");
        double sup = hi[n];
        double inf = lo[n];
        for (std::size_t k = 0; k < n; ++k) {
            const double c[4] = {lo[k] * domain.lower[k], lo[k] * domain.upper[k],
                                 hi[k] * domain.lower[k], hi[k] * domain.upper[k]};
            sup += *std::max_element(c, c + 4);
            inf += *std::min_element(c, c + 4);
        }
        if (sup <= 0.0) sup = margin;
        if (inf >= 0.0) inf = -margin;
        out.upper.push_back(sup);
        out.lower.push_back(inf);
    }
    return out;
}

namespace {

bool has_recession_direction(const Polytope& p, double tol) {
    std::vector<std::array<double, 2>> candidates;
    for (std::size_t j = 0; j < p.facets(); ++j) {
        const double a0 = p.A(j, 0), a1 = p.A(j, 1);
        const double norm = std::hypot(a0, a1);
        if (norm == 0.0) continue;
        candidates.push_back({-a1 / norm, a0 / norm});
        candidates.push_back({a1 / norm, -a0 / norm});
    }
    if (candidates.empty()) return true;
    for (const auto& d : candidates) {
        bool ok = true;
        for (std::size_t j = 0; j < p.facets() && ok; ++j)
            ok = p.A(j, 0) * d[0] + p.A(j, 1) * d[1] <= tol * std::hypot(p.A(j, 0), p.A(j, 1));
        if (ok) return true;
    }
    return false;
}

}  // namespace

std::vector<std::array<double, 2>> vertices_2d(const Polytope& p, double tol) {
    if (p.dim() != 2) throw std::invalid_argument("vertices_2d: polytope must be 2-D");
    if (has_recession_direction(p, tol)) throw std::domain_error("vertices_2d: polytope is unbounded");

    std::vector<std::array<double, 2>> pts;
    for (std::size_t i = 0; i < p.facets(); ++i) {
        for (std::size_t j = i + 1; j < p.facets(); ++j) {
            const double a = p.A(i, 0), b = p.A(i, 1), c = p.A(j, 0), d = p.A(j, 1);
            const double det = a * d - b * c;
            if (std::fabs(det) < 1e-14) continue;
            // a_i . x = -b_i, a_j . x = -b_j
            const double x = (-p.b[i] * d + p.b[j] * b) / det;
            const double y = (-a * p.b[j] + c * p.b[i]) / det;
            const double pt[2] = {x, y};
            const double scale = 1.0 + std::fabs(x) + std::fabs(y);
            if (p.max_violation(pt) <= tol * scale) pts.push_back({x, y});
        }
    }
    if (pts.empty()) return pts;

    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [&](const auto& u, const auto& v) {
                              return std::fabs(u[0] - v[0]) <= 1e-9 * (1 + std::fabs(u[0])) &&
                                     std::fabs(u[1] - v[1]) <= 1e-9 * (1 + std::fabs(u[1]));
                          }),
              pts.end());
    double cx = 0.0, cy = 0.0;
    for (const auto& q : pts) {
        cx += q[0];
        cy += q[1];
    }
    cx /= static_cast<double>(pts.size());
    cy /= static_cast<double>(pts.size());
    std::sort(pts.begin(), pts.end(), [&](const auto& u, const auto& v) {
        return std::atan2(u[1] - cy, u[0] - cx) < std::atan2(v[1] - cy, v[0] - cx);
    });
    return pts;
}

double volume_surrogate(const Polytope& p, VolumeMode mode) {
    if (mode == VolumeMode::OffsetSum) {
        double s = 0.0;
        for (double bj : p.b) s -= bj;
        return s;
    }
    const auto v = vertices_2d(p);
    if (v.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const auto& u = v[k];
        const auto& w = v[(k + 1) % v.size()];
        twice += u[0] * w[1] - w[0] * u[1];
    }
    return 0.5 * std::fabs(twice);
}

Matrix rotated_box_normals(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return Matrix::from_rows({{c, s}, {-s, c}, {-c, -s}, {s, -c}});
}

nlohmann::json to_json(const Polytope& p) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t j = 0; j < p.facets(); ++j)
        rows.push_back(std::vector<double>(p.A.row(j).begin(), p.A.row(j).end()));
    return {{"A", rows}, {"b", p.b}};
}

Polytope polytope_from_json(const nlohmann::json& j) {
    if (!j.contains("A") || !j.contains("b"))
        throw std::invalid_argument("polytope JSON requires keys \"A\" and \"b\"");
    auto rows = j.at("A").get<std::vector<std::vector<double>>>();
    auto b = j.at("b").get<std::vector<double>>();
    Matrix A = Matrix::from_rows(rows);
    if (rows.empty()) A.cols = 0;
    return Polytope(std::move(A), std::move(b));
}

}  // namespace driftpac
