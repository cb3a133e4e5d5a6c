#include "hull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>

#include "switchsim/errors.hpp"

namespace switchsim::detail {

std::vector<Eigen::Vector2d> hull_2d(std::vector<Eigen::Vector2d> pts) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const auto& a, const auto& b) {
                              return (a - b).norm() < 1e-12;
                          }),
              pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;

    auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                    const Eigen::Vector2d& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };

    std::vector<Eigen::Vector2d> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower chain
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-12) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper chain
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-12) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

namespace {

struct Tri {
    std::array<int, 3> v;
    Eigen::Vector3d normal;
    double offset = 0.0;
    bool alive = true;
};

}  // namespace

std::vector<HullFace3> hull_3d(const std::vector<Eigen::Vector3d>& input) {
    // Dedupe.
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(input.size());
    for (const auto& p : input) {
        bool dup = false;
        for (const auto& q : pts)
            if ((p - q).norm() < 1e-12) { dup = true; break; }
        if (!dup) pts.push_back(p);
    }
    const int n = static_cast<int>(pts.size());
    if (n < 4) throw GeometryError("hull: point set is not full-dimensional");

    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
    const double eps = 1e-9 * std::max(1.0, scale);

    // Initial tetrahedron: spread-out extreme points.
    int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
    double best = -1.0;
    for (int i = 1; i < n; ++i) {
        const double d = (pts[i] - pts[i0]).norm();
        if (d > best) { best = d; i1 = i; }
    }
    if (best < eps) throw GeometryError("hull: point set is not full-dimensional");
    best = -1.0;
    for (int i = 0; i < n; ++i) {
        const double d = (pts[i] - pts[i0]).cross(pts[i1] - pts[i0]).norm();
        if (d > best) { best = d; i2 = i; }
    }
    if (best < eps) throw GeometryError("hull: point set is not full-dimensional");
    const Eigen::Vector3d plane_n = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
    best = -1.0;
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(plane_n.dot(pts[i] - pts[i0]));
        if (d > best) { best = d; i3 = i; }
    }
    if (best < eps) throw GeometryError("hull: point set is not full-dimensional");

    const Eigen::Vector3d interior =
        (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;

    std::vector<Tri> faces;
    auto make_face = [&](int a, int b, int c) {
        Tri t;
        t.v = {a, b, c};
        Eigen::Vector3d nn = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
        const double len = nn.norm();
        if (len < 1e-15) { t.alive = false; return t; }
        nn /= len;
        if (nn.dot(interior - pts[a]) > 0) nn = -nn;  // outward
        t.normal = nn;
        t.offset = nn.dot(pts[a]);
        return t;
    };
    faces.push_back(make_face(i0, i1, i2));
    faces.push_back(make_face(i0, i1, i3));
    faces.push_back(make_face(i0, i2, i3));
    faces.push_back(make_face(i1, i2, i3));

    for (int p = 0; p < n; ++p) {
        if (p == i0 || p == i1 || p == i2 || p == i3) continue;
        // Visible faces.
        std::vector<int> visible;
        for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
            if (!faces[f].alive) continue;
            if (faces[f].normal.dot(pts[p]) - faces[f].offset > eps) visible.push_back(f);
        }
        if (visible.empty()) continue;

        // Horizon edges: edges of visible faces not shared with another visible face.
        std::map<std::pair<int, int>, int> edge_count;
        auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
        for (int f : visible)
            for (int e = 0; e < 3; ++e)
                edge_count[key(faces[f].v[e], faces[f].v[(e + 1) % 3])]++;
        std::vector<std::pair<int, int>> horizon;
        for (const auto& [edge, cnt] : edge_count)
            if (cnt == 1) horizon.push_back(edge);
        for (int f : visible) faces[f].alive = false;
        for (const auto& [a, b] : horizon) {
            Tri t = make_face(a, b, p);
            if (t.alive) faces.push_back(t);
        }
    }

    std::vector<HullFace3> out;
    for (const auto& f : faces)
        if (f.alive) out.push_back({f.normal, f.offset});
    return out;
}

}  // namespace switchsim::detail
