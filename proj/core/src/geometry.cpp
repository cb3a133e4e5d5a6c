#include "switchsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hull.hpp"
#include "switchsim/errors.hpp"

namespace switchsim {

namespace {

constexpr double kFacetTol = 1e-9;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Streaming componentwise-maximal filter. Only Pareto-maximal mixture points
// can support a facet with a nonnegative normal.
class ParetoSet {
  public:
    void insert(const Eigen::VectorXd& p) {
        for (const auto& q : pts_)
            if (((q - p).array() >= -1e-12).all()) return;  // dominated
        std::erase_if(pts_, [&](const Eigen::VectorXd& q) {
            return ((p - q).array() >= -1e-12).all();
        });
        pts_.push_back(p);
    }
    const std::vector<Eigen::VectorXd>& points() const { return pts_; }

  private:
    std::vector<Eigen::VectorXd> pts_;
};

// All mixture points sum_m psi_m x_m, x_m ranging over each state's set,
// reduced to the Pareto-maximal ones on the fly.
ParetoSet mixture_pareto_points(const ChannelModel& channel, std::size_t combo_cap) {
    const int n = channel.n();
    const int M = channel.num_states();
    std::size_t combos = 1;
    for (int m = 0; m < M; ++m) {
        combos *= channel.service_set(m).size();
        if (combos > combo_cap)
            throw GeometryError("capacity region: too many service combinations; "
                                "supply the facet list instead");
    }
    ParetoSet pareto;
    Eigen::VectorXd p(n);
    for (std::size_t c = 0; c < combos; ++c) {
        p.setZero();
        std::size_t rest = c;
        for (int m = 0; m < M; ++m) {
            const auto& set = channel.service_set(m);
            const auto& x = set[rest % set.size()];
            rest /= set.size();
            for (int i = 0; i < n; ++i) p[i] += channel.psi()[static_cast<std::size_t>(m)] * x[static_cast<std::size_t>(i)];
        }
        pareto.insert(p);
    }
    return pareto;
}

// Pareto points plus every coordinate-zeroing, making the cloud's hull the
// down-closure within the orthant.
std::vector<Eigen::VectorXd> down_closure_cloud(const std::vector<Eigen::VectorXd>& pareto,
                                                int n) {
    std::vector<Eigen::VectorXd> cloud;
    const int masks = 1 << n;
    for (const auto& p : pareto) {
        for (int mask = 0; mask < masks; ++mask) {
            Eigen::VectorXd q = p;
            for (int i = 0; i < n; ++i)
                if (mask & (1 << i)) q[i] = 0.0;
            bool dup = false;
            for (const auto& r : cloud)
                if ((q - r).lpNorm<Eigen::Infinity>() < 1e-12) { dup = true; break; }
            if (!dup) cloud.push_back(q);
        }
    }
    return cloud;
}

double support_value(const Eigen::VectorXd& c, const std::vector<Eigen::VectorXd>& pts) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : pts) best = std::max(best, c.dot(p));
    return best;
}

// Affine dimension of the tight set must be n-1 for a genuine facet.
bool is_supporting_facet(const Eigen::VectorXd& c, double b,
                         const std::vector<Eigen::VectorXd>& cloud) {
    std::vector<const Eigen::VectorXd*> tight;
    for (const auto& p : cloud)
        if (std::abs(c.dot(p) - b) <= 1e-8 * std::max(1.0, std::abs(b))) tight.push_back(&p);
    if (tight.size() < static_cast<std::size_t>(c.size())) return false;
    if (c.size() == 1) return true;
    Eigen::MatrixXd diffs(c.size(), static_cast<Eigen::Index>(tight.size()) - 1);
    for (Eigen::Index j = 1; j < static_cast<Eigen::Index>(tight.size()); ++j)
        diffs.col(j - 1) = *tight[static_cast<std::size_t>(j)] - *tight[0];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(diffs);
    qr.setThreshold(1e-8);
    return qr.rank() >= c.size() - 1;
}

std::vector<Facet> facets_from_candidates(std::vector<std::pair<Eigen::VectorXd, double>> cands,
                                          const std::vector<Eigen::VectorXd>& cloud) {
    std::vector<Facet> out;
    for (auto& [c, b0] : cands) {
        // Orthant convention: keep only nonnegative normals with positive offset.
        if ((c.array() < -1e-7).any()) continue;
        c = c.cwiseMax(0.0);
        const double len = c.norm();
        if (len < 1e-12) continue;
        c /= len;
        const double b = support_value(c, cloud);
        if (b <= kFacetTol) continue;
        if (!is_supporting_facet(c, b, cloud)) continue;
        bool dup = false;
        for (const auto& f : out)
            if (f.c.dot(c) > 1.0 - 1e-9 && std::abs(f.b - b) < 1e-8 * std::max(1.0, b)) {
                dup = true;
                break;
            }
        if (!dup) out.push_back({c, b});
    }
    // Deterministic order: lexicographic by normal components, descending.
    std::sort(out.begin(), out.end(), [](const Facet& a, const Facet& b) {
        for (Eigen::Index i = 0; i < a.c.size(); ++i) {
            if (std::abs(a.c[i] - b.c[i]) > 1e-12) return a.c[i] > b.c[i];
        }
        return a.b < b.b;
    });
    return out;
}

}  // namespace

CapacityRegion::CapacityRegion(int n, std::vector<Facet> facets) : n_(n) {
    if (n < 1) throw ModelError("region: dimension must be >= 1");
    if (facets.empty()) throw ModelError("region: at least one facet required");
    for (auto& f : facets) {
        if (f.c.size() != n) throw ModelError("region: facet normal dimension mismatch");
        if ((f.c.array() < -1e-9).any())
            throw ModelError("region: facet normals must be nonnegative");
        f.c = f.c.cwiseMax(0.0);
        const double len = f.c.norm();
        if (std::abs(len - 1.0) > 1e-10) {
            if (len < 1e-12) throw ModelError("region: zero facet normal");
            f.b /= len;
            f.c /= len;
        }
        if (f.b <= 0.0) throw ModelError("region: facet offsets must be positive");
    }
    facets_ = std::move(facets);
}

double CapacityRegion::margin(const Eigen::VectorXd& x) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& f : facets_) worst = std::max(worst, f.c.dot(x) - f.b);
    return worst;
}

bool CapacityRegion::contains(const Eigen::VectorXd& x, double tol) const {
    if ((x.array() < -tol).any()) return false;
    return margin(x) <= tol;
}

CapacityRegion build_capacity_region(const ChannelModel& channel) {
    const int n = channel.n();
    if (n > 3)
        throw GeometryError("capacity region: brute force supports n <= 3; "
                            "supply the facet list and validate it for larger systems");

    ParetoSet pareto = mixture_pareto_points(channel, 200000);
    std::vector<Eigen::VectorXd> cloud = down_closure_cloud(pareto.points(), n);

    std::vector<std::pair<Eigen::VectorXd, double>> cands;
    if (n == 1) {
        Eigen::VectorXd one(1);
        one[0] = 1.0;
        cands.emplace_back(one, support_value(one, cloud));
    } else if (n == 2) {
        std::vector<Eigen::Vector2d> pts;
        pts.reserve(cloud.size());
        for (const auto& p : cloud) pts.emplace_back(p[0], p[1]);
        auto hull = detail::hull_2d(pts);
        if (hull.size() < 3) throw ModelError("capacity region: degenerate (not full-dimensional)");
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const Eigen::Vector2d a = hull[i];
            const Eigen::Vector2d b = hull[(i + 1) % hull.size()];
            const Eigen::Vector2d e = b - a;
            Eigen::VectorXd c(2);
            c << e.y(), -e.x();  // outward for a CCW polygon
            cands.emplace_back(c, c.dot(a));
        }
    } else {
        std::vector<Eigen::Vector3d> pts;
        pts.reserve(cloud.size());
        for (const auto& p : cloud) pts.emplace_back(p[0], p[1], p[2]);
        std::vector<detail::HullFace3> faces;
        try {
            faces = detail::hull_3d(pts);
        } catch (const GeometryError&) {
            throw ModelError("capacity region: degenerate (not full-dimensional)");
        }
        for (const auto& f : faces) cands.emplace_back(Eigen::VectorXd(f.normal), f.offset);
    }

    std::vector<Facet> facets = facets_from_candidates(std::move(cands), cloud);
    if (facets.empty()) throw ModelError("capacity region: degenerate (no valid facet)");
    return CapacityRegion(n, std::move(facets));
}

CapacityRegion make_iq_switch_region(int N) {
    if (N < 2) throw ModelError("iq switch region: N must be >= 2");
    const int n = N * N;
    const double inv = 1.0 / std::sqrt(static_cast<double>(N));
    std::vector<Facet> facets;
    for (int r = 0; r < N; ++r) {  // row sums
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < N; ++j) c[r * N + j] = inv;
        facets.push_back({c, inv});
    }
    for (int col = 0; col < N; ++col) {  // column sums
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < N; ++i) c[i * N + col] = inv;
        facets.push_back({c, inv});
    }
    return CapacityRegion(n, std::move(facets));
}

RegionValidation validate_capacity_region(const CapacityRegion& region,
                                          const ChannelModel& channel,
                                          std::size_t max_points) {
    RegionValidation v;
    const int n = channel.n();
    const int M = channel.num_states();
    if (region.dimension() != n) {
        v.ok = false;
        v.violations.push_back("dimension mismatch between region and channel");
        return v;
    }

    // Containment of mixture points. Exhaustive when feasible, otherwise a
    // fixed-seed random sample of combinations.
    std::size_t combos = 1;
    bool exhaustive = true;
    for (int m = 0; m < M; ++m) {
        combos *= channel.service_set(m).size();
        if (combos > max_points) { exhaustive = false; break; }
    }
    RngStream rng(0x5EEDu);
    const std::size_t total = exhaustive ? combos : max_points;
    Eigen::VectorXd p(n);
    for (std::size_t t = 0; t < total; ++t) {
        p.setZero();
        std::size_t rest = t;
        for (int m = 0; m < M; ++m) {
            const auto& set = channel.service_set(m);
            const std::size_t pick = exhaustive ? rest % set.size() : rng.uniform_index(set.size());
            rest /= set.size();
            const auto& x = set[pick];
            for (int i = 0; i < n; ++i) p[i] += channel.psi()[static_cast<std::size_t>(m)] * x[static_cast<std::size_t>(i)];
        }
        const double mar = region.margin(p);
        if (mar > kFacetTol) {
            v.ok = false;
            v.violations.push_back("mixture point violates a facet by " + fmt_double(mar));
            if (v.violations.size() > 16) return v;
        }
    }

    // Tightness: the per-state maximizer mixture must support each facet.
    for (int l = 0; l < region.num_facets(); ++l) {
        const Facet& f = region.facet(l);
        double reach = 0.0;
        for (int m = 0; m < M; ++m)
            reach += channel.psi()[static_cast<std::size_t>(m)] * facet_b_ml(f.c, channel.service_set(m));
        if (reach > f.b + kFacetTol) {
            v.ok = false;
            v.violations.push_back("facet " + std::to_string(l) + " cut into the region (max reach " +
                                   fmt_double(reach) + " > b " + fmt_double(f.b) + ")");
        } else if (reach < f.b - kFacetTol) {
            v.ok = false;
            v.violations.push_back("facet " + std::to_string(l) + " not tight (max reach " +
                                   fmt_double(reach) + " < b " + fmt_double(f.b) + ")");
        }
    }
    return v;
}

double facet_b_ml(const Eigen::VectorXd& c, const std::vector<std::vector<int>>& service_set) {
    if (service_set.empty()) throw ModelError("b_ml: empty service set");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& x : service_set) {
        if (static_cast<Eigen::Index>(x.size()) != c.size())
            throw ModelError("b_ml: dimension mismatch");
        double dot = 0.0;
        for (Eigen::Index i = 0; i < c.size(); ++i) dot += c[i] * x[static_cast<std::size_t>(i)];
        best = std::max(best, dot);
    }
    return best;
}

std::vector<int> identify_P(const CapacityRegion& region, const Eigen::VectorXd& nu,
                            double tol) {
    if (nu.size() != region.dimension()) throw GeometryError("identify_P: dimension mismatch");
    std::vector<int> P;
    for (int l = 0; l < region.num_facets(); ++l) {
        const double slack = region.facet(l).b - region.facet(l).c.dot(nu);
        if (slack < -tol)
            throw GeometryError("identify_P: nu lies outside the region (facet " +
                                std::to_string(l) + ")");
        if (std::abs(slack) <= tol) P.push_back(l);
    }
    if (P.empty()) throw GeometryError("identify_P: nu is not on the region boundary");
    return P;
}

std::vector<int> select_P_tilde(const std::vector<Eigen::VectorXd>& normals, double pivot_tol) {
    if (normals.empty()) throw GeometryError("select_P_tilde: empty normal list");
    std::vector<int> kept;
    std::vector<Eigen::VectorXd> basis;  // orthonormal
    for (int i = 0; i < static_cast<int>(normals.size()); ++i) {
        Eigen::VectorXd r = normals[static_cast<std::size_t>(i)];
        for (const auto& b : basis) r -= b.dot(r) * b;
        // Re-orthogonalize once; classical Gram-Schmidt drifts.
        for (const auto& b : basis) r -= b.dot(r) * b;
        if (r.norm() > pivot_tol) {
            basis.push_back(r.normalized());
            kept.push_back(i);
        }
    }
    return kept;
}

Eigen::MatrixXd projection_matrix_H(const Eigen::MatrixXd& C) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C);
    qr.setThreshold(1e-10);
    if (qr.rank() < C.cols())
        throw std::invalid_argument("projection_matrix_H: C must have full column rank");
    const Eigen::MatrixXd gram = C.transpose() * C;
    const Eigen::MatrixXd gram_inv =
        gram.llt().solve(Eigen::MatrixXd::Identity(C.cols(), C.cols()));
    return C * gram_inv * C.transpose();
}

namespace {

// Least-squares coefficients over the passive subset, rank-tolerant.
Eigen::VectorXd solve_subset(const Eigen::MatrixXd& normals, const Eigen::VectorXd& x,
                             const std::vector<Eigen::Index>& idx) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(normals.cols());
    if (idx.empty()) return z;
    Eigen::MatrixXd sub(normals.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a)
        sub.col(static_cast<Eigen::Index>(a)) = normals.col(idx[a]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
    qr.setThreshold(1e-12);
    const Eigen::VectorXd sol = qr.solve(x);
    for (std::size_t a = 0; a < idx.size(); ++a) z[idx[a]] = sol[static_cast<Eigen::Index>(a)];
    return z;
}

bool kkt_ok(const Eigen::VectorXd& x, const Eigen::MatrixXd& normals,
            const Eigen::VectorXd& xi, double scale) {
    if ((xi.array() < -1e-9 * scale).any()) return false;
    const Eigen::VectorXd par = normals * xi;
    const Eigen::VectorXd perp = x - par;
    if (std::abs(perp.dot(par)) > 1e-9 * std::max(1.0, x.squaredNorm())) return false;
    return !((normals.transpose() * perp).array() > 1e-9 * scale).any();
}

// Guaranteed small-k path: try every support set, keep the first feasible one
// that certifies. Used when the active-set iteration cycles.
Eigen::VectorXd nnls_exhaustive(const Eigen::VectorXd& x, const Eigen::MatrixXd& normals,
                                double scale) {
    const Eigen::Index k = normals.cols();
    if (k > 16) throw NumericalError("project_cone: cycling with too many normals");
    double best_dist = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best;
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < k; ++j)
            if (mask & (1u << j)) idx.push_back(j);
        Eigen::VectorXd z = solve_subset(normals, x, idx);
        if ((z.array() < -1e-12 * scale).any()) continue;
        z = z.cwiseMax(0.0);
        if (!kkt_ok(x, normals, z, scale)) continue;
        const double d = (x - normals * z).squaredNorm();
        if (d < best_dist) { best_dist = d; best = z; }
    }
    if (best.size() == 0) throw NumericalError("project_cone: no certified support set");
    return best;
}

}  // namespace

ConeProjection project_cone(const Eigen::VectorXd& x, const Eigen::MatrixXd& normals,
                            int max_iterations) {
    const Eigen::Index n = x.size();
    const Eigen::Index k = normals.cols();
    if (normals.rows() != n) throw std::invalid_argument("project_cone: dimension mismatch");
    if (k == 0) throw std::invalid_argument("project_cone: empty normal set");
    if (max_iterations <= 0) max_iterations = 100 * static_cast<int>(k);

    const Eigen::MatrixXd gram = normals.transpose() * normals;
    const Eigen::VectorXd h = normals.transpose() * x;
    const double scale = 1.0 + x.norm();
    const double tol = 1e-11 * scale;

    Eigen::VectorXd xi = Eigen::VectorXd::Zero(k);
    std::vector<bool> passive(static_cast<std::size_t>(k), false);
    std::vector<Eigen::Index> idx;
    int iter = 0;
    bool cycled = false;

    auto passive_indices = [&]() {
        idx.clear();
        for (Eigen::Index j = 0; j < k; ++j)
            if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    };

    while (!cycled) {
        const Eigen::VectorXd w = h - gram * xi;
        Eigen::Index enter = -1;
        double best_w = tol;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (passive[static_cast<std::size_t>(j)]) continue;
            if (w[j] > best_w) { best_w = w[j]; enter = j; }
        }
        if (enter < 0) break;  // KKT satisfied
        passive[static_cast<std::size_t>(enter)] = true;

        while (true) {
            if (++iter > max_iterations) { cycled = true; break; }
            passive_indices();
            const Eigen::VectorXd z = solve_subset(normals, x, idx);
            double alpha = 1.0;
            bool feasible = true;
            for (Eigen::Index j : idx) {
                if (z[j] > 0.0) continue;
                feasible = false;
                const double denom = xi[j] - z[j];
                if (denom > 0.0) alpha = std::min(alpha, xi[j] / denom);
            }
            if (feasible) { xi = z; break; }
            if (alpha <= 0.0 && idx.size() == 1) { cycled = true; break; }
            xi += alpha * (z - xi);
            for (Eigen::Index j : idx)
                if (xi[j] <= tol) {
                    passive[static_cast<std::size_t>(j)] = false;
                    xi[j] = 0.0;
                }
            if (passive == std::vector<bool>(static_cast<std::size_t>(k), false) && alpha == 0.0) {
                cycled = true;
                break;
            }
        }
    }

    if (cycled || !kkt_ok(x, normals, xi, scale)) xi = nnls_exhaustive(x, normals, scale);

    ConeProjection out;
    out.xi = xi;
    out.par = normals * xi;
    out.perp = x - out.par;
    out.iterations = iter;

    const double cert = 1e-9 * std::max(1.0, x.squaredNorm());
    if (std::abs(out.perp.dot(out.par)) > cert)
        throw NumericalError("project_cone: KKT certificate failed (cross term)");
    const Eigen::VectorXd residual = normals.transpose() * out.perp;
    if ((residual.array() > 1e-9 * scale).any())
        throw NumericalError("project_cone: KKT certificate failed (normal slack)");
    return out;
}

SubspaceProjection project_subspace(const Eigen::VectorXd& x, const Eigen::MatrixXd& H) {
    SubspaceProjection p;
    p.par = H * x;
    p.perp = x - p.par;
    return p;
}

ServiceSpectrum service_spectrum(const CapacityRegion& region, const ChannelModel& channel,
                                 const std::vector<int>& P, const std::vector<int>& P_tilde) {
    const int M = channel.num_states();
    ServiceSpectrum sp;
    sp.b_ml.resize(M, static_cast<Eigen::Index>(P_tilde.size()));
    sp.b_ml_P.resize(M, static_cast<Eigen::Index>(P.size()));

    for (int m = 0; m < M; ++m)
        for (std::size_t j = 0; j < P.size(); ++j)
            sp.b_ml_P(m, static_cast<Eigen::Index>(j)) =
                facet_b_ml(region.facet(P[j]).c, channel.service_set(m));
    for (int m = 0; m < M; ++m)
        for (std::size_t j = 0; j < P_tilde.size(); ++j)
            sp.b_ml(m, static_cast<Eigen::Index>(j)) =
                facet_b_ml(region.facet(P_tilde[j]).c, channel.service_set(m));

    // Mixture identity on every tight facet.
    for (std::size_t j = 0; j < P.size(); ++j) {
        double avg = 0.0;
        for (int m = 0; m < M; ++m)
            avg += channel.psi()[static_cast<std::size_t>(m)] * sp.b_ml_P(m, static_cast<Eigen::Index>(j));
        const double b = region.facet(P[j]).b;
        if (std::abs(avg - b) > 1e-6)
            throw ModelError("service spectrum: mixture of per-state maxima (" + fmt_double(avg) +
                             ") does not match facet offset (" + fmt_double(b) +
                             "); nu/facet mismatch");
    }

    const Eigen::Index kt = static_cast<Eigen::Index>(P_tilde.size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(kt);
    for (int m = 0; m < M; ++m)
        mean += channel.psi()[static_cast<std::size_t>(m)] * sp.b_ml.row(m).transpose();
    sp.sigma_B = Eigen::MatrixXd::Zero(kt, kt);
    for (int m = 0; m < M; ++m) {
        const Eigen::VectorXd d = sp.b_ml.row(m).transpose() - mean;
        sp.sigma_B += channel.psi()[static_cast<std::size_t>(m)] * d * d.transpose();
    }

    sp.b_max = 0.0;
    for (int m = 0; m < M; ++m)
        for (int l = 0; l < region.num_facets(); ++l)
            sp.b_max = std::max(sp.b_max, facet_b_ml(region.facet(l).c, channel.service_set(m)));
    return sp;
}

DeltaGap delta_gap(const CapacityRegion& region, const Eigen::VectorXd& nu,
                   const std::vector<int>& P, double tol) {
    DeltaGap g;
    if (P.size() == static_cast<std::size_t>(region.num_facets())) {
        g.delta = 1.0;
    } else {
        double best = std::numeric_limits<double>::infinity();
        for (int l = 0; l < region.num_facets(); ++l) {
            if (std::find(P.begin(), P.end(), l) != P.end()) continue;
            best = std::min(best, region.facet(l).b - region.facet(l).c.dot(nu));
        }
        g.delta = best;
        if (g.delta <= tol) g.degenerate = true;
    }
    g.eps_threshold = g.delta / (2.0 * nu.norm());
    return g;
}

ConeGeometry::ConeGeometry(CapacityRegion region, const ChannelModel& channel,
                           Eigen::VectorXd nu, double tol)
    : region_(std::move(region)), nu_(std::move(nu)) {
    P_ = identify_P(region_, nu_, tol);
    std::vector<Eigen::VectorXd> normals;
    normals.reserve(P_.size());
    for (int l : P_) normals.push_back(region_.facet(l).c);
    const std::vector<int> local = select_P_tilde(normals);
    P_tilde_.reserve(local.size());
    for (int j : local) P_tilde_.push_back(P_[static_cast<std::size_t>(j)]);

    C_.resize(region_.dimension(), static_cast<Eigen::Index>(P_tilde_.size()));
    for (std::size_t j = 0; j < P_tilde_.size(); ++j)
        C_.col(static_cast<Eigen::Index>(j)) = region_.facet(P_tilde_[j]).c;
    H_ = projection_matrix_H(C_);
    const Eigen::MatrixXd gram = C_.transpose() * C_;
    gram_inv_ = gram.llt().solve(Eigen::MatrixXd::Identity(C_.cols(), C_.cols()));

    cone_normals_.resize(region_.dimension(), static_cast<Eigen::Index>(P_.size()));
    for (std::size_t j = 0; j < P_.size(); ++j)
        cone_normals_.col(static_cast<Eigen::Index>(j)) = region_.facet(P_[j]).c;

    gap_ = delta_gap(region_, nu_, P_, tol);
    spectrum_ = service_spectrum(region_, channel, P_, P_tilde_);
}

std::string facets_to_csv(const CapacityRegion& region) {
    std::string out = "facet_id";
    for (int i = 1; i <= region.dimension(); ++i) out += ",c_" + std::to_string(i);
    out += ",b\n";
    for (int l = 0; l < region.num_facets(); ++l) {
        out += std::to_string(l);
        for (Eigen::Index i = 0; i < region.facet(l).c.size(); ++i)
            out += "," + fmt_double(region.facet(l).c[i]);
        out += "," + fmt_double(region.facet(l).b) + "\n";
    }
    return out;
}

}  // namespace switchsim
