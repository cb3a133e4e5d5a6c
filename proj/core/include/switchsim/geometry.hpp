#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchsim/model.hpp"

namespace switchsim {

/// Supporting half-space <c, x> <= b with c >= 0, ||c|| = 1, b > 0.
struct Facet {
    Eigen::VectorXd c;
    double b = 0.0;
};

/// Capacity polytope {x >= 0 : <c_l, x> <= b_l for all l}, facets normalized.
class CapacityRegion {
  public:
    CapacityRegion(int n, std::vector<Facet> facets);

    int dimension() const { return n_; }
    int num_facets() const { return static_cast<int>(facets_.size()); }
    const std::vector<Facet>& facets() const { return facets_; }
    const Facet& facet(int l) const { return facets_[static_cast<std::size_t>(l)]; }

    /// max_l <c_l, x> - b_l; negative strictly inside, ~0 on the boundary.
    double margin(const Eigen::VectorXd& x) const;
    bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;

  private:
    int n_;
    std::vector<Facet> facets_;
};

/// Exact facet enumeration of the mixture polytope sum_m psi_m ConvHull(S_m)
/// (down-closed within the nonnegative orthant). Brute force, n <= 3 only;
/// larger systems must supply their facet list and validate it instead.
CapacityRegion build_capacity_region(const ChannelModel& channel);

/// The 2N row/column facets of the N x N input-queued switch region.
CapacityRegion make_iq_switch_region(int N);

struct RegionValidation {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Checks containment of every state-wise mixture point (sampling beyond
/// `max_points` combinations) and tightness of every facet at its per-state
/// maximizer mixture.
RegionValidation validate_capacity_region(const CapacityRegion& region,
                                          const ChannelModel& channel,
                                          std::size_t max_points = 200000);

/// max_{x in S} <c, x>: the best c-weighted service rate of one state.
double facet_b_ml(const Eigen::VectorXd& c, const std::vector<std::vector<int>>& service_set);

/// Indices of facets tight at nu: {l : |<c_l, nu> - b_l| <= tol}. Throws
/// GeometryError if nu is outside the region or strictly interior.
std::vector<int> identify_P(const CapacityRegion& region, const Eigen::VectorXd& nu,
                            double tol = 1e-9);

/// Greedy maximal linearly independent subset (lowest index preferred,
/// pivot threshold on the orthogonalized residual norm).
std::vector<int> select_P_tilde(const std::vector<Eigen::VectorXd>& normals,
                                double pivot_tol = 1e-9);

/// H = C (C^T C)^{-1} C^T. C must have full column rank.
Eigen::MatrixXd projection_matrix_H(const Eigen::MatrixXd& C);

struct ConeProjection {
    Eigen::VectorXd par;   // argmin_{y in cone} ||x - y||
    Eigen::VectorXd perp;  // x - par
    Eigen::VectorXd xi;    // nonnegative cone coordinates, par = N xi
    int iterations = 0;
};

/// Euclidean projection onto cone{normals} by active-set nonnegative least
/// squares with a KKT certificate. Iteration budget defaults to 100 per normal.
ConeProjection project_cone(const Eigen::VectorXd& x, const Eigen::MatrixXd& normals,
                            int max_iterations = 0);

struct SubspaceProjection {
    Eigen::VectorXd par;
    Eigen::VectorXd perp;
};

SubspaceProjection project_subspace(const Eigen::VectorXd& x, const Eigen::MatrixXd& H);

/// Per-state best weighted service rates and the service-randomness covariance.
struct ServiceSpectrum {
    Eigen::MatrixXd b_ml;      // states x |P_tilde|
    Eigen::MatrixXd b_ml_P;    // states x |P| (probe table)
    Eigen::MatrixXd sigma_B;   // |P_tilde| x |P_tilde| covariance of {B_l}
    double b_max = 0.0;        // max over all states and all facets
};

/// Computes the spectrum and checks the mixture identity
/// sum_m psi_m b_ml = b_l for every l in P (model-inconsistency beyond 1e-6).
ServiceSpectrum service_spectrum(const CapacityRegion& region, const ChannelModel& channel,
                                 const std::vector<int>& P, const std::vector<int>& P_tilde);

struct DeltaGap {
    double delta = 0.0;
    double eps_threshold = 0.0;  // admissible eps < delta / (2 ||nu||)
    bool degenerate = false;     // nu nearly tight on an excluded facet
};

/// delta = min_{l not in P} (b_l - <c_l, nu>); 1 when P covers every facet.
DeltaGap delta_gap(const CapacityRegion& region, const Eigen::VectorXd& nu,
                   const std::vector<int>& P, double tol = 1e-9);

/// Everything the drift analysis needs at a boundary point nu: the tight set P,
/// an independent subset, the cone/subspace projectors, the slack gap, and the
/// service spectrum.
class ConeGeometry {
  public:
    ConeGeometry(CapacityRegion region, const ChannelModel& channel, Eigen::VectorXd nu,
                 double tol = 1e-9);

    const CapacityRegion& region() const { return region_; }
    const Eigen::VectorXd& nu() const { return nu_; }
    const std::vector<int>& P() const { return P_; }
    const std::vector<int>& P_tilde() const { return P_tilde_; }
    const Eigen::MatrixXd& C() const { return C_; }
    const Eigen::MatrixXd& H() const { return H_; }
    const Eigen::MatrixXd& gram_inv() const { return gram_inv_; }
    /// Columns c_l for l in P (cone generators).
    const Eigen::MatrixXd& cone_normals() const { return cone_normals_; }
    double delta() const { return gap_.delta; }
    const DeltaGap& gap() const { return gap_; }
    const ServiceSpectrum& spectrum() const { return spectrum_; }

  private:
    CapacityRegion region_;
    Eigen::VectorXd nu_;
    std::vector<int> P_;
    std::vector<int> P_tilde_;
    Eigen::MatrixXd C_;
    Eigen::MatrixXd H_;
    Eigen::MatrixXd gram_inv_;
    Eigen::MatrixXd cone_normals_;
    DeltaGap gap_;
    ServiceSpectrum spectrum_;
};

/// facet_id, c_1..c_n, b rows.
std::string facets_to_csv(const CapacityRegion& region);

}  // namespace switchsim
