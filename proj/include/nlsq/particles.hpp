#pragma once

#include <cstdint>
#include <vector>

#include "nlsq/spectral.hpp"

namespace nlsq {

// finite particle configuration z = sum m_j delta_{y_j} on a window
// [-W, W]^d, integer multiplicities m_j >= 1
struct Configuration {
  int dimension = 1;
  Matrix points;                    // count x d
  std::vector<long> multiplicities; // count entries, all >= 1
  double window = 1.0;

  int count() const { return static_cast<int>(points.rows()); }
  long total_multiplicity() const;
  void validate() const;
};

struct RuelleParams {
  double gamma_r = 1.0;
  double delta_r = 0.0;
};

// occupation number of the half-open unit cube Q_r (lower faces closed)
long occupation_count(const Configuration& conf, const std::vector<int>& r);

struct MembershipReport {
  bool member = false;
  int worst_l = -1;          // first level violating the bound, -1 if none
  double worst_ratio = 0.0;  // max over l of lhs / (N^2 (2l+1)^d)
};

// sum_{|r|_inf <= l} n(z, r)^2 <= N^2 (2l+1)^d for l = 0..l_max
MembershipReport u_n_membership(const Configuration& conf, long n_bound,
                                int l_max);

// geometric tail sum q/(1-q) with q = exp(-(gamma N^2 - e^delta))
double ruelle_tail_bound(const RuelleParams& params, long n_bound);

// homogeneous Poisson configuration with unit multiplicities on [-W, W]^d
Configuration sample_poisson_config(double intensity, double window,
                                    int dimension, std::uint64_t seed);

Configuration merge_configs(const Configuration& a, const Configuration& b);

// off-grid value of basis column i by local cubic interpolation on the
// periodic grid (tensor-product in d = 2)
double eigenfunction_value(const EigenSystem& es, int i,
                           const std::vector<double>& y);

// coordinates <z, phi_i> = sum_j m_j phi_i(y_j) for i < k_modes
Vector embed(const Configuration& conf, const EigenSystem& es_tilde,
             int k_modes);

// dual-scale norms in the eigencoordinates: ||.||_{-1}^2 = sum lam_i^2 c_i^2
// for embedded configurations, ||.||_{+1}^2 = sum lam_i^{-2} c_i^2 for test
// functions (raw, unrescaled eigenvalues)
double dual_norm_minus1(const EigenSystem& es, const Vector& coords);
double norm_plus1(const EigenSystem& es, const Vector& coeffs);

// C3 of the embedding bound: calibration * N^2 (sum_l (l+1)^{-d/2-5/2} + 1)
double lemma21_c3(long n_bound, int dimension, double calibration);

struct EmbeddingBoundReport {
  double max_ratio = 0.0;  // max |<z, phi>| / ||phi||_{+1} over the panel
  double c3 = 0.0;
  bool pass = false;
};

// ratio check over a panel of test-function coefficient vectors
EmbeddingBoundReport lemma21_bound_check(const Configuration& conf,
                                         const EigenSystem& es_tilde,
                                         long n_bound,
                                         const Matrix& test_coeffs,
                                         double calibration);

struct CellDecayRow {
  int l = 0;
  double integral = 0.0;  // int_{Q_r} (|y|^2+1)^{-2(d+1)} dy at |r|_inf = l
  double bound = 0.0;     // C (l^2+1)^{-(3d+5)/2}
  bool pass = false;
};

// quadrature check of the cell-decay weight for l = 0..l_max
std::vector<CellDecayRow> cell_decay_check(int dimension, int l_max,
                                           double constant);

}  // namespace nlsq
