#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlsq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Periodic grid on [-L, L]^d, spacing h = 2L/n, n points per axis.
struct GridSpec {
  int dimension = 1;
  double half_width = 10.0;
  int points_per_axis = 128;

  double spacing() const { return 2.0 * half_width / points_per_axis; }
  int total_points() const {
    int total = 1;
    for (int k = 0; k < dimension; ++k) total *= points_per_axis;
    return total;
  }
  // coordinate of grid node along one axis, a in [0, n)
  double axis_coord(int a) const { return -half_width + a * spacing(); }
  // full coordinate of flat index
  std::vector<double> point(int flat) const;

  void validate() const;
};

enum class OperatorKind { H, HTilde };

// H  = (|x|^2+1)^p (-Delta+1)^q (|x|^2+1)^p with p = q = (d+1)/2,
// H~ uses p = d+1, q = (d+1)/2.
struct OperatorSpec {
  OperatorKind kind = OperatorKind::H;
  int dimension = 1;
  double mass = 1.0;

  double mult_exponent() const {
    return kind == OperatorKind::H ? 0.5 * (dimension + 1)
                                   : static_cast<double>(dimension + 1);
  }
  double laplace_exponent() const { return 0.5 * (dimension + 1); }
};

// Eigenpairs of the discretized inverse operator. Eigenvalues are sorted
// decreasing and rescaled so lambda_1 = 1 (the raw scale is recorded).
// Basis columns are orthonormal in the grid L^2 inner product
// (f, g) = h^d sum_x f(x) g(x).
struct EigenSystem {
  GridSpec grid;
  OperatorSpec op;
  Vector lambdas;       // K, decreasing, lambda_1 = 1
  Matrix basis;         // total_points x K, grid-orthonormal columns
  double raw_scale = 1.0;  // lambda_raw = raw_scale * lambdas

  int count() const { return static_cast<int>(lambdas.size()); }
  double grid_volume_element() const {
    double w = 1.0;
    for (int k = 0; k < grid.dimension; ++k) w *= grid.spacing();
    return w;
  }
  // grid L^2 inner product of two grid functions
  double inner(const Vector& f, const Vector& g) const {
    return grid_volume_element() * f.dot(g);
  }
};

struct CoordinateVector {
  Vector values;
  Vector weights;

  double weighted_norm() const;
};

// Builds the matrix of the multiplication factor (|x|^2+1)^p as a diagonal
// and the Laplacian factor (-Delta+1)^q spectrally on the periodic grid,
// composed mult * laplace * mult, then symmetrized.
Matrix build_operator_matrix(const GridSpec& grid, const OperatorSpec& spec);

// Generic variant with explicit exponents (p on both multiplication factors,
// q on the Fourier factor).
Matrix build_operator_matrix(const GridSpec& grid, double mult_exponent,
                             double laplace_exponent);

// Matrix of the operator with Fourier symbol s(|xi|^2) on the periodic grid;
// symbol receives |xi|^2.
Matrix build_symbol_matrix(const GridSpec& grid,
                           const std::function<double(double)>& symbol);

// Diagonal of the multiplication operator (|x|^2+1)^p.
Vector multiplication_diagonal(const GridSpec& grid, double exponent);

// Eigendecompose the (symmetric positive definite) operator matrix and keep
// the top K modes of its inverse.
EigenSystem eigendecompose(const Matrix& matrix, const GridSpec& grid,
                           const OperatorSpec& spec, int k_keep);

double weighted_norm(const CoordinateVector& x);

// tau_m of the Sobolev scale: forward maps H_m coefficients (in the O.N.B.
// lambda_i^m phi_i) to the weighted l^2 point with weights lambda_i^{-2m}.
struct IsometryMap {
  int scale_index = 0;  // |m| <= 3
  const EigenSystem* es = nullptr;

  CoordinateVector forward(const Vector& coefficients) const;
  Vector inverse(const CoordinateVector& x) const;
};

IsometryMap make_isometry(const EigenSystem& es, int m);

struct HilbertSchmidtReport {
  double sum = 0.0;                // sum of lambda_i^2
  double tail_fraction = 0.0;      // last-quarter contribution / total
  double tail_over_head = 0.0;     // last-quarter / first-quarter contribution
  std::vector<double> cumulative;  // running partial sums
};

HilbertSchmidtReport hilbert_schmidt_sum(const EigenSystem& es);

}  // namespace nlsq
