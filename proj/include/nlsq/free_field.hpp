#pragma once

#include <complex>
#include <cstdint>

#include "nlsq/spectral.hpp"

namespace nlsq {

// Truncated Euclidean free field in EigenSystem coordinates:
// X_i = <field, phi_i>, centered Gaussian with covariance
// C_ij = (phi_i, (-Delta + m0^2)^{-1} phi_j) in the grid inner product.
struct FreeFieldModel {
  EigenSystem es;
  double mass = 1.0;
  Matrix covariance;    // K x K, symmetric PSD
  Matrix sample_root;   // C = root * root^T (eigen-root, clipped at 0)
  Matrix precision;     // C^{-1}, used by conditional densities

  int count() const { return es.count(); }
};

// coefficient vector of a test function phi = sum c_i phi_i
using TestFunction = Vector;

struct MonteCarloValue {
  double value = 0.0;
  double stderr_ = 0.0;
};

struct ComplexEstimate {
  std::complex<double> value;
  double stderr_ = 0.0;  // combined std error of Re and Im parts
};

FreeFieldModel build_covariance(const EigenSystem& es, double mass);

// i.i.d. centered Gaussian coordinate samples with covariance C, one column
// per sample. Column j depends only on (seed, j), so any batch split over
// workers reproduces the same matrix.
Matrix sample_field(const FreeFieldModel& model, int count,
                    std::uint64_t seed, int workers = 1);

// |||phi||| = (c^T C c)^{1/2}, the covariance-weighted (triple) norm
double triple_norm(const FreeFieldModel& model, const TestFunction& phi);

// exact characteristic functional exp(-c^T C c / 2)
std::complex<double> char_functional_exact(const FreeFieldModel& model,
                                           const TestFunction& phi);

// empirical (1/N) sum exp(i <X_j, phi>) over coordinate samples
ComplexEstimate char_functional_mc(const Matrix& samples,
                                   const TestFunction& phi);

struct MomentCheck {
  double exact = 0.0;
  double empirical = 0.0;
  double stderr_ = 0.0;
};

// E[<X, phi>^{2l}] against (2l-1)!! |||phi|||^{2l}
MomentCheck gaussian_moment_check(const FreeFieldModel& model,
                                  const TestFunction& phi, int l,
                                  const Matrix& samples);

struct IncrementCheck {
  double lhs = 0.0;  // |C(psi+phi) - C(psi)|^2
  double rhs = 0.0;  // 2 |C(phi) - 1|
  double slack = 0.0;  // allowed statistical slack (0 for exact inputs)
  bool pass = false;
};

// the positive-definiteness consequence |C(psi+phi)-C(psi)|^2 <= 2|C(phi)-1|
IncrementCheck minlos_increment_check(const ComplexEstimate& c_psi_phi,
                                      const ComplexEstimate& c_psi,
                                      const ComplexEstimate& c_phi,
                                      double sigmas = 5.0);

IncrementCheck minlos_increment_check_exact(const FreeFieldModel& model,
                                            const TestFunction& phi,
                                            const TestFunction& psi);

double double_factorial(int n);  // (-1)!! = 1

}  // namespace nlsq
