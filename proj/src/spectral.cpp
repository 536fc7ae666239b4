#include "nlsq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlsq {

void GridSpec::validate() const {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("GridSpec: dimension must be 1 or 2");
  if (half_width <= 0.0)
    throw std::invalid_argument("GridSpec: half-width must be positive");
  if (points_per_axis < 8 || points_per_axis % 2 != 0)
    throw std::invalid_argument("GridSpec: n must be even and >= 8");
}

std::vector<double> GridSpec::point(int flat) const {
  std::vector<double> p(dimension);
  for (int k = 0; k < dimension; ++k) {
    p[k] = axis_coord(flat % points_per_axis);
    flat /= points_per_axis;
  }
  return p;
}

namespace {

// frequency of Fourier index k on the periodic grid of length 2L
double fourier_freq(int k, int n, double half_width) {
  const int signed_k = k <= n / 2 ? k : k - n;
  return std::numbers::pi * signed_k / half_width;
}

}  // namespace

Matrix build_symbol_matrix(const GridSpec& grid,
                           const std::function<double(double)>& symbol) {
  grid.validate();
  const int n = grid.points_per_axis;
  const int d = grid.dimension;
  const int total = grid.total_points();
  const double h = grid.spacing();

  // kernel over the difference lattice: ker[delta] =
  //   (1/N) sum_k s(|xi_k|^2) cos(xi_k . delta h)
  std::vector<double> ker(total, 0.0);
  std::vector<double> freq(n);
  for (int k = 0; k < n; ++k) freq[k] = fourier_freq(k, n, grid.half_width);

  if (d == 1) {
    for (int delta = 0; delta < n; ++delta) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k)
        acc += symbol(freq[k] * freq[k]) * std::cos(freq[k] * delta * h);
      ker[delta] = acc / n;
    }
  } else {
    for (int d1 = 0; d1 < n; ++d1) {
      for (int d0 = 0; d0 < n; ++d0) {
        double acc = 0.0;
        for (int k1 = 0; k1 < n; ++k1) {
          const double f1 = freq[k1];
          for (int k0 = 0; k0 < n; ++k0) {
            const double f0 = freq[k0];
            acc += symbol(f0 * f0 + f1 * f1) *
                   std::cos(f0 * d0 * h + f1 * d1 * h);
          }
        }
        ker[d1 * n + d0] = acc / total;
      }
    }
  }

  Matrix a(total, total);
  if (d == 1) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = ker[((i - j) % n + n) % n];
  } else {
    for (int i = 0; i < total; ++i) {
      const int i0 = i % n, i1 = i / n;
      for (int j = 0; j < total; ++j) {
        const int j0 = j % n, j1 = j / n;
        a(i, j) = ker[(((i1 - j1) % n + n) % n) * n + ((i0 - j0) % n + n) % n];
      }
    }
  }
  return a;
}

Vector multiplication_diagonal(const GridSpec& grid, double exponent) {
  const int total = grid.total_points();
  Vector diag(total);
  for (int i = 0; i < total; ++i) {
    const auto p = grid.point(i);
    double r2 = 0.0;
    for (double c : p) r2 += c * c;
    diag[i] = std::pow(r2 + 1.0, exponent);
  }
  return diag;
}

Matrix build_operator_matrix(const GridSpec& grid, double mult_exponent,
                             double laplace_exponent) {
  grid.validate();
  const Matrix laplace = build_symbol_matrix(
      grid, [laplace_exponent](double xi2) {
        return std::pow(xi2 + 1.0, laplace_exponent);
      });
  const Vector m = multiplication_diagonal(grid, mult_exponent);
  Matrix a = m.asDiagonal() * laplace * m.asDiagonal();
  return 0.5 * (a + a.transpose());
}

Matrix build_operator_matrix(const GridSpec& grid, const OperatorSpec& spec) {
  if (grid.dimension != spec.dimension)
    throw std::invalid_argument("operator/grid dimension mismatch");
  return build_operator_matrix(grid, spec.mult_exponent(),
                               spec.laplace_exponent());
}

EigenSystem eigendecompose(const Matrix& matrix, const GridSpec& grid,
                           const OperatorSpec& spec, int k_keep) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("eigendecompose: matrix not square");
  if (k_keep < 1 || k_keep > matrix.rows())
    throw std::invalid_argument("eigendecompose: K_keep out of range");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecompose: solver failed");
  const Vector& evals = solver.eigenvalues();  // ascending
  if (evals[0] <= 0.0)
    throw std::runtime_error(
        "eigendecompose: operator matrix is not positive definite "
        "(smallest Ritz value " + std::to_string(evals[0]) + ")");

  // inverse-operator eigenvalues, largest first = smallest Ritz value first
  EigenSystem es;
  es.grid = grid;
  es.op = spec;
  es.lambdas.resize(k_keep);
  es.basis.resize(matrix.rows(), k_keep);
  const double h_pow = std::sqrt(
      std::pow(grid.spacing(), grid.dimension));
  for (int i = 0; i < k_keep; ++i) {
    es.lambdas[i] = 1.0 / evals[i];
    es.basis.col(i) = solver.eigenvectors().col(i) / h_pow;
  }

  // deterministic sign/tie convention: largest-magnitude grid component
  // positive; within an eigenvalue tie (1e-9 relative) order by the index
  // of that component
  std::vector<int> order(k_keep);
  for (int i = 0; i < k_keep; ++i) order[i] = i;
  auto peak_index = [&es](int col) {
    int best = 0;
    double mag = 0.0;
    for (int r = 0; r < es.basis.rows(); ++r) {
      const double a = std::abs(es.basis(r, col));
      if (a > mag) {
        mag = a;
        best = r;
      }
    }
    return best;
  };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double la = es.lambdas[a], lb = es.lambdas[b];
    if (std::abs(la - lb) > 1e-9 * std::max(la, lb)) return la > lb;
    return peak_index(a) < peak_index(b);
  });
  Vector lam(k_keep);
  Matrix basis(matrix.rows(), k_keep);
  for (int i = 0; i < k_keep; ++i) {
    lam[i] = es.lambdas[order[i]];
    basis.col(i) = es.basis.col(order[i]);
    if (basis(peak_index(order[i]), i) < 0.0) basis.col(i) *= -1.0;
  }
  es.raw_scale = lam[0];
  es.lambdas = lam / lam[0];
  es.basis = std::move(basis);
  return es;
}

double CoordinateVector::weighted_norm() const {
  return nlsq::weighted_norm(*this);
}

double weighted_norm(const CoordinateVector& x) {
  if (x.values.size() != x.weights.size())
    throw std::invalid_argument("weighted_norm: size mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.values.size(); ++i) {
    if (x.weights[i] <= 0.0)
      throw std::invalid_argument("weighted_norm: nonpositive weight");
    acc += x.weights[i] * x.values[i] * x.values[i];
  }
  return std::sqrt(acc);
}

IsometryMap make_isometry(const EigenSystem& es, int m) {
  if (std::abs(m) > 3)
    throw std::invalid_argument("isometry scale index out of range [-3, 3]");
  return IsometryMap{m, &es};
}

CoordinateVector IsometryMap::forward(const Vector& coefficients) const {
  if (coefficients.size() > es->count())
    throw std::invalid_argument("tau_forward: coefficient length exceeds K");
  const Eigen::Index k = coefficients.size();
  CoordinateVector out;
  out.values.resize(k);
  out.weights.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double lam = es->lambdas[i];
    out.values[i] = std::pow(lam, scale_index) * coefficients[i];
    out.weights[i] = std::pow(lam, -2 * scale_index);
  }
  return out;
}

Vector IsometryMap::inverse(const CoordinateVector& x) const {
  if (x.values.size() > es->count())
    throw std::invalid_argument("tau_inverse: vector length exceeds K");
  Vector out(x.values.size());
  for (Eigen::Index i = 0; i < x.values.size(); ++i)
    out[i] = std::pow(es->lambdas[i], -scale_index) * x.values[i];
  return out;
}

HilbertSchmidtReport hilbert_schmidt_sum(const EigenSystem& es) {
  HilbertSchmidtReport rep;
  rep.cumulative.reserve(es.count());
  for (int i = 0; i < es.count(); ++i) {
    rep.sum += es.lambdas[i] * es.lambdas[i];
    rep.cumulative.push_back(rep.sum);
  }
  const int k = es.count();
  if (k >= 4) {
    double first = 0.0, last = 0.0;
    for (int i = 0; i < k / 4; ++i) first += es.lambdas[i] * es.lambdas[i];
    for (int i = k - k / 4; i < k; ++i) last += es.lambdas[i] * es.lambdas[i];
    rep.tail_fraction = rep.sum > 0.0 ? last / rep.sum : 0.0;
    rep.tail_over_head = first > 0.0 ? last / first : 0.0;
  }
  return rep;
}

}  // namespace nlsq
