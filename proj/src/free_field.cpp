#include "nlsq/free_field.hpp"

#include <cmath>
#include <thread>

#include "nlsq/rng.hpp"

namespace nlsq {

FreeFieldModel build_covariance(const EigenSystem& es, double mass) {
  if (mass <= 0.0)
    throw std::invalid_argument("build_covariance: mass must be positive");
  const double m2 = mass * mass;
  const Matrix green = build_symbol_matrix(
      es.grid, [m2](double xi2) { return 1.0 / (xi2 + m2); });

  FreeFieldModel model;
  model.es = es;
  model.mass = mass;
  const double w = es.grid_volume_element();
  Matrix c = w * es.basis.transpose() * (green * es.basis);
  model.covariance = 0.5 * (c + c.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(model.covariance);
  Vector evals = solver.eigenvalues();
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals[i] < -1e-10)
      throw std::runtime_error("build_covariance: covariance not PSD");
    evals[i] = std::max(evals[i], 0.0);
  }
  model.sample_root =
      solver.eigenvectors() * evals.cwiseSqrt().asDiagonal();
  model.precision = model.covariance.llt().solve(
      Matrix::Identity(es.count(), es.count()));
  return model;
}

Matrix sample_field(const FreeFieldModel& model, int count,
                    std::uint64_t seed, int workers) {
  if (count < 1) throw std::invalid_argument("sample_field: count >= 1");
  const int k = model.count();
  Matrix samples(k, count);

  auto fill_range = [&](int begin, int end) {
    Vector z(k);
    for (int j = begin; j < end; ++j) {
      Rng rng(seed, static_cast<std::uint64_t>(j));
      for (int i = 0; i < k; ++i) z[i] = rng.normal();
      samples.col(j) = model.sample_root * z;
    }
  };

  if (workers <= 1) {
    fill_range(0, count);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(count, begin + chunk);
      if (begin < end) pool.emplace_back(fill_range, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  return samples;
}

double triple_norm(const FreeFieldModel& model, const TestFunction& phi) {
  return std::sqrt(phi.dot(model.covariance * phi));
}

std::complex<double> char_functional_exact(const FreeFieldModel& model,
                                           const TestFunction& phi) {
  return {std::exp(-0.5 * phi.dot(model.covariance * phi)), 0.0};
}

ComplexEstimate char_functional_mc(const Matrix& samples,
                                   const TestFunction& phi) {
  const Eigen::Index n = samples.cols();
  const Vector theta = samples.transpose() * phi;
  double sum_c = 0.0, sum_s = 0.0, sum_c2 = 0.0, sum_s2 = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double c = std::cos(theta[j]);
    const double s = std::sin(theta[j]);
    sum_c += c;
    sum_s += s;
    sum_c2 += c * c;
    sum_s2 += s * s;
  }
  const double mc = sum_c / n;
  const double ms = sum_s / n;
  const double var_c = std::max(0.0, sum_c2 / n - mc * mc);
  const double var_s = std::max(0.0, sum_s2 / n - ms * ms);
  ComplexEstimate est;
  est.value = {mc, ms};
  est.stderr_ = std::sqrt((var_c + var_s) / n);
  return est;
}

double double_factorial(int n) {
  double acc = 1.0;
  for (int k = n; k > 1; k -= 2) acc *= k;
  return acc;
}

MomentCheck gaussian_moment_check(const FreeFieldModel& model,
                                  const TestFunction& phi, int l,
                                  const Matrix& samples) {
  if (l < 0 || 2 * l > 12)
    throw std::invalid_argument("gaussian_moment_check: need 0 <= 2l <= 12");
  const double r = triple_norm(model, phi);
  MomentCheck out;
  out.exact = double_factorial(2 * l - 1) * std::pow(r, 2 * l);
  const Eigen::Index n = samples.cols();
  const Vector theta = samples.transpose() * phi;
  double sum = 0.0, sum2 = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double v = std::pow(theta[j], 2 * l);
    sum += v;
    sum2 += v * v;
  }
  out.empirical = sum / n;
  const double var = std::max(0.0, sum2 / n - out.empirical * out.empirical);
  out.stderr_ = std::sqrt(var / n);
  return out;
}

IncrementCheck minlos_increment_check(const ComplexEstimate& c_psi_phi,
                                      const ComplexEstimate& c_psi,
                                      const ComplexEstimate& c_phi,
                                      double sigmas) {
  IncrementCheck out;
  const std::complex<double> diff = c_psi_phi.value - c_psi.value;
  out.lhs = std::norm(diff);
  out.rhs = 2.0 * std::abs(c_phi.value - 1.0);
  // propagated first-order errors of both sides
  const double d = std::abs(diff);
  const double lhs_err =
      2.0 * d * (c_psi_phi.stderr_ + c_psi.stderr_);
  const double rhs_err = 2.0 * c_phi.stderr_;
  out.slack = sigmas * (lhs_err + rhs_err);
  out.pass = out.lhs <= out.rhs + out.slack;
  return out;
}

IncrementCheck minlos_increment_check_exact(const FreeFieldModel& model,
                                            const TestFunction& phi,
                                            const TestFunction& psi) {
  ComplexEstimate a{char_functional_exact(model, psi + phi), 0.0};
  ComplexEstimate b{char_functional_exact(model, psi), 0.0};
  ComplexEstimate c{char_functional_exact(model, phi), 0.0};
  return minlos_increment_check(a, b, c, 0.0);
}

}  // namespace nlsq
