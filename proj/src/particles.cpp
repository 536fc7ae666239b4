#include "nlsq/particles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlsq/rng.hpp"

namespace nlsq {

long Configuration::total_multiplicity() const {
  long total = 0;
  for (long m : multiplicities) total += m;
  return total;
}

void Configuration::validate() const {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("configuration: dimension must be 1 or 2");
  if (points.rows() != static_cast<Eigen::Index>(multiplicities.size()))
    throw std::invalid_argument("configuration: points/multiplicity mismatch");
  if (points.rows() > 0 && points.cols() != dimension)
    throw std::invalid_argument("configuration: point dimension mismatch");
  for (long m : multiplicities)
    if (m < 1)
      throw std::invalid_argument("configuration: multiplicities must be >= 1");
  for (Eigen::Index j = 0; j < points.rows(); ++j)
    for (int k = 0; k < dimension; ++k)
      if (std::abs(points(j, k)) > window)
        throw std::invalid_argument("configuration: point outside the window");
}

long occupation_count(const Configuration& conf, const std::vector<int>& r) {
  if (static_cast<int>(r.size()) != conf.dimension)
    throw std::invalid_argument("occupation_count: lattice point dimension");
  long acc = 0;
  for (Eigen::Index j = 0; j < conf.points.rows(); ++j) {
    bool inside = true;
    for (int k = 0; k < conf.dimension; ++k) {
      const double y = conf.points(j, k);
      // half-open cube: r - 1/2 <= y < r + 1/2
      if (!(y >= r[k] - 0.5 && y < r[k] + 0.5)) {
        inside = false;
        break;
      }
    }
    if (inside) acc += conf.multiplicities[j];
  }
  return acc;
}

namespace {

// cube index of a point (nearest lattice point under the half-open rule)
int cube_index(double y) { return static_cast<int>(std::floor(y + 0.5)); }

}  // namespace

MembershipReport u_n_membership(const Configuration& conf, long n_bound,
                                int l_max) {
  conf.validate();
  if (n_bound < 1)
    throw std::invalid_argument("u_n_membership: N must be >= 1");

  int needed = 0;
  for (Eigen::Index j = 0; j < conf.points.rows(); ++j)
    for (int k = 0; k < conf.dimension; ++k)
      needed = std::max(needed, std::abs(cube_index(conf.points(j, k))));
  if (l_max < needed)
    throw std::invalid_argument(
        "u_n_membership: l_max smaller than the occupied window");

  // occupation numbers by cube, keyed on the shifted lattice
  const int side = 2 * l_max + 1;
  auto key = [&](Eigen::Index j) {
    int flat = 0;
    for (int k = conf.dimension - 1; k >= 0; --k)
      flat = flat * side + cube_index(conf.points(j, k)) + l_max;
    return flat;
  };
  std::vector<long> occ(static_cast<size_t>(std::pow(side, conf.dimension)),
                        0);
  std::vector<int> level_of(occ.size(), 0);
  for (Eigen::Index j = 0; j < conf.points.rows(); ++j)
    occ[key(j)] += conf.multiplicities[j];
  for (size_t f = 0; f < occ.size(); ++f) {
    size_t rest = f;
    int level = 0;
    for (int k = 0; k < conf.dimension; ++k) {
      level = std::max(level,
                       std::abs(static_cast<int>(rest % side) - l_max));
      rest /= side;
    }
    level_of[f] = level;
  }

  // cumulative sum of n^2 by |r|_inf level
  std::vector<double> level_sum(l_max + 1, 0.0);
  for (size_t f = 0; f < occ.size(); ++f)
    if (occ[f] > 0)
      level_sum[level_of[f]] +=
          static_cast<double>(occ[f]) * static_cast<double>(occ[f]);

  MembershipReport rep;
  rep.member = true;
  double lhs = 0.0;
  const double n2 = static_cast<double>(n_bound) * n_bound;
  for (int l = 0; l <= l_max; ++l) {
    lhs += level_sum[l];
    const double rhs = n2 * std::pow(2.0 * l + 1.0, conf.dimension);
    const double ratio = lhs / rhs;
    if (ratio > rep.worst_ratio) rep.worst_ratio = ratio;
    if (lhs > rhs && rep.member) {
      rep.member = false;
      rep.worst_l = l;
    }
  }
  return rep;
}

double ruelle_tail_bound(const RuelleParams& params, long n_bound) {
  const double gap =
      params.gamma_r * n_bound * n_bound - std::exp(params.delta_r);
  if (gap <= 0.0)
    throw std::domain_error(
        "ruelle_tail_bound: need gamma N^2 > e^delta (series diverges)");
  const double q = std::exp(-gap);
  return q / (1.0 - q);
}

Configuration sample_poisson_config(double intensity, double window,
                                    int dimension, std::uint64_t seed) {
  if (intensity <= 0.0 || window <= 0.0)
    throw std::invalid_argument("poisson: intensity and window must be > 0");
  Rng rng(seed, 0x9013501);
  const double mean = intensity * std::pow(2.0 * window, dimension);

  // inversion for small means, otherwise exponential-gap counting
  long count = 0;
  if (mean < 30.0) {
    const double u = rng.uniform_pos();
    double p = std::exp(-mean), cum = p;
    while (cum < u) {
      ++count;
      p *= mean / count;
      cum += p;
    }
  } else {
    double acc = 0.0;
    while (true) {
      acc += -std::log(rng.uniform_pos());
      if (acc > mean) break;
      ++count;
    }
  }

  Configuration conf;
  conf.dimension = dimension;
  conf.window = window;
  conf.points.resize(count, dimension);
  conf.multiplicities.assign(count, 1);
  for (long j = 0; j < count; ++j)
    for (int k = 0; k < dimension; ++k)
      conf.points(j, k) = window * (2.0 * rng.uniform() - 1.0);
  return conf;
}

Configuration merge_configs(const Configuration& a, const Configuration& b) {
  if (a.dimension != b.dimension)
    throw std::invalid_argument("merge_configs: dimension mismatch");
  Configuration out;
  out.dimension = a.dimension;
  out.window = std::max(a.window, b.window);
  out.points.resize(a.count() + b.count(), a.dimension);
  out.points.topRows(a.count()) = a.points;
  out.points.bottomRows(b.count()) = b.points;
  out.multiplicities = a.multiplicities;
  out.multiplicities.insert(out.multiplicities.end(),
                            b.multiplicities.begin(),
                            b.multiplicities.end());
  return out;
}

namespace {

// periodic cubic Lagrange weights at fraction t in [0, 1) for nodes
// {-1, 0, 1, 2} around the base index
void cubic_weights(double t, double w[4]) {
  w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
  w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
  w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
}

}  // namespace

double eigenfunction_value(const EigenSystem& es, int i,
                           const std::vector<double>& y) {
  const GridSpec& grid = es.grid;
  if (static_cast<int>(y.size()) != grid.dimension)
    throw std::invalid_argument("eigenfunction_value: dimension mismatch");
  const int n = grid.points_per_axis;
  const double h = grid.spacing();

  int base[2] = {0, 0};
  double w[2][4];
  for (int k = 0; k < grid.dimension; ++k) {
    if (std::abs(y[k]) > grid.half_width)
      throw std::invalid_argument(
          "eigenfunction_value: point outside the grid domain");
    const double u = (y[k] + grid.half_width) / h;
    base[k] = static_cast<int>(std::floor(u));
    cubic_weights(u - base[k], w[k]);
  }

  const auto wrap = [n](int a) { return ((a % n) + n) % n; };
  double acc = 0.0;
  if (grid.dimension == 1) {
    for (int a = 0; a < 4; ++a)
      acc += w[0][a] * es.basis(wrap(base[0] + a - 1), i);
  } else {
    for (int b = 0; b < 4; ++b) {
      const int row1 = wrap(base[1] + b - 1);
      for (int a = 0; a < 4; ++a) {
        const int row0 = wrap(base[0] + a - 1);
        acc += w[1][b] * w[0][a] * es.basis(row1 * n + row0, i);
      }
    }
  }
  return acc;
}

Vector embed(const Configuration& conf, const EigenSystem& es_tilde,
             int k_modes) {
  conf.validate();
  if (conf.dimension != es_tilde.grid.dimension)
    throw std::invalid_argument("embed: dimension mismatch");
  if (k_modes < 1 || k_modes > es_tilde.count())
    throw std::invalid_argument("embed: mode count out of range");
  Vector coords = Vector::Zero(k_modes);
  std::vector<double> y(conf.dimension);
  for (Eigen::Index j = 0; j < conf.points.rows(); ++j) {
    for (int k = 0; k < conf.dimension; ++k) y[k] = conf.points(j, k);
    const double m = static_cast<double>(conf.multiplicities[j]);
    for (int i = 0; i < k_modes; ++i)
      coords[i] += m * eigenfunction_value(es_tilde, i, y);
  }
  return coords;
}

double dual_norm_minus1(const EigenSystem& es, const Vector& coords) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < coords.size(); ++i) {
    const double lam = es.raw_scale * es.lambdas[i];
    acc += lam * lam * coords[i] * coords[i];
  }
  return std::sqrt(acc);
}

double norm_plus1(const EigenSystem& es, const Vector& coeffs) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    const double lam = es.raw_scale * es.lambdas[i];
    acc += coeffs[i] * coeffs[i] / (lam * lam);
  }
  return std::sqrt(acc);
}

double lemma21_c3(long n_bound, int dimension, double calibration) {
  double series = 0.0;
  for (int l = 0; l < 100000; ++l) {
    const double term = std::pow(l + 1.0, -0.5 * dimension - 2.5);
    series += term;
    if (term < 1e-12 * series) break;
  }
  return calibration * static_cast<double>(n_bound) * n_bound *
         (series + 1.0);
}

EmbeddingBoundReport lemma21_bound_check(const Configuration& conf,
                                         const EigenSystem& es_tilde,
                                         long n_bound,
                                         const Matrix& test_coeffs,
                                         double calibration) {
  const MembershipReport mem = u_n_membership(
      conf, n_bound,
      std::max(1, static_cast<int>(std::ceil(conf.window)) + 1));
  if (!mem.member)
    throw std::invalid_argument("lemma21_bound_check: configuration not in U_N");

  const int k = static_cast<int>(test_coeffs.rows());
  const Vector coords = embed(conf, es_tilde, k);
  EmbeddingBoundReport rep;
  for (Eigen::Index c = 0; c < test_coeffs.cols(); ++c) {
    const Vector phi = test_coeffs.col(c);
    const double denom = norm_plus1(es_tilde, phi);
    if (denom <= 0.0) continue;
    rep.max_ratio = std::max(rep.max_ratio,
                             std::abs(coords.dot(phi)) / denom);
  }
  rep.c3 = lemma21_c3(n_bound, conf.dimension, calibration);
  rep.pass = rep.max_ratio <= rep.c3;
  return rep;
}

std::vector<CellDecayRow> cell_decay_check(int dimension, int l_max,
                                           double constant) {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("cell_decay_check: dimension must be 1 or 2");
  std::vector<CellDecayRow> rows;
  const int quad = 201;  // Simpson nodes per axis over the unit cube
  for (int l = 0; l <= l_max; ++l) {
    // representative cube at r = (l, 0, ..): the weight is radial, so the
    // axis-aligned cube maximizes the integral at fixed |r|_inf = l
    double integral = 0.0;
    const double hq = 1.0 / (quad - 1);
    auto weight = [dimension](double r2) {
      return std::pow(r2 + 1.0, -2.0 * (dimension + 1));
    };
    if (dimension == 1) {
      for (int a = 0; a < quad; ++a) {
        const double y = l - 0.5 + a * hq;
        const double w = (a == 0 || a == quad - 1) ? 1.0 : (a % 2 ? 4.0 : 2.0);
        integral += w * weight(y * y);
      }
      integral *= hq / 3.0;
    } else {
      for (int b = 0; b < quad; ++b) {
        const double y1 = -0.5 + b * hq;
        const double wb = (b == 0 || b == quad - 1) ? 1.0 : (b % 2 ? 4.0 : 2.0);
        for (int a = 0; a < quad; ++a) {
          const double y0 = l - 0.5 + a * hq;
          const double wa =
              (a == 0 || a == quad - 1) ? 1.0 : (a % 2 ? 4.0 : 2.0);
          integral += wa * wb * weight(y0 * y0 + y1 * y1);
        }
      }
      integral *= hq * hq / 9.0;
    }
    CellDecayRow row;
    row.l = l;
    row.integral = integral;
    row.bound =
        constant * std::pow(l * l + 1.0, -0.5 * (3.0 * dimension + 5.0));
    row.pass = row.integral <= row.bound;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nlsq
