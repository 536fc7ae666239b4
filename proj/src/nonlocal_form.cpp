#include "nlsq/nonlocal_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "nlsq/rng.hpp"

namespace nlsq {

CylinderFunction constant_fn(double c) {
  return {{}, [c](const Vector&) { return c; }};
}

CylinderFunction coordinate_fn(int i) {
  return {{i}, [i](const Vector& x) { return x[i]; }};
}

CylinderFunction bump_fn(int i, double center, double width) {
  return {{i}, [i, center, width](const Vector& x) {
            const double t = (x[i] - center) / width;
            return t * t < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
          }};
}

CylinderFunction product_fn(const CylinderFunction& a,
                            const CylinderFunction& b) {
  std::vector<int> support = a.support;
  for (int i : b.support)
    if (std::find(support.begin(), support.end(), i) == support.end())
      support.push_back(i);
  std::sort(support.begin(), support.end());
  auto fa = a.eval, fb = b.eval;
  return {support, [fa, fb](const Vector& x) { return fa(x) * fb(x); }};
}

CylinderFunction unit_contraction(const CylinderFunction& u) {
  auto fu = u.eval;
  return {u.support, [fu](const Vector& x) {
            return std::min(std::max(fu(x), 0.0), 1.0);
          }};
}

// ---- conditional densities ----

double conditional_sd(const Target& target, int i) {
  const FreeFieldModel& base = target.base();
  return std::sqrt(1.0 / base.precision(i, i));
}

namespace {

double gaussian_conditional_mean(const FreeFieldModel& base, int i,
                                 const Vector& x) {
  const double pii = base.precision(i, i);
  double dot = base.precision.row(i).dot(x) - pii * x[i];
  return -dot / pii;
}

}  // namespace

double ConditionalDensity::lo() const {
  return gaussian ? mean - 8.0 * sd : nodes[0];
}

double ConditionalDensity::hi() const {
  return gaussian ? mean + 8.0 * sd : nodes[nodes.size() - 1];
}

double ConditionalDensity::log_pdf_unnorm(double y) const {
  if (gaussian) {
    const double t = (y - mean) / sd;
    return -0.5 * t * t;
  }
  // linear interpolation of the tabulated log-density
  const Eigen::Index n = nodes.size();
  if (y <= nodes[0] || y >= nodes[n - 1])
    return -std::numeric_limits<double>::infinity();
  const double step = (nodes[n - 1] - nodes[0]) / (n - 1);
  const Eigen::Index k = std::min<Eigen::Index>(
      n - 2, static_cast<Eigen::Index>((y - nodes[0]) / step));
  const double t = (y - nodes[k]) / step;
  return (1.0 - t) * log_density[k] + t * log_density[k + 1];
}

double ConditionalDensity::pdf(double y) const {
  if (gaussian) {
    const double t = (y - mean) / sd;
    return std::exp(-0.5 * t * t) / (sd * std::sqrt(2.0 * std::numbers::pi));
  }
  const double lp = log_pdf_unnorm(y);
  return std::isfinite(lp) ? std::exp(lp - log_norm) : 0.0;
}

namespace {

// trapezoid log-normalizer of exp(log_density) over an equispaced table
double tabulated_log_norm(const Vector& nodes, const Vector& logd) {
  const Eigen::Index n = nodes.size();
  const double step = (nodes[n - 1] - nodes[0]) / (n - 1);
  const double shift = logd.maxCoeff();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    acc += w * std::exp(logd[k] - shift);
  }
  return shift + std::log(acc * step);
}

Vector tabulate_log_density(const Target& target, int i, const Vector& x,
                            const Vector& nodes) {
  const GibbsModel& gm = *target.gibbs_model;
  const FreeFieldModel& base = *gm.base;
  const double mean = gaussian_conditional_mean(base, i, x);
  const double sd = conditional_sd(target, i);
  // base field with the i-th coordinate removed
  const Vector f0 = base.es.basis * x - x[i] * base.es.basis.col(i);
  const Vector& col = base.es.basis.col(i);
  Vector logd(nodes.size());
  Vector field(f0.size());
  for (Eigen::Index k = 0; k < nodes.size(); ++k) {
    const double t = (nodes[k] - mean) / sd;
    field = f0 + nodes[k] * col;
    logd[k] = -0.5 * t * t -
              potential_value(gm.potential, field, gm.wick, base.es.grid);
  }
  return logd;
}

}  // namespace

ConditionalDensity conditional_density(const Target& target, int i,
                                       const Vector& x, int tab_points) {
  ConditionalDensity cd;
  cd.index = i;
  const FreeFieldModel& base = target.base();
  cd.mean = gaussian_conditional_mean(base, i, x);
  cd.sd = conditional_sd(target, i);
  if (!target.is_gibbs()) {
    cd.gaussian = true;
    return cd;
  }
  cd.gaussian = false;
  int n = tab_points | 1;
  for (int attempt = 0; attempt < 3; ++attempt) {
    cd.nodes = Vector::LinSpaced(n, cd.mean - 8.0 * cd.sd,
                                 cd.mean + 8.0 * cd.sd);
    cd.log_density = tabulate_log_density(target, i, x, cd.nodes);
    cd.log_norm = tabulated_log_norm(cd.nodes, cd.log_density);

    const int n2 = 2 * n - 1;
    const Vector fine_nodes = Vector::LinSpaced(n2, cd.mean - 8.0 * cd.sd,
                                                cd.mean + 8.0 * cd.sd);
    const Vector fine_logd = tabulate_log_density(target, i, x, fine_nodes);
    const double fine_norm = tabulated_log_norm(fine_nodes, fine_logd);
    cd.norm_refinement_error = std::abs(std::exp(cd.log_norm - fine_norm) - 1.0);
    if (cd.norm_refinement_error <= 1e-4) return cd;
    n = n2;
  }
  throw std::runtime_error(
      "conditional_density: tabulation failed to normalize within 1e-4");
}

double conditional_log_unnorm(const Target& target, int i, const Vector& x,
                              double y) {
  const FreeFieldModel& base = target.base();
  const double mean = gaussian_conditional_mean(base, i, x);
  const double sd = conditional_sd(target, i);
  const double t = (y - mean) / sd;
  double lp = -0.5 * t * t;
  if (target.is_gibbs()) {
    const GibbsModel& gm = *target.gibbs_model;
    const Vector field =
        base.es.basis * x + (y - x[i]) * base.es.basis.col(i);
    lp -= potential_value(gm.potential, field, gm.wick, base.es.grid);
  }
  return lp;
}

// ---- the form ----

double phi_alpha(const CylinderFunction& u, const CylinderFunction& v, int i,
                 double alpha, double y, double y_prime,
                 const Vector& frozen) {
  if (y == y_prime)
    throw std::domain_error("phi_alpha: y and y' must differ");
  Vector x = frozen;
  x[i] = y;
  const double uy = u(x), vy = v(x);
  x[i] = y_prime;
  const double uyp = u(x), vyp = v(x);
  return (uy - uyp) * (vy - vyp) /
         std::pow(std::abs(y - y_prime), 1.0 + alpha);
}

namespace {

struct InnerResult {
  double value = 0.0;
  double tail_fraction = 0.0;
};

// inner 1-D integral over the conditional law with the singular kernel,
// split at eps_quad with a Taylor core
InnerResult inner_integral(const CylinderFunction& u,
                           const CylinderFunction& v, Vector& x, int i,
                           double alpha, const ConditionalDensity& cd,
                           const FormOptions& opt) {
  const double xi = x[i];
  const double ux = u(x), vx = v(x);
  auto increment_product = [&](double y) {
    x[i] = y;
    const double r = (u(x) - ux) * (v(x) - vx);
    x[i] = xi;
    return r;
  };

  InnerResult out;

  const double e = opt.eps_quad;
  // Taylor core on |y - x_i| < eps_quad using central finite differences
  {
    x[i] = xi + e;
    const double up = u(x), vp = v(x);
    x[i] = xi - e;
    const double um = u(x), vm = v(x);
    x[i] = xi;
    const double du = (up - um) / (2.0 * e);
    const double dv = (vp - vm) / (2.0 * e);
    out.value += du * dv * cd.pdf(xi) * 2.0 *
                 std::pow(e, 2.0 - alpha) / (2.0 - alpha);
  }

  // log-graded Simpson on each side: y = x_i +/- eps e^s. An integrable
  // integrand decays towards the domain edge; a boundary value comparable
  // to the peak flags divergence.
  for (int side = -1; side <= 1; side += 2) {
    const double edge = side > 0 ? cd.hi() : cd.lo();
    const double dist = side > 0 ? edge - xi : xi - edge;
    if (dist <= e) continue;
    const double s_max = std::log(dist / e);
    const int m = opt.inner_points | 1;
    const double hs = s_max / (m - 1);
    double acc = 0.0, peak = 0.0, at_edge = 0.0;
    for (int k = 0; k < m; ++k) {
      const double r = e * std::exp(k * hs);
      const double y = xi + side * r;
      const double term = increment_product(y) * std::pow(r, -alpha) *
                          cd.pdf(y);
      const double w = (k == 0 || k == m - 1) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      acc += w * term;
      peak = std::max(peak, std::abs(term));
      if (k == m - 1) at_edge = std::abs(term);
    }
    out.value += acc * hs / 3.0;
    if (peak > 0.0)
      out.tail_fraction = std::max(out.tail_fraction, at_edge / peak);
  }
  return out;
}

std::vector<int> support_union(const CylinderFunction& u,
                               const CylinderFunction& v) {
  std::vector<int> s = u.support;
  for (int i : v.support)
    if (std::find(s.begin(), s.end(), i) == s.end()) s.push_back(i);
  std::sort(s.begin(), s.end());
  return s;
}

// outer Monte Carlo draws from the target measure
Matrix target_samples(const Target& target, int count, std::uint64_t seed) {
  const FreeFieldModel& base = target.base();
  if (!target.is_gibbs()) return sample_field(base, count, seed);
  // importance resampling: oversample the base, resample by e^{-V}
  const int pool = 4 * count;
  const Matrix base_samples = sample_field(base, pool, seed);
  const GibbsModel& gm = *target.gibbs_model;
  const Vector v =
      potential_values(gm.potential, base, gm.wick, base_samples);
  const double v_min = v.minCoeff();
  Vector w(pool);
  for (int j = 0; j < pool; ++j) w[j] = std::exp(-(v[j] - v_min));
  const double total = w.sum();
  // systematic resampling, deterministic per seed
  Rng rng(seed, 0x7e57ed);
  const double start = rng.uniform() / count;
  Matrix out(base.count(), count);
  double cum = w[0] / total;
  int j = 0;
  for (int c = 0; c < count; ++c) {
    const double target_u = start + static_cast<double>(c) / count;
    while (cum < target_u && j + 1 < pool) cum += w[++j] / total;
    out.col(c) = base_samples.col(j);
  }
  return out;
}

}  // namespace

FormEstimate form_value(const CylinderFunction& u, const CylinderFunction& v,
                        const Target& target, double alpha,
                        const FormOptions& opt) {
  const std::vector<int> support = support_union(u, v);
  for (int i : support)
    if (i < 0 || i >= target.count())
      throw std::invalid_argument("form_value: support outside kept modes");

  const Matrix samples = target_samples(target, opt.outer_samples, opt.seed);
  const int n = opt.outer_samples;
  double sum = 0.0, sum2 = 0.0, max_tail = 0.0;
  Vector x(target.count());
  for (int j = 0; j < n; ++j) {
    x = samples.col(j);
    double total = 0.0;
    for (int i : support) {
      const ConditionalDensity cd = conditional_density(target, i, x);
      const InnerResult inner = inner_integral(u, v, x, i, alpha, cd, opt);
      total += inner.value;
      max_tail = std::max(max_tail, inner.tail_fraction);
    }
    sum += total;
    sum2 += total * total;
  }
  if (max_tail > opt.tail_decade_limit)
    throw std::runtime_error(
        "form_value: inner integrand has not decayed at the integration "
        "boundary (divergence signal)");
  FormEstimate est;
  est.value = sum / n;
  est.stderr_ = std::sqrt(std::max(0.0, sum2 / n - est.value * est.value) / n);
  est.max_tail_fraction = max_tail;
  return est;
}

FormEstimate form_value_for_index(const CylinderFunction& u,
                                  const CylinderFunction& v,
                                  const Target& target, double alpha, int i,
                                  const FormOptions& opt) {
  const Matrix samples = target_samples(target, opt.outer_samples, opt.seed);
  const int n = opt.outer_samples;
  double sum = 0.0, sum2 = 0.0, max_tail = 0.0;
  Vector x(target.count());
  for (int j = 0; j < n; ++j) {
    x = samples.col(j);
    const ConditionalDensity cd = conditional_density(target, i, x);
    const InnerResult inner = inner_integral(u, v, x, i, alpha, cd, opt);
    sum += inner.value;
    sum2 += inner.value * inner.value;
    max_tail = std::max(max_tail, inner.tail_fraction);
  }
  FormEstimate est;
  est.value = sum / n;
  est.stderr_ = std::sqrt(std::max(0.0, sum2 / n - est.value * est.value) / n);
  est.max_tail_fraction = max_tail;
  return est;
}

// ---- jump chain ----

void JumpChainConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("chain: alpha must be in (0, 1]");
  if (!(eps > 0.0 && eps < cap))
    throw std::invalid_argument("chain: need 0 < eps < R");
  if (sweeps < 0) throw std::invalid_argument("chain: sweeps >= 0");
}

double sample_jump(double alpha, double eps, double cap, double unit) {
  const double a = std::pow(eps, -alpha);
  const double b = std::pow(cap, -alpha);
  return std::pow(a - unit * (a - b), -1.0 / alpha);
}

double jump_log_density(double alpha, double eps, double cap, double r) {
  if (r < eps || r > cap)
    return -std::numeric_limits<double>::infinity();
  const double norm = (std::pow(eps, -alpha) - std::pow(cap, -alpha)) / alpha;
  return -(1.0 + alpha) * std::log(r) - std::log(norm);
}

ChainResult simulate_chain(const Target& target, const JumpChainConfig& cfg,
                           Vector x0, std::uint64_t stream) {
  cfg.validate();
  const int k = target.count();
  if (x0.size() != k)
    throw std::invalid_argument("simulate_chain: x0 dimension mismatch");

  Vector sd(k);
  for (int i = 0; i < k; ++i) sd[i] = conditional_sd(target, i);

  const int stride = std::max(1, cfg.record_stride);
  const int records = cfg.sweeps / stride;
  ChainResult res;
  res.trajectory.resize(k, records + 1);
  res.trajectory.col(0) = x0;

  Rng rng(cfg.seed, stream);
  Vector x = std::move(x0);
  int rec = 0;
  for (int sweep = 1; sweep <= cfg.sweeps; ++sweep) {
    for (int step = 0; step < k; ++step) {
      const int i = cfg.schedule == SweepSchedule::Systematic
                        ? step
                        : static_cast<int>(rng.next_u64() % k);
      const double r = sd[i] * sample_jump(cfg.alpha, cfg.eps, cfg.cap,
                                           rng.uniform());
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      const double y = x[i] + sign * r;
      ++res.proposed;
      bool accept = cfg.force_accept;
      const double log_u = std::log(rng.uniform_pos());
      if (!accept) {
        const double log_ratio = conditional_log_unnorm(target, i, x, y) -
                                 conditional_log_unnorm(target, i, x, x[i]);
        accept = log_u < log_ratio;
      }
      if (accept) {
        x[i] = y;
        ++res.accepted;
      }
    }
    if (sweep % stride == 0 && rec < records)
      res.trajectory.col(++rec) = x;
  }
  res.acceptance_rate =
      res.proposed > 0 ? static_cast<double>(res.accepted) / res.proposed : 0.0;
  res.low_acceptance_warning = res.proposed > 0 && res.acceptance_rate < 0.01;
  return res;
}

std::vector<DriftRow> invariance_report(
    const Target& target, const JumpChainConfig& cfg,
    const std::vector<ObservableSpec>& observables, int ensembles,
    int workers, double z_limit) {
  const Matrix starts = target_samples(target, ensembles, cfg.seed + 1);
  const int k = target.count();
  Matrix ends(k, ensembles);

  JumpChainConfig chain_cfg = cfg;
  chain_cfg.record_stride = std::max(1, cfg.sweeps);
  auto run_range = [&](int begin, int end) {
    for (int c = begin; c < end; ++c) {
      const ChainResult r = simulate_chain(target, chain_cfg, starts.col(c),
                                           static_cast<std::uint64_t>(c) + 1);
      ends.col(c) = r.trajectory.col(r.trajectory.cols() - 1);
    }
  };
  if (workers <= 1) {
    run_range(0, ensembles);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (ensembles + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(ensembles, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  std::vector<DriftRow> rows;
  for (const auto& obs : observables) {
    DriftRow row;
    row.name = obs.name;
    double s_sum = 0.0, e_sum = 0.0, d_sum = 0.0, d_sum2 = 0.0;
    for (int c = 0; c < ensembles; ++c) {
      const double a = obs.fn(starts.col(c));
      const double b = obs.fn(ends.col(c));
      s_sum += a;
      e_sum += b;
      d_sum += b - a;
      d_sum2 += (b - a) * (b - a);
    }
    row.start = s_sum / ensembles;
    row.end = e_sum / ensembles;
    const double d_mean = d_sum / ensembles;
    const double d_var =
        std::max(0.0, d_sum2 / ensembles - d_mean * d_mean);
    row.stderr_ = std::sqrt(d_var / ensembles);
    row.z = row.stderr_ > 0.0 ? d_mean / row.stderr_ : 0.0;
    row.pass = std::abs(row.z) < z_limit;
    rows.push_back(row);
  }
  return rows;
}

// ---- windowed 1-D local limit ----

double window_m(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("window_m: alpha in (0, 2)");
  return std::pow(1.0 - 0.5 * alpha, 1.0 / (2.0 - alpha));
}

double window_m_local(double alpha, double rho_x) {
  if (rho_x <= 0.0)
    throw std::invalid_argument("window_m_local: density must be positive");
  return std::pow((1.0 - 0.5 * alpha) / rho_x, 1.0 / (2.0 - alpha));
}

double windowed_form_1d(const Smooth1D& f, const Smooth1D& g,
                        const Density1D& rho, double alpha, WindowMode mode,
                        int outer_points, double eps_quad) {
  const double m_global = window_m(alpha);
  if (f.support_halfwidth > rho.domain_halfwidth ||
      g.support_halfwidth > rho.domain_halfwidth)
    throw std::invalid_argument(
        "windowed_form_1d: test function support exceeds the density domain");
  const double outer_half =
      std::min(std::max(f.support_halfwidth, g.support_halfwidth),
               rho.domain_halfwidth);

  const int np = outer_points | 1;
  const double hx = 2.0 * outer_half / (np - 1);

  auto inner_at = [&](double x) {
    double m = mode == WindowMode::Global ? m_global
                                          : window_m_local(alpha, rho.value(x));
    // windows wider than the available density domain are truncated there;
    // the density is negligible that far out by construction
    m = std::min(m, rho.domain_halfwidth - std::abs(x));
    const double fx = f.value(x), gx = g.value(x);
    const double core_radius = std::min(m, eps_quad);
    double inner = f.derivative(x) * g.derivative(x) * rho.value(x) * 2.0 *
                   std::pow(core_radius, 2.0 - alpha) / (2.0 - alpha);
    if (m > eps_quad) {
      // log-graded Simpson on [eps_quad, m], both sides
      const double s_max = std::log(m / eps_quad);
      const int mi = 257;
      const double hs = s_max / (mi - 1);
      for (int side = -1; side <= 1; side += 2) {
        double acc = 0.0;
        for (int ks = 0; ks < mi; ++ks) {
          const double t = eps_quad * std::exp(ks * hs);
          const double y = x + side * t;
          const double term = (f.value(y) - fx) * (g.value(y) - gx) *
                              std::pow(t, -alpha) * rho.value(y);
          const double w =
              (ks == 0 || ks == mi - 1) ? 1.0 : (ks % 2 ? 4.0 : 2.0);
          acc += w * term;
        }
        inner += acc * hs / 3.0;
      }
    }
    return inner;
  };

  double total = 0.0;
  for (int k = 0; k < np; ++k) {
    const double x = -outer_half + k * hx;
    const double w = (k == 0 || k == np - 1) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    total += w * inner_at(x) * rho.value(x);
  }
  return total * hx / 3.0;
}

}  // namespace nlsq
