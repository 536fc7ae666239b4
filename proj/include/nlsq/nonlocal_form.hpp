#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nlsq/interactions.hpp"

namespace nlsq {

// test function depending on finitely many coordinates
struct CylinderFunction {
  std::vector<int> support;
  std::function<double(const Vector&)> eval;

  double operator()(const Vector& x) const { return eval(x); }
};

CylinderFunction constant_fn(double c);
CylinderFunction coordinate_fn(int i);
// smooth compactly supported bump in coordinate i: exp(1 - 1/(1-t^2)) on
// |t| < 1 with t = (x_i - center)/width
CylinderFunction bump_fn(int i, double center, double width);
CylinderFunction product_fn(const CylinderFunction& a,
                            const CylinderFunction& b);
// unit contraction u# = min(max(u, 0), 1)
CylinderFunction unit_contraction(const CylinderFunction& u);

// either the free field itself or a Gibbs reweighting of it
struct Target {
  const FreeFieldModel* free_model = nullptr;
  const GibbsModel* gibbs_model = nullptr;

  const FreeFieldModel& base() const {
    return gibbs_model ? *gibbs_model->base : *free_model;
  }
  bool is_gibbs() const { return gibbs_model != nullptr; }
  int count() const { return base().count(); }
};

// one-coordinate conditional law of the target, frozen off-coordinates
struct ConditionalDensity {
  int index = 0;
  bool gaussian = true;
  double mean = 0.0;
  double sd = 1.0;       // gaussian sd; for tabulated, the gaussian-part sd
  // tabulated branch: piecewise-linear log-density on `nodes`
  Vector nodes;
  Vector log_density;    // unnormalized
  double log_norm = 0.0;
  double norm_refinement_error = 0.0;

  double pdf(double y) const;
  double log_pdf_unnorm(double y) const;
  double lo() const;
  double hi() const;
};

// gaussian-part conditional moments from the base precision matrix
double conditional_sd(const Target& target, int i);
ConditionalDensity conditional_density(const Target& target, int i,
                                       const Vector& x, int tab_points = 257);

// log of the unnormalized conditional density at x_i = y (cheap, used by
// the chain's acceptance ratio)
double conditional_log_unnorm(const Target& target, int i, const Vector& x,
                              double y);

// the integrand of the form: increment product over |y - y'|^{alpha+1}
double phi_alpha(const CylinderFunction& u, const CylinderFunction& v, int i,
                 double alpha, double y, double y_prime, const Vector& frozen);

struct FormOptions {
  int outer_samples = 2000;
  std::uint64_t seed = 1;
  double eps_quad = 1e-4;   // singular split radius (absolute)
  int inner_points = 129;   // Simpson nodes per log-graded piece
  // divergence signal: |integrand| at the integration boundary relative to
  // its peak on the same side
  double tail_decade_limit = 0.5;
};

struct FormEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double max_tail_fraction = 0.0;
};

FormEstimate form_value(const CylinderFunction& u, const CylinderFunction& v,
                        const Target& target, double alpha,
                        const FormOptions& opt);

// contribution of a single coordinate index (zero when i is off-support)
FormEstimate form_value_for_index(const CylinderFunction& u,
                                  const CylinderFunction& v,
                                  const Target& target, double alpha, int i,
                                  const FormOptions& opt);

enum class SweepSchedule { Systematic, UniformRandom };

struct JumpChainConfig {
  double alpha = 1.0;
  double eps = 1e-3;   // small-jump cutoff, in conditional-sd units
  double cap = 1e3;    // proposal tail cap R, in conditional-sd units
  int sweeps = 1000;
  int record_stride = 1;
  SweepSchedule schedule = SweepSchedule::Systematic;
  std::uint64_t seed = 1;
  bool force_accept = false;  // negative control: skip the accept test

  void validate() const;
};

struct ChainResult {
  Matrix trajectory;  // K x (records + 1), first column is x0
  long proposed = 0;
  long accepted = 0;
  double acceptance_rate = 0.0;
  bool low_acceptance_warning = false;
};

// reversible Metropolis chain: symmetric eps-truncated power-law proposal
// |y - x_i|^{-(1+alpha)} on [eps, R] sd units, accepted with the conditional
// density ratio
ChainResult simulate_chain(const Target& target, const JumpChainConfig& cfg,
                           Vector x0, std::uint64_t stream = 0);

// draw the proposal jump magnitude (inverse CDF on [eps, cap])
double sample_jump(double alpha, double eps, double cap, double unit);
double jump_log_density(double alpha, double eps, double cap, double r);

struct ObservableSpec {
  std::string name;
  std::function<double(const Vector&)> fn;
};

struct DriftRow {
  std::string name;
  double start = 0.0;
  double end = 0.0;
  double stderr_ = 0.0;
  double z = 0.0;
  bool pass = true;
};

// moment drift over an ensemble of chains started from the target measure
std::vector<DriftRow> invariance_report(
    const Target& target, const JumpChainConfig& cfg,
    const std::vector<ObservableSpec>& observables, int ensembles,
    int workers = 1, double z_limit = 4.0);

// ---- finite dimensional local (alpha -> 2) limit ----

struct Smooth1D {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double support_halfwidth = 1.0;
};

struct Density1D {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double domain_halfwidth = 10.0;
};

enum class WindowMode { Global, Local };

// window half-widths M(alpha) and M(alpha; x)
double window_m(double alpha);
double window_m_local(double alpha, double rho_x);

// windowed double integral of the 1-D jump form; as alpha -> 2 the global
// window tends to int f' g' rho^2 and the local window to int f' g' rho
double windowed_form_1d(const Smooth1D& f, const Smooth1D& g,
                        const Density1D& rho, double alpha, WindowMode mode,
                        int outer_points = 2001, double eps_quad = 1e-4);

}  // namespace nlsq
