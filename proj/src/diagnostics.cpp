#include "nlskt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "nlskt/errors.hpp"
#include "nlskt/norms.hpp"
#include "nlskt/skt_core.hpp"

namespace nlskt {

namespace {

bool has_entropy(const SchemeParams& p) { return p.coeffs.d12 > 0.0 && p.coeffs.d21 > 0.0; }

double domain_measure(const PeriodicGrid& g) { return g.cell_volume() * static_cast<double>(g.size()); }

}  // namespace

double total_mass(std::span<const double> u, const PeriodicGrid& grid) {
  double s = 0.0;
  for (double v : u) s += v;
  return grid.cell_volume() * s;
}

double epsilon_solver(double dt, double residual_inf, const State& state, const SchemeParams& params,
                      double entropy_scale) {
  if (!has_entropy(params)) throw PreconditionError("entropy slack needs d12, d21 > 0");
  double log_max = 0.0;
  for (const CellField* f : {&state.u1, &state.u2}) {
    for (double v : *f) {
      if (v > 0.0) log_max = std::max(log_max, std::abs(std::log(v)));
      else log_max = std::numeric_limits<double>::infinity();
    }
  }
  const double dmin = std::min(params.coeffs.d12, params.coeffs.d21);
  const double eps = std::numeric_limits<double>::epsilon();
  const double cells = static_cast<double>(params.grid().size());
  return 10.0 * dt * domain_measure(params.grid()) * residual_inf * (1.0 + log_max) / dmin +
         100.0 * eps * std::sqrt(cells) * (std::abs(entropy_scale) + 1.0);
}

bool dissipation_by_default(const PeriodicGrid& grid) { return grid.size() <= 512; }

DiagnosticsRecord record(const State& previous, const State& current, const SchemeParams& params, double dt,
                         const StepStats& stats, bool compute_dissipation) {
  const PeriodicGrid& g = params.grid();
  DiagnosticsRecord r;
  r.time = current.time;
  r.mass1 = total_mass(current.u1, g);
  r.mass2 = total_mass(current.u2, g);
  auto [mn1, mx1] = std::minmax_element(current.u1.begin(), current.u1.end());
  auto [mn2, mx2] = std::minmax_element(current.u2.begin(), current.u2.end());
  r.min1 = *mn1;
  r.max1 = *mx1;
  r.min2 = *mn2;
  r.max2 = *mx2;
  r.newton_iterations = stats.iterations;
  r.linear_iterations = stats.linear_iterations;
  r.halvings = stats.halvings;
  r.dt = dt;
  r.final_residual = stats.final_residual;
  if (has_entropy(params)) {
    const double h = entropy(current.u1, current.u2, g, params.coeffs.d12, params.coeffs.d21);
    const double h_prev = entropy(previous.u1, previous.u2, g, params.coeffs.d12, params.coeffs.d21);
    r.entropy = h;
    if (compute_dissipation) {
      r.dissipation = dissipation(current.u1, current.u2, params);
      r.entropy_balance = h + dt * *r.dissipation - h_prev;
    }
    r.epsilon_solver = epsilon_solver(dt, stats.final_residual, current, params, std::max(h, h_prev));
  }
  const MuFields m = mu(current, params);
  double s = 0.0;
  for (std::size_t i = 0; i < current.u1.size(); ++i) {
    s += (m.mu1[i] * current.u1[i] + m.mu2[i] * current.u2[i]) * (current.u1[i] + current.u2[i]);
  }
  r.duality_partial = dt * g.cell_volume() * s;
  return r;
}

RunMonitor::RunMonitor(const SchemeParams& params, const State& initial, DiagnosticsOptions options)
    : params_(params),
      options_(options),
      dissipation_(options.compute_dissipation.value_or(dissipation_by_default(params.grid()))),
      entropy_checked_(options.check_entropy && satisfies_entropy_hypotheses(params)),
      reaction_free_(is_zero_reaction(params.reaction)),
      mass0_1_(total_mass(initial.u1, params.grid())),
      mass0_2_(total_mass(initial.u2, params.grid())) {}

StepObserver RunMonitor::observer() {
  return [this](const State& previous, const StepOutcome& accepted) { observe(previous, accepted); };
}

void RunMonitor::observe(const State& previous, const StepOutcome& accepted) {
  StepStats st;
  st.time = accepted.state.time;
  st.dt_used = accepted.dt_used;
  st.iterations = accepted.iterations;
  st.linear_iterations = accepted.linear_iterations;
  st.halvings = accepted.halvings;
  st.initial_residual = accepted.initial_residual;
  st.final_residual = accepted.final_residual;
  DiagnosticsRecord r = record(previous, accepted.state, params_, accepted.dt_used, st, dissipation_);
  r.k = static_cast<int>(records_.size()) + 1;
  duality_ += r.duality_partial;
  r.duality_partial = duality_;

  if (reaction_free_) {
    const double d1 = mass0_1_ > 0.0 ? std::abs(r.mass1 - mass0_1_) / mass0_1_ : std::abs(r.mass1);
    const double d2 = mass0_2_ > 0.0 ? std::abs(r.mass2 - mass0_2_) / mass0_2_ : std::abs(r.mass2);
    max_mass_drift_ = std::max({max_mass_drift_, d1, d2});
  }
  const bool pos1 = params_.coeffs.d1 > 0.0, pos2 = params_.coeffs.d2 > 0.0;
  if ((pos1 && !(r.min1 > 0.0)) || (pos2 && !(r.min2 > 0.0)) || r.min1 < 0.0 || r.min2 < 0.0) {
    positivity_ok_ = false;
  }
  if (entropy_checked_ && r.entropy) {
    // with dissipation: H^k + dt D^k <= H^{k-1} + eps; without it the weaker monotonicity
    const double h_prev = records_.empty()
                              ? entropy(previous.u1, previous.u2, params_.grid(), params_.coeffs.d12,
                                        params_.coeffs.d21)
                              : *records_.back().entropy;
    const double lhs = r.entropy_balance ? *r.entropy_balance : *r.entropy - h_prev;
    if (lhs > r.epsilon_solver) entropy_ok_ = false;
  }
  records_.push_back(r);
}

bool RunMonitor::mass_ok() const { return !reaction_free_ || max_mass_drift_ <= 10.0 * options_.tolerance; }

std::string format_double(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(16) << v;
  return os.str();
}

DiagnosticsWriter::DiagnosticsWriter(const std::string& path) : out_(path) {
  if (!out_) throw ConfigError("cannot open " + path + " for writing");
  out_ << "k,t,mass1,mass2,H,D,entropy_balance,min1,max1,min2,max2,newton_iters,dt\n";
}

void DiagnosticsWriter::write(const DiagnosticsRecord& r) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  out_ << r.k << ',' << format_double(r.time) << ',' << format_double(r.mass1) << ',' << format_double(r.mass2)
       << ',' << opt(r.entropy) << ',' << opt(r.dissipation) << ',' << opt(r.entropy_balance) << ','
       << format_double(r.min1) << ',' << format_double(r.max1) << ',' << format_double(r.min2) << ','
       << format_double(r.max2) << ',' << r.newton_iterations << ',' << format_double(r.dt) << '\n';
}

void DiagnosticsWriter::write_all(const std::vector<DiagnosticsRecord>& rs) {
  for (const auto& r : rs) write(r);
  out_.flush();
}

void write_field_snapshot(const std::string& path, const State& state, const PeriodicGrid& grid) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  if (grid.dimension() == 1) {
    out << "x,u1,u2\n";
    for (int i = 0; i < grid.nx(); ++i) {
      out << format_double(grid.center_x(i)) << ',' << format_double(state.u1[i]) << ','
          << format_double(state.u2[i]) << '\n';
    }
  } else {
    out << "x,y,u1,u2\n";
    for (int j = 0; j < grid.ny(); ++j) {
      for (int i = 0; i < grid.nx(); ++i) {
        const auto c = grid.index(i, j);
        out << format_double(grid.center_x(i)) << ',' << format_double(grid.center_y(j)) << ','
            << format_double(state.u1[c]) << ',' << format_double(state.u2[c]) << '\n';
      }
    }
  }
}

}  // namespace nlskt
