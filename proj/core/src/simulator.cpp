#include "annuity/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "annuity/errors.hpp"
#include "annuity/random.hpp"

namespace annuity {

namespace {

struct YearSample {
  double consumption, labor_income, portfolio;
};

PathRecord run_path(const Policy& policy, const SimulationConfig& cfg, std::size_t path_index,
                    PathDiagnostics* diag, std::vector<YearSample>* profile) {
  const auto& solver = policy.solver();
  const auto& sol = policy.solution();
  const auto& u = policy.utility();
  const auto& dc = solver.constants();
  const auto& q = solver.params();
  if (sol.regime != Regime::Stopping)
    throw RegimeError("simulation needs a stopping boundary (ruined regime)");

  PathRecord rec;
  rec.path = path_index;
  if (cfg.x0 >= sol.x_star) {
    rec.x_tau = cfg.x0;
    rec.annual_annuity = q.k * cfg.x0;
    rec.pv_annuity = rec.annual_annuity / dc.rho;
    rec.net_wealth = rec.pv_annuity;
    rec.y_tau = policy.policy_at_wealth(cfg.x0).y;
    if (diag) {
      diag->budget = cfg.x0 + q.w / q.r;
      diag->primal = policy.stopped_value(cfg.x0);
    }
    return rec;
  }

  const NormalStream stream(cfg.seed);
  const std::size_t n_steps = cfg.n_steps();
  const double dt = cfg.dt;
  const double y_init = solver.shadow_of_wealth(cfg.x0, sol);
  double y = y_init;
  double sum_c = 0, sum_lab = 0, pv_c = 0, pv_lab = 0;
  double budget = 0, primal = 0;
  std::size_t next_year = 0;
  std::size_t steps_taken = n_steps;
  bool stopped = false;

  for (std::size_t i = 0; i < n_steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double c = u.inv_marginal_consumption(y);
    const double l = u.inv_marginal_leisure(y);
    const double labor_income = q.w * (1 - l);
    const double disc = std::exp(-dc.rho * t);
    sum_c += c * dt;
    sum_lab += labor_income * dt;
    pv_c += disc * c * dt;
    pv_lab += disc * labor_income * dt;
    if (diag) {
      const double H = y / (y_init * std::exp(dc.rho * t));
      budget += H * (c + q.w * l) * dt;
      primal += disc * q.v1 * u.u1(c, l) * dt;
    }
    if (profile && i == static_cast<std::size_t>(std::llround(static_cast<double>(next_year) / dt))) {
      profile->push_back({c, labor_income, policy.optimal_portfolio(y)});
      ++next_year;
    }
    y = step_shadow(dc, q.r, y, dt, stream.normal(path_index, i));
    if (y <= sol.y_star) {
      steps_taken = i + 1;
      stopped = true;
      break;
    }
  }

  rec.tau = static_cast<double>(steps_taken) * dt;
  rec.censored = !stopped;
  rec.y_tau = y;
  // the wealth the strategy actually holds at the grid time it stops
  rec.x_tau = solver.continuation_wealth(y, sol);
  rec.annual_annuity = q.k * rec.x_tau;
  const double disc_tau = std::exp(-dc.rho * rec.tau);
  rec.pv_annuity = disc_tau * rec.annual_annuity / dc.rho;
  rec.pv_consumption = pv_c;
  rec.pv_labor = pv_lab;
  rec.net_wealth = pv_lab + rec.pv_annuity - pv_c;
  rec.avg_consumption = sum_c / rec.tau;
  rec.avg_labor_income = sum_lab / rec.tau;

  if (diag) {
    const double H = y / (y_init * std::exp(dc.rho * rec.tau));
    diag->budget = budget + H * (rec.x_tau + q.w / q.r);
    const double terminal = stopped ? policy.stopped_value(rec.x_tau)
                                    : y * (rec.x_tau + q.w / q.r) + solver.phi_continuation(y, sol);
    diag->primal = primal + disc_tau * terminal;
  }
  return rec;
}

}  // namespace

std::size_t SimulationConfig::n_steps() const {
  return static_cast<std::size_t>(std::llround(end_time() / dt));
}

void validate(const SimulationConfig& cfg) {
  if (cfg.n_paths < 1) throw ValidationError("paths must be at least 1");
  if (!(cfg.dt > 0 && cfg.dt <= 1)) throw ValidationError("dt must lie in (0, 1]");
  if (!(cfg.horizon > 0) || !std::isfinite(cfg.horizon))
    throw ValidationError("horizon must be positive");
  if (cfg.forced_stop) {
    if (!(*cfg.forced_stop > 0)) throw ValidationError("forced_stop must be positive");
    if (*cfg.forced_stop > cfg.horizon) throw ValidationError("forced_stop must not exceed horizon");
  }
  if (!(cfg.x0 > 0) || !std::isfinite(cfg.x0)) throw ValidationError("x0 must be positive");
  if (cfg.n_steps() < 1) throw ValidationError("dt must not exceed the simulated time");
}

double annuity_payment_pv(const PathRecord& rec, double rho) {
  return std::exp(-rho * rec.tau) * rec.annual_annuity;
}

double step_shadow(const DerivedConstants& dc, double r, double y, double dt, double z) {
  const double drift = dc.rho - r - 0.5 * dc.theta * dc.theta;
  return y * std::exp(drift * dt - dc.theta * std::sqrt(dt) * z);
}

PathRecord simulate_path(const Policy& policy, const SimulationConfig& cfg,
                         std::size_t path_index) {
  validate(cfg);
  return run_path(policy, cfg, path_index, nullptr, nullptr);
}

PathRecord simulate_path(const Policy& policy, const SimulationConfig& cfg, std::size_t path_index,
                         PathDiagnostics& diagnostics) {
  validate(cfg);
  return run_path(policy, cfg, path_index, &diagnostics, nullptr);
}

void parallel_paths(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

Summary summarize(std::vector<double> v) {
  Summary s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  auto quantile = [&](double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  s.min = v.front();
  s.max = v.back();
  s.p05 = quantile(0.05);
  s.p25 = quantile(0.25);
  s.p50 = quantile(0.50);
  s.p75 = quantile(0.75);
  s.p90 = quantile(0.90);
  const double n = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = v.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  return s;
}

double CohortStats::probability_within(double years) const {
  if (paths.empty()) return 0;
  std::size_t hits = 0;
  for (const auto& p : paths)
    if (!p.censored && p.tau <= years + 1e-9) ++hits;
  return static_cast<double>(hits) / static_cast<double>(paths.size());
}

CohortStats run_cohort(const Policy& policy, const SimulationConfig& cfg) {
  validate(cfg);
  if (policy.solution().regime != Regime::Stopping)
    throw RegimeError("simulation needs a stopping boundary (ruined regime)");
  CohortStats out;
  out.paths.resize(cfg.n_paths);
  std::vector<std::vector<YearSample>> samples(cfg.n_paths);
  parallel_paths(cfg.n_paths, cfg.threads, [&](std::size_t i) {
    out.paths[i] = run_path(policy, cfg, i, nullptr, &samples[i]);
  });

  const double rho = policy.solver().constants().rho;
  std::vector<double> labor, cons, ann, ann_pv, net, tau;
  double tau_sum = 0;
  for (const auto& p : out.paths) {
    labor.push_back(p.avg_labor_income);
    cons.push_back(p.avg_consumption);
    ann.push_back(p.annual_annuity);
    ann_pv.push_back(annuity_payment_pv(p, rho));
    net.push_back(p.net_wealth);
    tau.push_back(p.tau);
    tau_sum += p.tau;
    if (p.censored) ++out.n_censored;
  }
  out.mean_tau = tau_sum / static_cast<double>(cfg.n_paths);
  out.labor_income = summarize(labor);
  out.consumption = summarize(cons);
  out.annuity = summarize(ann);
  out.annuity_pv = summarize(ann_pv);
  out.net_wealth = summarize(net);
  out.tau = summarize(tau);
  const auto years = static_cast<std::size_t>(std::floor(cfg.end_time() + 1e-9));
  for (std::size_t n = 1; n <= years; ++n)
    out.prob_within.emplace_back(static_cast<double>(n), out.probability_within(static_cast<double>(n)));

  for (std::size_t j = 0;; ++j) {
    YearProfile yp;
    yp.t = static_cast<double>(j);
    for (const auto& s : samples) {
      if (s.size() <= j) continue;
      ++yp.active;
      yp.consumption += s[j].consumption;
      yp.labor_income += s[j].labor_income;
      yp.portfolio += s[j].portfolio;
    }
    if (yp.active == 0) break;
    const double a = static_cast<double>(yp.active);
    yp.consumption /= a;
    yp.labor_income /= a;
    yp.portfolio /= a;
    out.profile.push_back(yp);
  }
  return out;
}

std::vector<WealthSweepRow> sweep_initial_wealth(const Policy& policy, SimulationConfig cfg,
                                                 const std::vector<double>& x0_list) {
  std::vector<WealthSweepRow> rows;
  for (double x0 : x0_list) {
    cfg.x0 = x0;
    const auto stats = run_cohort(policy, cfg);
    WealthSweepRow row;
    row.x0 = x0;
    row.mean_tau = stats.mean_tau;
    row.mean_consumption = stats.consumption.mean;
    row.mean_labor_income = stats.labor_income.mean;
    row.prob_censored =
        static_cast<double>(stats.n_censored) / static_cast<double>(stats.paths.size());
    rows.push_back(row);
  }
  return rows;
}

Histogram histogram(const std::vector<double>& values, double lo, double hi, std::size_t bins) {
  Histogram h{lo, hi, std::vector<std::size_t>(bins, 0)};
  if (bins == 0 || !(hi > lo)) return h;
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    if (v < lo || v > hi) continue;
    auto b = static_cast<std::size_t>((v - lo) / width);
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit fit;
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return fit;
  const double nn = static_cast<double>(n);
  const double mx = std::accumulate(x.begin(), x.begin() + n, 0.0) / nn;
  const double my = std::accumulate(y.begin(), y.begin() + n, 0.0) / nn;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace annuity
