#include "carbon/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

#include "carbon/error.hpp"
#include "carbon/parallel.hpp"
#include "carbon/philox.hpp"

namespace carbon {

std::string to_string(JumpBranch branch) {
  switch (branch) {
    case JumpBranch::below: return "below";
    case JumpBranch::above: return "above";
    case JumpBranch::at: return "at";
  }
  return "unknown";
}

std::uint64_t PathBundle::n_aborted() const {
  return static_cast<std::uint64_t>(std::count(aborted.begin(), aborted.end(), std::uint8_t{1}));
}

std::size_t PathBundle::time_index(double t) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= tol) return i;
  std::ostringstream os;
  os << "t=" << t << " is not a recorded time node";
  throw ValidationError(os.str());
}

bool PathBundle::emissions_nondecreasing(std::uint64_t path) const {
  for (std::size_t i = 1; i < times.size(); ++i)
    if (E[index(path, i)] < E[index(path, i - 1)]) return false;
  return true;
}

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

namespace {

/// Read access to Y for the path engine, period k is 1-based.
class FieldAccess {
 public:
  virtual ~FieldAccess() = default;
  virtual int periods() const = 0;
  virtual double start(int k) const = 0;
  virtual double end(int k) const = 0;
  virtual double cap(int k, double e_prev) const = 0;
  virtual double y(int k, double t, double p, double e, double e_prev) const = 0;
  virtual double y_left(int k, double p, double e, double e_prev) const = 0;
  virtual double y_right(int k, double p, double e, double e_prev) const = 0;
  virtual double de(int k) const = 0;
};

class MultiAccess final : public FieldAccess {
 public:
  explicit MultiAccess(const MultiPeriodField& field)
      : field_(field), theta_(field.spec().final_condition()) {}
  int periods() const override { return field_.num_periods(); }
  double start(int k) const override { return field_.spec().period_start(k); }
  double end(int k) const override { return field_.spec().period_end(k); }
  double cap(int k, double e_prev) const override { return field_.spec().cap(k)(e_prev); }
  double y(int k, double t, double p, double e, double e_prev) const override {
    return field_.period(k).evaluate(t, p, e, e_prev);
  }
  double y_left(int k, double p, double e, double e_prev) const override {
    const ValueGrid& g = field_.period(k);
    return g.evaluate_slice(g.nt() - 2, p, e, e_prev);
  }
  double y_right(int k, double p, double e, double e_prev) const override {
    if (k == periods()) return theta_(p, e, e_prev);
    return field_.period(k + 1).evaluate(end(k), p, e, e);
  }
  double de(int k) const override { return field_.period(k).de(); }

 private:
  const MultiPeriodField& field_;
  TerminalSurface theta_;
};

class InfiniteAccess final : public FieldAccess {
 public:
  InfiniteAccess(const ValueGrid& w, const MarketSpec& spec, int periods)
      : w_(w), tau_(spec.period_length), lambda_(spec.per_period_cap), periods_(periods) {}
  int periods() const override { return periods_; }
  double start(int k) const override { return (k - 1) * tau_; }
  double end(int k) const override { return k * tau_; }
  double cap(int k, double) const override { return k * lambda_; }
  double y(int k, double t, double p, double e, double) const override {
    return w_.evaluate(t - start(k), p, e - (k - 1) * lambda_);
  }
  double y_left(int k, double p, double e, double) const override {
    return w_.evaluate_slice(w_.nt() - 2, p, e - (k - 1) * lambda_);
  }
  double y_right(int k, double p, double e, double) const override {
    return w_.evaluate(0.0, p, e - k * lambda_);
  }
  double de(int) const override { return w_.de(); }

 private:
  const ValueGrid& w_;
  double tau_;
  double lambda_;
  int periods_;
};

PathBundle run(const FieldAccess& field, const CoefficientSet& coeffs, double e0, double p0,
               const SimulationSettings& s) {
  if (s.n_paths == 0) throw ValidationError("n_paths must be positive");
  if (s.steps_per_period < 1) throw ValidationError("steps_per_period must be positive");
  if (s.record_every < 1) throw ValidationError("record_every must be positive");

  PathBundle b;
  b.n_paths = s.n_paths;
  b.dim_p = coeffs.dim_p;
  b.rate = coeffs.rate;
  b.seed = s.seed;
  b.steps_per_period = s.steps_per_period;
  b.record_every = s.record_every;

  const int q = field.periods();
  const int S = s.steps_per_period;
  // recorded Euler node j of each period; j = 0 only for the first period
  std::vector<std::vector<int>> record_nodes(static_cast<std::size_t>(q));
  b.times.push_back(field.start(1));
  for (int k = 1; k <= q; ++k) {
    b.period_ends.push_back(field.end(k));
    auto& nodes = record_nodes[static_cast<std::size_t>(k - 1)];
    if (k == 1) nodes.push_back(0);
    const double h = (field.end(k) - field.start(k)) / S;
    for (int j = 1; j <= S; ++j) {
      if (j % s.record_every != 0 && j != S) continue;
      nodes.push_back(j);
      b.times.push_back(j == S ? field.end(k) : field.start(k) + j * h);
    }
  }

  const std::size_t nt = b.times.size();
  b.E.assign(s.n_paths * nt, 0.0);
  b.Y.assign(s.n_paths * nt, 0.0);
  if (coeffs.dim_p > 0) b.P.assign(s.n_paths * nt, 0.0);
  b.aborted.assign(s.n_paths, 0);
  std::vector<JumpRecord> slots(s.n_paths * static_cast<std::size_t>(q));
  std::vector<std::string> reasons(s.n_paths);

  parallel_for(s.n_paths, resolve_threads(s.threads), [&](std::size_t path) {
    double P = p0, E = e0;
    double e_prev = e0;
    std::size_t ti = 0;
    const auto record = [&](double y) {
      const std::size_t i = b.index(path, ti++);
      b.E[i] = E;
      b.Y[i] = y;
      if (coeffs.dim_p > 0) b.P[i] = P;
    };
    try {
      for (int k = 1; k <= q; ++k) {
        const auto& nodes = record_nodes[static_cast<std::size_t>(k - 1)];
        std::size_t next_node = 0;
        const double t0 = field.start(k);
        const double h = (field.end(k) - t0) / S;
        const double sqrt_h = std::sqrt(h);
        for (int j = 0; j < S; ++j) {
          const double t = t0 + j * h;
          const double y = field.y(k, t, P, E, e_prev);
          if (next_node < nodes.size() && nodes[next_node] == j) {
            record(y);
            ++next_node;
          }
          const double mu = coeffs.mu(P, y);
          if (coeffs.dim_p > 0) {
            const std::uint64_t step = static_cast<std::uint64_t>(k - 1) * S + j;
            const double z = normal_pair(s.seed, path, step)[0];
            P += coeffs.b(P) * h + coeffs.sigma(P) * sqrt_h * z;
          }
          E += mu * h;
        }
        JumpRecord& ev = slots[path * static_cast<std::size_t>(q) + (k - 1)];
        ev.path = path;
        ev.k = k;
        ev.e_at_date = E;
        ev.cap = field.cap(k, e_prev);
        ev.y_left = field.y_left(k, P, E, e_prev);
        ev.y_right = field.y_right(k, P, E, e_prev);
        ev.de = field.de(k);
        ev.branch = E > ev.cap ? JumpBranch::above : (E < ev.cap ? JumpBranch::below : JumpBranch::at);
        record(ev.y_right);
        e_prev = E;
      }
    } catch (const GridBoundsError& err) {
      b.aborted[path] = 1;
      reasons[path] = "path " + std::to_string(path) + ": " + err.what();
    }
  });

  for (std::size_t path = 0; path < s.n_paths; ++path) {
    if (b.aborted[path]) {
      if (b.abort_reasons.size() < 20) b.abort_reasons.push_back(reasons[path]);
      continue;
    }
    for (int k = 0; k < q; ++k) b.events.push_back(slots[path * static_cast<std::size_t>(q) + k]);
  }
  const std::uint64_t n_abort = b.n_aborted();
  if (n_abort * 1000 > s.n_paths) {
    std::ostringstream os;
    os << n_abort << " of " << s.n_paths << " paths left the grid";
    if (!b.abort_reasons.empty()) os << " (first: " << b.abort_reasons.front() << ")";
    throw SolverError(os.str());
  }
  if (n_abort > 0)
    b.warnings.push_back(std::to_string(n_abort) + " paths left the grid and were excluded");
  return b;
}

}  // namespace

PathBundle simulate(const MultiPeriodField& field, const CoefficientSet& coeffs,
                    const SimulationSettings& settings) {
  const MultiAccess access(field);
  return run(access, coeffs, field.spec().initial_emissions, field.spec().initial_factor, settings);
}

PathBundle simulate(const ValueGrid& w, const MarketSpec& spec, const CoefficientSet& coeffs,
                    const SimulationSettings& settings) {
  if (!spec.infinite) throw ValidationError("infinite-period simulation needs an infinite market spec");
  if (settings.periods < 1) throw ValidationError("periods must be positive");
  const InfiniteAccess access(w, spec, settings.periods);
  return run(access, coeffs, spec.initial_emissions, spec.initial_factor, settings);
}

MartingaleReport martingale_test(const PathBundle& bundle, double t1, double t2, double abs_tol) {
  if (bundle.n_paths == 0 || bundle.times.empty()) throw ValidationError("empty path bundle");
  if (!(t1 < t2)) throw ValidationError("martingale test needs t1 < t2");
  const double tol = 1e-9 * std::max(1.0, std::abs(t2));
  int left_k = 0;
  for (std::size_t k = 0; k < bundle.period_ends.size(); ++k) {
    const double T = bundle.period_ends[k];
    if (std::abs(T - t2) <= tol) {
      left_k = static_cast<int>(k) + 1;
    } else if (T > t1 + tol && T < t2) {
      std::ostringstream os;
      os << "compliance date " << T << " lies inside (" << t1 << ", " << t2 << ")";
      throw ValidationError(os.str());
    }
  }
  const std::size_t i1 = bundle.time_index(t1);
  const std::size_t i2 = bundle.time_index(t2);

  std::vector<double> left(bundle.n_paths, 0.0);
  if (left_k > 0)
    for (const auto& ev : bundle.events)
      if (ev.k == left_k) left[ev.path] = ev.y_left;

  const double d1 = std::exp(-bundle.rate * t1);
  const double d2 = std::exp(-bundle.rate * t2);
  std::vector<double> a, c, diff;
  for (std::uint64_t path = 0; path < bundle.n_paths; ++path) {
    if (bundle.aborted[path]) continue;
    const double y1 = d1 * bundle.Y[bundle.index(path, i1)];
    const double y2 = d2 * (left_k > 0 ? left[path] : bundle.Y[bundle.index(path, i2)]);
    a.push_back(y1);
    c.push_back(y2);
    diff.push_back(y2 - y1);
  }
  if (diff.empty()) throw ValidationError("every path aborted");

  MartingaleReport r;
  r.t1 = t1;
  r.t2 = t2;
  r.paths_used = diff.size();
  r.uses_left_limit = left_k > 0;
  const double n = static_cast<double>(diff.size());
  r.mean_t1 = pairwise_sum(a) / n;
  r.mean_t2 = pairwise_sum(c) / n;
  r.delta = pairwise_sum(diff) / n;
  for (double& d : diff) d = (d - r.delta) * (d - r.delta);
  const double var = diff.size() > 1 ? pairwise_sum(diff) / (n - 1.0) : 0.0;
  r.standard_error = std::sqrt(var / n);
  r.pass = std::abs(r.delta) <= 3.0 * r.standard_error + abs_tol;
  return r;
}

std::vector<JumpReport> jump_consistency_test(const PathBundle& bundle, double margin_cells) {
  std::vector<JumpReport> out(bundle.period_ends.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].k = static_cast<int>(k) + 1;
    out[k].at_cap_min_left = 1.0;
    out[k].at_cap_max_left = 0.0;
  }
  for (const auto& ev : bundle.events) {
    JumpReport& r = out[static_cast<std::size_t>(ev.k - 1)];
    const double margin = margin_cells * ev.de;
    const double gap = ev.e_at_date - ev.cap;
    const bool above = margin > 0.0 ? gap >= margin : gap > 0.0;
    const bool below = margin > 0.0 ? -gap >= margin : gap < 0.0;
    if (above) {
      ++r.n_above;
      r.above_residual = std::max(r.above_residual, std::abs(ev.y_left - 1.0));
    } else if (below) {
      ++r.n_below;
      r.below_residual = std::max(r.below_residual, std::abs(ev.y_left - ev.y_right));
    } else {
      ++r.n_at_cap;
      r.at_cap_min_left = std::min(r.at_cap_min_left, ev.y_left);
      r.at_cap_max_left = std::max(r.at_cap_max_left, ev.y_left);
    }
  }
  return out;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

std::unique_ptr<std::FILE, FileCloser> open_out(const std::filesystem::path& file) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(file.string().c_str(), "wb"));
  if (!f) throw FormatError("cannot open " + file.string() + " for writing");
  return f;
}

}  // namespace

void write_paths_csv(const PathBundle& bundle, const std::filesystem::path& file) {
  auto f = open_out(file);
  std::fputs(bundle.dim_p > 0 ? "path,t,P,E,Y\n" : "path,t,E,Y\n", f.get());
  for (std::uint64_t path = 0; path < bundle.n_paths; ++path) {
    if (bundle.aborted[path]) continue;
    for (std::size_t ti = 0; ti < bundle.n_times(); ++ti) {
      const std::size_t i = bundle.index(path, ti);
      if (bundle.dim_p > 0)
        std::fprintf(f.get(), "%llu,%.17g,%.17g,%.17g,%.17g\n", static_cast<unsigned long long>(path),
                     bundle.times[ti], bundle.P[i], bundle.E[i], bundle.Y[i]);
      else
        std::fprintf(f.get(), "%llu,%.17g,%.17g,%.17g\n", static_cast<unsigned long long>(path),
                     bundle.times[ti], bundle.E[i], bundle.Y[i]);
    }
  }
  if (std::ferror(f.get())) throw FormatError("write failed for " + file.string());
}

void write_events_csv(const PathBundle& bundle, const std::filesystem::path& file) {
  auto f = open_out(file);
  std::fputs("path,k,E_Tk,cap,Y_left,Y_right,branch\n", f.get());
  for (const auto& ev : bundle.events)
    std::fprintf(f.get(), "%llu,%d,%.17g,%.17g,%.17g,%.17g,%s\n",
                 static_cast<unsigned long long>(ev.path), ev.k, ev.e_at_date, ev.cap, ev.y_left,
                 ev.y_right, to_string(ev.branch).c_str());
  if (std::ferror(f.get())) throw FormatError("write failed for " + file.string());
}

}  // namespace carbon
