#pragma once
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "evolution.hpp"
#include "functionals.hpp"
#include "grid.hpp"

namespace nlslab {

struct IntervalRecord {
  double t_lo = 0, t_hi = 0;
  double mass = 0;  // q-norm mass carried by this interval
  bool exceptional = false;
  double free_mass_sum = std::numeric_limits<double>::quiet_NaN();
  double min_conc_ratio = std::numeric_limits<double>::quiet_NaN();
  double conc_radius = 0;
  bool unverifiable = false;
  double length() const { return t_hi - t_lo; }
};

struct IntervalPartition {
  double eta1 = 0;
  double eta2 = std::numeric_limits<double>::quiet_NaN();  // set by classify_exceptional
  double q = 0;
  double total_mass = 0;
  bool single_flagged = false;  // total below eta1: one interval, under target
  std::vector<IntervalRecord> intervals;
  int L() const { return static_cast<int>(intervals.size()); }
};

namespace detail {
// cumulative trapezoid of per-snapshot values, evaluated inside gaps by
// integrating the linear interpolant
struct CumulativeTrapezoid {
  std::vector<double> t, v, cum;
  CumulativeTrapezoid(const std::vector<double>& times, const std::vector<double>& vals)
      : t(times), v(vals), cum(times.size(), 0.0) {
    for (size_t i = 1; i < t.size(); ++i)
      cum[i] = cum[i - 1] + 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
  }
  double total() const { return cum.back(); }
  double at(double s) const {
    if (s <= t.front()) return 0;
    if (s >= t.back()) return total();
    size_t i = std::upper_bound(t.begin(), t.end(), s) - t.begin() - 1;
    double dt = s - t[i], w = t[i + 1] - t[i];
    double vi = v[i] + (v[i + 1] - v[i]) * dt / w;
    return cum[i] + 0.5 * (v[i] + vi) * dt;
  }
};
}

inline std::vector<double> snapshot_q_masses(const Trace& tr, double q) {
  std::vector<double> out;
  for (const SpectralField& c : tr.series.fields)
    out.push_back(std::pow(lp_norm_spectral(c, q), q));
  return out;
}

inline IntervalPartition partition_intervals(const Trace& tr, double eta1) {
  if (!(eta1 > 0)) throw std::invalid_argument("partition_intervals: eta1 must be > 0");
  if (tr.series.size() < 2) throw std::invalid_argument("partition_intervals: need >= 2 snapshots");
  IntervalPartition part;
  part.eta1 = eta1;
  const int n = tr.spec.n;
  part.q = 2.0 * (n + 2) / (n - 2);
  detail::CumulativeTrapezoid cum(tr.series.times, snapshot_q_masses(tr, part.q));
  part.total_mass = cum.total();

  std::vector<double> bounds{tr.series.times.front()};
  if (part.total_mass < eta1) {
    part.single_flagged = true;
  } else {
    const double tol = 1e-3 * eta1;
    for (double target = eta1; target < part.total_mass - tol; target += eta1) {
      double lo = bounds.back(), hi = tr.series.times.back();
      for (int it = 0; it < 100 && hi - lo > 0; ++it) {
        double mid = (lo + hi) / 2;
        if (std::abs(cum.at(mid) - target) <= tol / 2) { lo = hi = mid; break; }
        (cum.at(mid) < target ? lo : hi) = mid;
      }
      bounds.push_back((lo + hi) / 2);
    }
  }
  bounds.push_back(tr.series.times.back());
  for (size_t i = 0; i + 1 < bounds.size(); ++i) {
    IntervalRecord rec;
    rec.t_lo = bounds[i];
    rec.t_hi = bounds[i + 1];
    rec.mass = cum.at(bounds[i + 1]) - cum.at(bounds[i]);
    part.intervals.push_back(rec);
  }
  return part;
}

// q-norm mass over [t_lo, t_hi] of the free evolution launched at (t0, c0),
// sampled on the trace's snapshot lattice plus the exact interval endpoints.
inline double free_mass_on_interval(const Trace& tr, const SpectralField& c0, double t0,
                                    double t_lo, double t_hi, double q) {
  std::vector<double> ts{t_lo};
  for (double t : tr.series.times)
    if (t > t_lo && t < t_hi) ts.push_back(t);
  ts.push_back(t_hi);
  std::vector<double> vals;
  for (double t : ts) {
    SpectralField f = free_propagator_spectral(c0, t - t0);
    vals.push_back(std::pow(lp_norm_spectral(f, q), q));
  }
  double acc = 0;
  for (size_t i = 0; i + 1 < ts.size(); ++i)
    acc += 0.5 * (vals[i] + vals[i + 1]) * (ts[i + 1] - ts[i]);
  return acc;
}

// An interval is exceptional when the free evolutions launched from the two
// endpoints of the WHOLE time interval retain at least eta2 of q-mass on it.
// Returns the exceptional count (the proof bounds it by ~ 1/eta2).
inline int classify_exceptional(const Trace& tr, IntervalPartition& part, double eta2) {
  if (tr.series.size() < 2) throw std::invalid_argument("classify_exceptional: missing endpoints");
  const SpectralField& left = tr.series.fields.front();
  const SpectralField& right = tr.series.fields.back();
  const double tL = tr.series.times.front(), tR = tr.series.times.back();
  part.eta2 = eta2;
  int count = 0;
  for (IntervalRecord& rec : part.intervals) {
    double s = free_mass_on_interval(tr, left, tL, rec.t_lo, rec.t_hi, part.q) +
               free_mass_on_interval(tr, right, tR, rec.t_lo, rec.t_hi, part.q);
    rec.free_mass_sum = s;
    rec.exceptional = s >= eta2;
    count += rec.exceptional;
  }
  return count;
}

struct MassConcentrationReport {
  double c_prime = 0, C_prime = 0;
  double worst_ratio = HUGE_VAL;       // min over unexceptional intervals of min local mass ratio
  double max_lipschitz_ratio = 0;      // max |d Mass/dt| R / sup ||grad u||
  int checked = 0, unverifiable = 0;
};

inline MassConcentrationReport mass_concentration_check(const Trace& tr, IntervalPartition& part,
                                                        double c_prime, double C_prime) {
  MassConcentrationReport rep;
  rep.c_prime = c_prime;
  rep.C_prime = C_prime;
  double sup_grad = 0;
  for (const EnergyRow& row : tr.reports) sup_grad = std::max(sup_grad, std::sqrt(row.kinetic));

  for (IntervalRecord& rec : part.intervals) {
    if (rec.exceptional) continue;
    double len = rec.length();
    if (len <= 0) continue;
    double radius = C_prime * std::sqrt(len);
    rec.conc_radius = radius;
    if (radius > tr.spec.r_max) {
      rec.unverifiable = true;
      ++rep.unverifiable;
      continue;
    }
    double best = HUGE_VAL;
    std::vector<std::pair<double, double>> masses;  // (t, local mass) for the Lipschitz table
    for (int i = 0; i < tr.series.size(); ++i) {
      double t = tr.series.times[i];
      if (t < rec.t_lo - 1e-12 || t > rec.t_hi + 1e-12) continue;
      double lm = local_mass(tr.series.fields[i], radius);
      masses.emplace_back(t, lm);
      best = std::min(best, lm / std::sqrt(len));
    }
    if (best < HUGE_VAL) {
      rec.min_conc_ratio = best;
      rep.worst_ratio = std::min(rep.worst_ratio, best);
      ++rep.checked;
    }
    if (sup_grad > 0)
      for (size_t i = 0; i + 1 < masses.size(); ++i) {
        double fd = std::abs(masses[i + 1].second - masses[i].second) /
                    (masses[i + 1].first - masses[i].first);
        rep.max_lipschitz_ratio = std::max(rep.max_lipschitz_ratio, fd * radius / sup_grad);
      }
  }
  return rep;
}

inline std::vector<std::pair<int, int>> unexceptional_runs(const IntervalPartition& part) {
  std::vector<std::pair<int, int>> runs;
  int i = 0;
  while (i < part.L()) {
    if (part.intervals[i].exceptional) { ++i; continue; }
    int j = i;
    while (j + 1 < part.L() && !part.intervals[j + 1].exceptional) ++j;
    runs.emplace_back(i, j);
    i = j + 1;
  }
  return runs;
}

struct IntervalRatioReport {
  double ratio = 0;           // max interval length over run length
  double log10_ratio = 0;
  double log10_threshold = 0; // log10 of (c')^{1/sqrt(delta)}
  bool holds = false;
};

inline IntervalRatioReport largest_interval_ratio(const IntervalPartition& part,
                                                  std::pair<int, int> run, double c_prime,
                                                  double delta) {
  if (run.first > run.second || run.first < 0 || run.second >= part.L())
    throw std::invalid_argument("largest_interval_ratio: empty or invalid run");
  double run_len = part.intervals[run.second].t_hi - part.intervals[run.first].t_lo;
  double best = 0;
  for (int l = run.first; l <= run.second; ++l)
    best = std::max(best, part.intervals[l].length());
  IntervalRatioReport rep;
  rep.ratio = best / run_len;
  rep.log10_ratio = std::log10(rep.ratio);
  rep.log10_threshold = std::log10(c_prime) / std::sqrt(delta);
  rep.holds = rep.log10_ratio >= rep.log10_threshold;
  return rep;
}

struct TowerReport {
  double anchor = 0;
  std::vector<int> indices;  // dyadically decreasing lengths, longest first
  int K = 0;
  double lower_bound = 0;    // -log(L) / (2 log(eta/8))
  bool meets_bound = false;
  bool size_ok = true;       // |J_{i_1}| >= 2|J_{i_2}| >= ...
  bool dist_ok = true;       // dist(anchor, J) <= eta^{-1} |J|
};

inline double lower_bound_K(int L, double eta) {
  if (L < 1 || !(eta > 0) || !(eta < 8)) throw std::invalid_argument("lower_bound_K: bad inputs");
  return -std::log(static_cast<double>(L)) / (2.0 * std::log(eta / 8.0));
}

namespace detail {
inline double interval_dist(double t, double lo, double hi) {
  if (t >= lo && t <= hi) return 0.0;
  return t < lo ? lo - t : t - hi;
}
// maximum chain with each next length >= 2x previous: greedy from the smallest
inline std::vector<int> greedy_chain(const std::vector<std::pair<double, int>>& sorted_lens) {
  std::vector<int> picked;
  double last = -1;
  for (const auto& [len, idx] : sorted_lens) {
    if (len <= 0) continue;
    if (picked.empty() || len >= 2 * last) {
      picked.push_back(idx);
      last = len;
    }
  }
  return picked;
}
}

// eta is nominally (c')^{1/sqrt(delta)} in (0,1); anything in (0,8) keeps the
// bound formula defined, so the guard stops there.
inline TowerReport bourgain_tower_search(const IntervalPartition& part, double eta) {
  if (!(eta > 0) || !(eta < 8)) throw std::invalid_argument("bourgain_tower_search: eta out of range");
  TowerReport rep;
  if (part.L() == 0) {
    rep.meets_bound = true;
    return rep;
  }

  std::vector<double> anchors;
  for (const IntervalRecord& rec : part.intervals) anchors.push_back(rec.t_lo);
  anchors.push_back(part.intervals.back().t_hi);

  for (double tbar : anchors) {
    std::vector<std::pair<double, int>> eligible;
    for (int l = 0; l < part.L(); ++l) {
      const IntervalRecord& rec = part.intervals[l];
      if (detail::interval_dist(tbar, rec.t_lo, rec.t_hi) <= rec.length() / eta)
        eligible.emplace_back(rec.length(), l);
    }
    std::sort(eligible.begin(), eligible.end());
    std::vector<int> chain = detail::greedy_chain(eligible);
    if (static_cast<int>(chain.size()) > rep.K) {
      rep.K = static_cast<int>(chain.size());
      rep.anchor = tbar;
      rep.indices.assign(chain.rbegin(), chain.rend());  // longest first
    }
  }
  rep.lower_bound = lower_bound_K(part.L(), eta);
  rep.meets_bound = rep.K >= rep.lower_bound;

  for (size_t i = 0; i + 1 < rep.indices.size(); ++i)
    if (part.intervals[rep.indices[i]].length() <
        2 * part.intervals[rep.indices[i + 1]].length() - 1e-12)
      rep.size_ok = false;
  for (int idx : rep.indices) {
    const IntervalRecord& rec = part.intervals[idx];
    if (detail::interval_dist(rep.anchor, rec.t_lo, rec.t_hi) > rec.length() / eta + 1e-12)
      rep.dist_ok = false;
  }
  return rep;
}

struct CountBoundReport {
  int L = 0;
  int exceptional_count = 0;
  int run_count = 0;
  double exceptional_cap = 0;       // ~ 1/eta2, shape of the exceptional-count bound
  double log10_log10_L_bound = 0;   // C1^{C1^{1/sqrt(delta)}} in log-log form
  double log10_log10_C0_bound = 0;  // same shape with the outer constant C0
};

inline CountBoundReport count_bound_report(const Trace&, double delta, const IntervalPartition& part,
                                           double C0 = 10.0, double C1 = 10.0) {
  if (!(C0 > 1) || !(C1 > 1)) throw std::invalid_argument("count_bound_report: constants must exceed 1");
  CountBoundReport rep;
  rep.L = part.L();
  for (const IntervalRecord& rec : part.intervals)
    if (rec.exceptional) ++rep.exceptional_count;
  rep.run_count = static_cast<int>(unexceptional_runs(part).size());
  if (part.eta2 > 0) rep.exceptional_cap = 1.0 / part.eta2;
  double rd = 1.0 / std::sqrt(delta);
  rep.log10_log10_L_bound = rd * std::log10(C1) + std::log10(std::log10(C1));
  rep.log10_log10_C0_bound = rd * std::log10(C0) + std::log10(std::log10(C0));
  return rep;
}

}
