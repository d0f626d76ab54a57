#include "fairmpc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairmpc {

namespace {

void require_steps(const SimulationTrace & trace, const char * what)
{
  if (trace.steps.empty()) { throw std::invalid_argument(std::string(what) + ": empty trace"); }
}

Vector efforts(const Vector & u, int num_systems)
{
  const auto m = u.size() / num_systems;
  Vector a(num_systems);
  for (int i = 0; i < num_systems; ++i) { a(i) = u.segment(i * m, m).lpNorm<1>(); }
  return a;
}

}  // namespace

bool all_inputs_zero(const Vector & u) { return u.size() == 0 || u.cwiseAbs().maxCoeff() == 0.0; }

double jain(const Vector & u, int num_systems)
{
  if (num_systems < 1 || u.size() % num_systems != 0) { throw std::invalid_argument("jain: input size mismatch"); }
  const Vector a = efforts(u, num_systems);
  const double sq = a.squaredNorm();
  if (sq == 0.0) { return 1.0; }
  const double s = a.sum();
  return s * s / (num_systems * sq);
}

double scaled_jain(const Vector & u, int num_systems)
{
  if (num_systems == 1) { return 1.0; }
  return (num_systems * jain(u, num_systems) - 1.0) / (num_systems - 1.0);
}

double equity_instant(const Vector & x, const Vector & x_s, int num_systems)
{
  const auto n = x.size() / num_systems;
  const Vector e = x_s - x;
  Vector mean = Vector::Zero(n);
  for (int i = 0; i < num_systems; ++i) { mean += e.segment(i * n, n); }
  mean /= num_systems;
  double dev = 0.0;
  for (int i = 0; i < num_systems; ++i) { dev += (e.segment(i * n, n) - mean).norm(); }
  return std::exp(-dev / num_systems);
}

double tracking_instant(const Vector & x, const Vector & x_s, int num_systems, const std::vector<int> & group)
{
  const auto n = x.size() / num_systems;
  double acc = 0.0;
  int count = 0;
  for (int i = 0; i < num_systems; ++i) {
    if (!group.empty() && std::find(group.begin(), group.end(), i) == group.end()) { continue; }
    acc += (x_s.segment(i * n, n) - x.segment(i * n, n)).norm();
    ++count;
  }
  if (count == 0) { throw std::invalid_argument("tracking_instant: empty group"); }
  return std::exp(-acc / count);
}

std::string to_string(const TrackingSpec & spec)
{
  switch (spec.variant) {
    case TrackingVariant::Averaged: return "averaged";
    case TrackingVariant::Terminal: return "terminal";
    case TrackingVariant::TailAveraged: return "tail_averaged(" + std::to_string(spec.tail_start) + ")";
  }
  return "unknown";
}

double equality_index(const SimulationTrace & trace)
{
  require_steps(trace, "equality_index");
  double acc = 0.0;
  for (const auto & s : trace.steps) { acc += scaled_jain(s.u, trace.num_systems); }
  return acc / trace.length();
}

double equity_index(const SimulationTrace & trace)
{
  require_steps(trace, "equity_index");
  double acc = 0.0;
  for (const auto & s : trace.steps) { acc += equity_instant(s.x, trace.x_s, trace.num_systems); }
  return acc / trace.length();
}

double tracking_index(const SimulationTrace & trace, const TrackingSpec & spec, const std::vector<int> & group)
{
  require_steps(trace, "tracking_index");
  const int t_len = trace.length();
  int first = 0;
  if (spec.variant == TrackingVariant::Terminal) { first = t_len - 1; }
  if (spec.variant == TrackingVariant::TailAveraged) {
    if (spec.tail_start < 0 || spec.tail_start >= t_len) { throw std::invalid_argument("tracking_index: tail start out of range"); }
    first = spec.tail_start;
  }
  double acc = 0.0;
  for (int t = first; t < t_len; ++t) { acc += tracking_instant(trace.steps[t].x, trace.x_s, trace.num_systems, group); }
  return acc / (t_len - first);
}

SettlingResult settling_index(const SimulationTrace & trace, double alpha_pct)
{
  require_steps(trace, "settling_index");
  const int t_len = trace.length();
  const int n = trace.n;
  SettlingResult out;
  double sum = 0.0;
  for (int i = 0; i < trace.num_systems; ++i) {
    const Vector xs = trace.x_s.segment(i * n, n);
    const double e0 = (xs - trace.steps[0].x.segment(i * n, n)).norm();
    int tau = t_len - 1;
    for (int t = 0; t < t_len; ++t) {
      if ((xs - trace.steps[t].x.segment(i * n, n)).norm() <= alpha_pct / 100.0 * e0) {
        tau = t;
        break;
      }
    }
    out.tau.push_back(tau);
    sum += tau;
  }
  out.h_tau = t_len > 1 ? 1.0 - (sum / trace.num_systems) / (t_len - 1) : 1.0;
  return out;
}

double individual_index(const SimulationTrace & trace, int system)
{
  require_steps(trace, "individual_index");
  if (system < 0 || system >= trace.num_systems) { throw std::invalid_argument("individual_index: no such system"); }
  const int n = trace.n;
  return std::exp(-(trace.x_s.segment(system * n, n) - trace.steps.back().x.segment(system * n, n)).norm());
}

KpiReport compute_kpis(const SimulationTrace & trace, const TrackingSpec & spec, double alpha_pct)
{
  require_steps(trace, "compute_kpis");
  KpiReport r;
  r.h_s_spec = spec;
  r.h_s = tracking_index(trace, spec);
  r.alpha_pct = alpha_pct;
  const auto settle = settling_index(trace, alpha_pct);
  r.h_tau = settle.h_tau;
  r.tau = settle.tau;
  r.h_u = equality_index(trace);
  r.h_e = equity_index(trace);
  for (int i = 0; i < trace.num_systems; ++i) { r.h_s_individual.push_back(individual_index(trace, i)); }
  for (const auto & s : trace.steps) {
    r.jain_series.push_back(scaled_jain(s.u, trace.num_systems));
    r.equity_series.push_back(equity_instant(s.x, trace.x_s, trace.num_systems));
    if (all_inputs_zero(s.u)) { ++r.zero_input_steps; }
  }
  return r;
}

}  // namespace fairmpc
