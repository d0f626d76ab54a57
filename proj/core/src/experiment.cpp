#include "fairmpc/experiment.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fairmpc/presets.hpp"
#include "fairmpc/scenario_io.hpp"
#include "json.hpp"

namespace fairmpc {

namespace {

std::string fmt(double v)
{
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void write_file(const std::filesystem::path & path, const std::string & content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) { throw std::runtime_error("cannot write " + path.string()); }
  out << content;
  if (!out) { throw std::runtime_error("write failed for " + path.string()); }
}

const char * step_status(const StepRecord & s)
{
  return s.budget_exhausted ? "budget_exhausted" : to_string(s.status);
}

}  // namespace

Strategy parse_strategy(const std::string & text)
{
  for (Strategy s :
    {Strategy::PerformanceOnly, Strategy::PerformanceEquality, Strategy::PerformanceEquity, Strategy::FairMpc}) {
    if (text == to_string(s)) { return s; }
  }
  throw std::invalid_argument("unknown strategy '" + text + "'");
}

AutotuneMode parse_autotune(const std::string & text)
{
  for (AutotuneMode m : {AutotuneMode::Fixed, AutotuneMode::CaseA, AutotuneMode::CaseB}) {
    if (text == to_string(m)) { return m; }
  }
  throw std::invalid_argument("unknown autotune mode '" + text + "'");
}

EqualityFormulation parse_equality_mode(const std::string & text)
{
  if (text == "dc") { return EqualityFormulation::TwoSidedDC; }
  if (text == "hinge") { return EqualityFormulation::ConvexHinge; }
  throw std::invalid_argument("unknown equality mode '" + text + "'");
}

const char * to_string(EqualityFormulation f)
{
  return f == EqualityFormulation::TwoSidedDC ? "dc" : "hinge";
}

Scenario load_scenario(const std::string & source)
{
  for (const auto & p : list_presets()) {
    if (p.name == source) { return make_preset(source); }
  }
  if (!std::filesystem::exists(source)) {
    throw ScenarioError("", "'" + source + "' is neither a preset nor an existing file");
  }
  return load_scenario_file(source);
}

int exit_code_for(const SimulationTrace & trace)
{
  if (trace.aborted) { return 1; }
  return trace.any_max_iterations() ? 2 : 0;
}

void write_trace_csv(std::ostream & out, const SimulationTrace & trace)
{
  out << "t";
  for (int i = 1; i <= trace.num_systems; ++i) {
    for (int j = 1; j <= trace.n; ++j) { out << ",x" << i << '_' << j; }
  }
  for (int i = 1; i <= trace.num_systems; ++i) {
    for (int j = 1; j <= trace.m; ++j) { out << ",u" << i << '_' << j; }
  }
  out << ",u_bar_t,rho_bar_t,jain_scaled_t,equity_t,solver_status\n";
  for (const auto & s : trace.steps) {
    out << s.t;
    for (Eigen::Index k = 0; k < s.x.size(); ++k) { out << ',' << fmt(s.x(k)); }
    for (Eigen::Index k = 0; k < s.u.size(); ++k) { out << ',' << fmt(s.u(k)); }
    // rho_bar is shared by every group under auto-tuning; with fixed class weights the first group is shown
    const double rho = s.rho_bar.empty() ? 0.0 : s.rho_bar.front();
    out << ',' << fmt(s.u_bar) << ',' << fmt(rho) << ',' << fmt(s.jain_scaled) << ',' << fmt(s.equity) << ','
        << step_status(s) << '\n';
  }
}

std::string kpi_json(const KpiReport & k)
{
  nlohmann::json j;
  j["h_s"] = {{"variant", to_string(k.h_s_spec)}, {"value", k.h_s}};
  j["h_tau"] = {{"alpha_pct", k.alpha_pct}, {"value", k.h_tau}};
  j["h_u"] = k.h_u;
  j["h_e"] = k.h_e;
  j["h_s_individual"] = k.h_s_individual;
  j["zero_input_steps"] = k.zero_input_steps;
  return j.dump(2) + "\n";
}

std::string summary_text(
  const Scenario & scenario, const RunManifest & manifest, const SimulationTrace & trace, const KpiReport & kpis)
{
  std::ostringstream s;
  s << std::fixed << std::setprecision(3);
  s << "scenario   " << (scenario.name.empty() ? manifest.scenario_source : scenario.name) << '\n';
  s << "strategy   " << to_string(manifest.strategy) << '\n';
  s << "autotune   " << to_string(manifest.autotune) << '\n';
  s << "equality   " << to_string(manifest.equality) << '\n';
  s << "steps      " << trace.length() << " of " << scenario.sim_steps_t << '\n';
  s << "t_bar      " << (trace.t_bar ? std::to_string(*trace.t_bar) : std::string("none")) << '\n';
  if (trace.aborted) { s << "aborted    " << trace.diagnosis << '\n'; }
  s << '\n';
  s << "H_s (" << to_string(kpis.h_s_spec) << ")  " << kpis.h_s << '\n';
  s << "H_tau (alpha " << std::defaultfloat << kpis.alpha_pct << "%)  " << std::fixed << kpis.h_tau << '\n';
  s << "H_u  " << kpis.h_u << '\n';
  s << "H_e  " << kpis.h_e << '\n';
  for (std::size_t i = 0; i < kpis.h_s_individual.size(); ++i) {
    s << "h_s[" << i + 1 << "]  " << kpis.h_s_individual[i] << "  tau " << kpis.tau[i] << '\n';
  }
  if (kpis.zero_input_steps > 0) { s << "steps with all-zero input  " << kpis.zero_input_steps << '\n'; }
  return s.str();
}

RunOutcome run_experiment(const Scenario & scenario, const RunManifest & manifest)
{
  SimOptions opts;
  opts.strategy = manifest.strategy;
  opts.autotune = manifest.autotune;
  opts.solver = manifest.solver;
  opts.equality = manifest.equality;
  opts.budget_in_horizon = manifest.budget_in_horizon;

  RunOutcome out;
  out.trace = run_closed_loop(scenario, opts);
  out.exit_code = exit_code_for(out.trace);

  std::error_code ec;
  std::filesystem::create_directories(manifest.output_dir, ec);
  if (ec) { throw std::runtime_error("cannot create " + manifest.output_dir.string() + ": " + ec.message()); }

  std::ostringstream csv;
  write_trace_csv(csv, out.trace);
  write_file(manifest.output_dir / "trace.csv", csv.str());
  if (out.trace.length() > 0) {
    out.kpis = compute_kpis(out.trace, manifest.tracking, manifest.alpha_pct);
    write_file(manifest.output_dir / "kpi.json", kpi_json(out.kpis));
    write_file(manifest.output_dir / "summary.txt", summary_text(scenario, manifest, out.trace, out.kpis));
  } else {
    write_file(manifest.output_dir / "kpi.json", "{}\n");
    write_file(manifest.output_dir / "summary.txt", "aborted before the first step: " + out.trace.diagnosis + "\n");
  }
  return out;
}

std::string verification_text(const VerificationReport & r)
{
  std::ostringstream s;
  s << std::setprecision(6);
  auto line = [&](const char * name, const SuiteSummary & suite, const char * worst_label) {
    s << name << "  draws " << suite.draws << "  violations " << suite.violations << "  " << worst_label << ' '
      << suite.worst << '\n';
  };
  s << "scenario " << r.scenario << '\n';
  line("cost identity           ", r.lemma1, "max rel error");
  line("tracking + offset bound ", r.lemma2, "min margin");
  line("terminal stage bound    ", r.stage_bound_proof, "min margin");
  line("  with (N^2-1)/N^2 [info]", r.stage_bound_statement, "min margin");
  if (r.corollary) {
    const auto & c = *r.corollary;
    s << "common-target equivalence  fair " << fmt(c.fair_objective) << "  mpc " << fmt(c.mpc_objective)
      << "  rel diff " << c.relative_difference << (c.agrees ? "  ok" : "  MISMATCH") << '\n';
  } else {
    s << "common-target equivalence  skipped (equilibrium inputs differ from U/(mN))\n";
  }
  s << (r.passed() ? "PASS" : "FAIL") << '\n';
  return s.str();
}

}  // namespace fairmpc
