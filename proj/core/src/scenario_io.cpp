#include "fairmpc/scenario_io.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"

namespace fairmpc {

namespace {

using Json = nlohmann::json;

std::string at(const std::string & path, const std::string & key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string & path, std::size_t index) { return path + "[" + std::to_string(index) + "]"; }

const Json & require(const Json & obj, const std::string & path, const std::string & key)
{
  if (!obj.is_object()) { throw ScenarioError(path, "expected an object"); }
  const auto it = obj.find(key);
  if (it == obj.end()) { throw ScenarioError(at(path, key), "missing required field"); }
  return *it;
}

double read_number(const Json & j, const std::string & path)
{
  if (!j.is_number()) { throw ScenarioError(path, "expected a number"); }
  return j.get<double>();
}

int read_int(const Json & j, const std::string & path)
{
  if (!j.is_number_integer()) { throw ScenarioError(path, "expected an integer"); }
  return j.get<int>();
}

Vector read_vector(const Json & j, const std::string & path)
{
  if (!j.is_array()) { throw ScenarioError(path, "expected an array of numbers"); }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) { v(static_cast<Eigen::Index>(k)) = read_number(j[k], at(path, k)); }
  return v;
}

Matrix read_matrix(const Json & j, const std::string & path, std::optional<Eigen::Index> cols_if_empty = std::nullopt)
{
  if (!j.is_array()) { throw ScenarioError(path, "expected a row-major array of rows"); }
  if (j.empty()) { return Matrix::Zero(0, cols_if_empty.value_or(0)); }
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) { throw ScenarioError(at(path, 0), "expected a row array"); }
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = read_vector(j[static_cast<std::size_t>(r)], at(path, static_cast<std::size_t>(r)));
    if (row.size() != cols) { throw ScenarioError(at(path, static_cast<std::size_t>(r)), "ragged matrix row"); }
    m.row(r) = row.transpose();
  }
  return m;
}

PolytopeSet read_set(const Json & j, const std::string & path, int dim)
{
  PolytopeSet s;
  s.h_matrix = read_matrix(require(j, path, "H"), at(path, "H"), dim);
  s.h_vector = read_vector(require(j, path, "h"), at(path, "h"));
  if (s.h_matrix.rows() > 0 && s.h_matrix.cols() != dim) {
    throw ScenarioError(at(path, "H"), "expected " + std::to_string(dim) + " columns");
  }
  if (s.h_vector.size() != s.h_matrix.rows()) { throw ScenarioError(at(path, "h"), "length must match the rows of H"); }
  return s;
}

Json write_vector(const Vector & v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Json write_matrix(const Matrix & m)
{
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) { rows.push_back(write_vector(m.row(r).transpose())); }
  return rows;
}

Json write_set(const PolytopeSet & s)
{
  return Json{{"H", write_matrix(s.h_matrix)}, {"h", write_vector(s.h_vector)}};
}

}  // namespace

const char * to_string(BudgetMode mode)
{
  switch (mode) {
    case BudgetMode::ConstantPerStep: return "ConstantPerStep";
    case BudgetMode::Depleting: return "Depleting";
    case BudgetMode::DepletingInHorizon: return "DepletingInHorizon";
  }
  return "unknown";
}

BudgetMode parse_budget_mode(const std::string & text)
{
  if (text == "ConstantPerStep") { return BudgetMode::ConstantPerStep; }
  if (text == "Depleting") { return BudgetMode::Depleting; }
  if (text == "DepletingInHorizon") { return BudgetMode::DepletingInHorizon; }
  throw ScenarioError("budget.mode", "unknown mode '" + text + "'");
}

Scenario parse_scenario_json(const std::string & text)
{
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error & e) {
    throw ScenarioError("", std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) { throw ScenarioError("", "top level must be an object"); }

  Scenario sc;
  if (root.contains("name")) {
    if (!root["name"].is_string()) { throw ScenarioError("name", "expected a string"); }
    sc.name = root["name"].get<std::string>();
  }

  const Json & systems = require(root, "", "systems");
  if (!systems.is_array() || systems.empty()) { throw ScenarioError("systems", "expected a nonempty array"); }
  for (std::size_t i = 0; i < systems.size(); ++i) {
    const std::string path = at("systems", i);
    const Json & js = systems[i];
    LtiSystem sys;
    sys.a_matrix = read_matrix(require(js, path, "a"), at(path, "a"));
    sys.b_matrix = read_matrix(require(js, path, "b"), at(path, "b"));
    if (js.contains("label")) {
      if (!js["label"].is_string()) { throw ScenarioError(at(path, "label"), "expected a string"); }
      sys.label = js["label"].get<std::string>();
    }
    if (sys.a_matrix.rows() != sys.a_matrix.cols() || sys.a_matrix.rows() == 0) {
      throw ScenarioError(at(path, "a"), "expected a nonempty square matrix");
    }
    if (sys.b_matrix.rows() != sys.a_matrix.rows()) {
      throw ScenarioError(at(path, "b"), "row count must match a");
    }
    const int n = sys.state_dim();
    const int m = sys.input_dim();

    Vector x0 = read_vector(require(js, path, "x0"), at(path, "x0"));
    EquilibriumTarget target;
    target.x_s = read_vector(require(js, path, "xs"), at(path, "xs"));
    if (x0.size() != n) { throw ScenarioError(at(path, "x0"), "expected length " + std::to_string(n)); }
    if (target.x_s.size() != n) { throw ScenarioError(at(path, "xs"), "expected length " + std::to_string(n)); }
    if (js.contains("us")) {
      target.u_s = read_vector(js["us"], at(path, "us"));
      if (target.u_s.size() != m) { throw ScenarioError(at(path, "us"), "expected length " + std::to_string(m)); }
    } else {
      const auto eq = compute_equilibrium_input(sys, target.x_s);
      if (!eq.u_s) {
        throw ScenarioError(at(path, "xs"), "not an equilibrium (residual " + std::to_string(eq.residual) + ")");
      }
      target.u_s = *eq.u_s;
    }
    sc.input_sets.push_back(
      js.contains("input_set") ? read_set(js["input_set"], at(path, "input_set"), m) : PolytopeSet::unconstrained(m));
    sc.state_sets.push_back(
      js.contains("state_set") ? read_set(js["state_set"], at(path, "state_set"), n) : PolytopeSet::unconstrained(n));
    sc.systems.push_back(std::move(sys));
    sc.targets.push_back(std::move(target));
    sc.initial_states.push_back(std::move(x0));
  }

  const Json & budget = require(root, "", "budget");
  const Json & mode = require(budget, "budget", "mode");
  if (!mode.is_string()) { throw ScenarioError("budget.mode", "expected a string"); }
  sc.budget.mode = parse_budget_mode(mode.get<std::string>());
  sc.budget.u_bar_0 = read_number(require(budget, "budget", "u_bar"), "budget.u_bar");

  const Json & w = require(root, "", "weights");
  const Json & q = require(w, "weights", "q");
  if (!q.is_array()) { throw ScenarioError("weights.q", "expected an array of matrices"); }
  for (std::size_t i = 0; i < q.size(); ++i) { sc.weights.q_weights.push_back(read_matrix(q[i], at("weights.q", i))); }
  const Json & rho = require(w, "weights", "rho_bar");
  if (!rho.is_array()) { throw ScenarioError("weights.rho_bar", "expected an array"); }
  for (std::size_t i = 0; i < rho.size(); ++i) { sc.weights.rho_bar.push_back(read_number(rho[i], at("weights.rho_bar", i))); }
  const Json & wbar = require(w, "weights", "w_bar");
  if (!wbar.is_array()) { throw ScenarioError("weights.w_bar", "expected an array of matrices"); }
  for (std::size_t i = 0; i < wbar.size(); ++i) { sc.weights.w_bar.push_back(read_matrix(wbar[i], at("weights.w_bar", i))); }
  sc.weights.gamma_u = read_number(require(w, "weights", "gamma_u"), "weights.gamma_u");
  const Json & ge = require(w, "weights", "gamma_e");
  const int n = sc.state_dim();
  sc.weights.gamma_e = ge.is_number() ? Matrix(ge.get<double>() * Matrix::Identity(n, n))
                                      : read_matrix(ge, "weights.gamma_e");
  sc.weights.beta = read_number(require(w, "weights", "beta"), "weights.beta");
  sc.weights.lambda_x = read_number(require(w, "weights", "lambda_x"), "weights.lambda_x");
  sc.weights.lambda_u = read_number(require(w, "weights", "lambda_u"), "weights.lambda_u");

  sc.horizon_l = read_int(require(root, "", "horizon"), "horizon");
  sc.sim_steps_t = read_int(require(root, "", "sim_steps"), "sim_steps");
  if (root.contains("classes")) {
    const Json & cls = root["classes"];
    if (!cls.is_array()) { throw ScenarioError("classes", "expected an array of index arrays"); }
    std::vector<std::vector<int>> groups;
    for (std::size_t c = 0; c < cls.size(); ++c) {
      if (!cls[c].is_array()) { throw ScenarioError(at("classes", c), "expected an array of indices"); }
      std::vector<int> members;
      for (std::size_t k = 0; k < cls[c].size(); ++k) {
        members.push_back(read_int(cls[c][k], at(at("classes", c), k)));
      }
      groups.push_back(std::move(members));
    }
    sc.classes = std::move(groups);
  }
  return sc;
}

Scenario scenario_from_json(const std::string & text)
{
  auto sc = parse_scenario_json(text);
  const auto report = validate_scenario(sc);
  if (!report.ok()) {
    const auto & e = report.errors.front();
    throw ScenarioError(e.system ? at("systems", static_cast<std::size_t>(*e.system)) : "", e.message);
  }
  return sc;
}

std::string scenario_to_json(const Scenario & sc, int indent)
{
  Json root;
  if (!sc.name.empty()) { root["name"] = sc.name; }
  Json systems = Json::array();
  for (int i = 0; i < sc.num_systems(); ++i) {
    Json js;
    js["a"] = write_matrix(sc.systems[i].a_matrix);
    js["b"] = write_matrix(sc.systems[i].b_matrix);
    if (!sc.systems[i].label.empty()) { js["label"] = sc.systems[i].label; }
    js["x0"] = write_vector(sc.initial_states[i]);
    js["xs"] = write_vector(sc.targets[i].x_s);
    js["us"] = write_vector(sc.targets[i].u_s);
    if (!sc.input_sets[i].is_unconstrained()) { js["input_set"] = write_set(sc.input_sets[i]); }
    if (!sc.state_sets[i].is_unconstrained()) { js["state_set"] = write_set(sc.state_sets[i]); }
    systems.push_back(std::move(js));
  }
  root["systems"] = std::move(systems);
  root["budget"] = {{"mode", to_string(sc.budget.mode)}, {"u_bar", sc.budget.u_bar_0}};

  Json q = Json::array();
  for (const auto & m : sc.weights.q_weights) { q.push_back(write_matrix(m)); }
  Json wbar = Json::array();
  for (const auto & m : sc.weights.w_bar) { wbar.push_back(write_matrix(m)); }
  root["weights"] = {{"q", q}, {"rho_bar", sc.weights.rho_bar}, {"w_bar", wbar}, {"gamma_u", sc.weights.gamma_u},
    {"gamma_e", write_matrix(sc.weights.gamma_e)}, {"beta", sc.weights.beta}, {"lambda_x", sc.weights.lambda_x},
    {"lambda_u", sc.weights.lambda_u}};
  root["horizon"] = sc.horizon_l;
  root["sim_steps"] = sc.sim_steps_t;
  if (sc.classes) { root["classes"] = *sc.classes; }
  return root.dump(indent);
}

Scenario load_scenario_file(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) { throw ScenarioError("", "cannot open scenario file " + path.string()); }
  std::ostringstream text;
  text << in.rdbuf();
  return scenario_from_json(text.str());
}

void save_scenario_file(const Scenario & scenario, const std::filesystem::path & path)
{
  std::ofstream out(path);
  if (!out) { throw std::runtime_error("cannot write scenario file " + path.string()); }
  out << scenario_to_json(scenario) << '\n';
}

}  // namespace fairmpc
