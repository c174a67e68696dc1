#include "hlbvp/config.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace hlbvp {

namespace {

using nlohmann::json;

const std::set<std::string> kReservedNames = {
    "t",   "u",   "v",    "rho",  "pi",      "sin",     "cos",      "exp",
    "log", "sqrt", "abs", "min",  "max",     "pow",     "pospart",  "negpart",
    "piecewise"};

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  throw ConfigError(path, msg);
}

const json& child(const json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(path + "." + key, "missing key");
  return *it;
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

double number_field(const json& j, const std::string& path, const std::string& key) {
  return number_at(child(j, path, key), path + "." + key);
}

std::string string_field(const json& j, const std::string& path, const std::string& key) {
  const json& v = child(j, path, key);
  if (!v.is_string()) bad(path + "." + key, "expected a string");
  return v.get<std::string>();
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) bad(path, "expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) bad(path + "." + key, "unknown key");
}

expr::Expr parse_expr(const std::string& source, std::vector<std::string> vars,
                      const std::string& path) {
  try {
    return expr::Expr::parse(source, std::move(vars));
  } catch (const expr::ParseError& e) {
    bad(path, e.what());
  }
}

bool valid_identifier(const std::string& name) {
  if (name.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_') return false;
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace

ProblemSpec load_spec(const nlohmann::json& config) {
  if (!config.is_object()) bad("(root)", "config must be a JSON object");
  check_keys(config, "(root)",
             {"problem", "bounds", "functional", "ladder", "halfline", "params",
              "tolerances"});

  ProblemSpec spec;

  // params come first: their names extend every expression's variable set
  std::vector<std::string> param_names;
  if (config.contains("params")) {
    const json& params = config.at("params");
    if (!params.is_object()) bad("params", "expected an object of name -> number");
    for (const auto& [name, value] : params.items()) {
      if (!valid_identifier(name)) bad("params." + name, "not a valid identifier");
      if (kReservedNames.count(name)) bad("params." + name, "name is reserved");
      spec.params.emplace_back(name, number_at(value, "params." + name));
      param_names.push_back(name);
    }
    if (spec.params.size() > 16) bad("params", "at most 16 named parameters are supported");
  }

  auto vars_with_params = [&](std::initializer_list<const char*> principal) {
    std::vector<std::string> vars(principal.begin(), principal.end());
    vars.insert(vars.end(), param_names.begin(), param_names.end());
    return vars;
  };

  // problem block
  const json& problem = child(config, "(root)", "problem");
  check_keys(problem, "problem", {"p", "f", "alpha", "beta", "R", "a", "b"});
  spec.p = parse_expr(string_field(problem, "problem", "p"), vars_with_params({"t"}),
                      "problem.p");
  spec.f = parse_expr(string_field(problem, "problem", "f"), vars_with_params({"t", "u"}),
                      "problem.f");
  spec.alpha = number_field(problem, "problem", "alpha");
  spec.beta = number_field(problem, "problem", "beta");
  spec.R = number_field(problem, "problem", "R");
  spec.a = number_field(problem, "problem", "a");
  spec.b = number_field(problem, "problem", "b");

  // bounds block
  const json& bounds = child(config, "(root)", "bounds");
  check_keys(bounds, "bounds", {"b1", "b2", "F1", "F2"});
  spec.b1 = parse_expr(string_field(bounds, "bounds", "b1"), vars_with_params({"t"}),
                       "bounds.b1");
  spec.b2 = parse_expr(string_field(bounds, "bounds", "b2"), vars_with_params({"t"}),
                       "bounds.b2");
  spec.F1 = parse_expr(string_field(bounds, "bounds", "F1"), vars_with_params({"v"}),
                       "bounds.F1");
  spec.F2 = parse_expr(string_field(bounds, "bounds", "F2"), vars_with_params({"v"}),
                       "bounds.F2");

  // functional block
  if (config.contains("functional")) {
    const json& fn = config.at("functional");
    check_keys(fn, "functional",
               {"point_terms", "weight", "outer", "bound_mode", "manual_lower",
                "manual_upper"});
    if (fn.contains("point_terms")) {
      const json& terms = fn.at("point_terms");
      if (!terms.is_array()) bad("functional.point_terms", "expected an array");
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string path = "functional.point_terms[" + std::to_string(i) + "]";
        check_keys(terms[i], path, {"coefficient", "node"});
        FunctionalSpec::PointTerm pt;
        pt.coefficient = number_field(terms[i], path, "coefficient");
        pt.node = number_field(terms[i], path, "node");
        spec.functional.point_terms.push_back(pt);
      }
    }
    if (fn.contains("weight"))
      spec.functional.weight = parse_expr(string_field(fn, "functional", "weight"),
                                          vars_with_params({"t"}), "functional.weight");
    if (fn.contains("outer"))
      spec.functional.outer = parse_expr(string_field(fn, "functional", "outer"),
                                         vars_with_params({"v"}), "functional.outer");
    if (fn.contains("bound_mode")) {
      const std::string mode = string_field(fn, "functional", "bound_mode");
      if (mode == "auto") {
        spec.functional.bound_mode = FunctionalSpec::BoundMode::automatic;
      } else if (mode == "manual") {
        spec.functional.bound_mode = FunctionalSpec::BoundMode::manual;
      } else {
        bad("functional.bound_mode", "expected \"auto\" or \"manual\"");
      }
    }
    if (fn.contains("manual_lower"))
      spec.functional.manual_lower =
          parse_expr(string_field(fn, "functional", "manual_lower"),
                     vars_with_params({"rho"}), "functional.manual_lower");
    if (fn.contains("manual_upper"))
      spec.functional.manual_upper =
          parse_expr(string_field(fn, "functional", "manual_upper"),
                     vars_with_params({"rho"}), "functional.manual_upper");
    if (spec.functional.bound_mode == FunctionalSpec::BoundMode::manual) {
      if (!spec.functional.manual_lower)
        bad("functional.manual_lower", "required in manual bound mode");
      if (!spec.functional.manual_upper)
        bad("functional.manual_upper", "required in manual bound mode");
    }
  }

  // ladder block
  if (config.contains("ladder")) {
    const json& ladder = config.at("ladder");
    check_keys(ladder, "ladder", {"values", "targets"});
    const json& values = child(ladder, "ladder", "values");
    const json& targets = child(ladder, "ladder", "targets");
    if (!values.is_array()) bad("ladder.values", "expected an array of numbers");
    if (!targets.is_array()) bad("ladder.targets", "expected an array of strings");
    if (values.size() != targets.size())
      bad("ladder", "values and targets must have the same length");
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double rho = number_at(values[i], "ladder.values[" + std::to_string(i) + "]");
      if (!(rho > 0)) bad("ladder.values[" + std::to_string(i) + "]", "must be > 0");
      if (!spec.ladder_values.empty() && rho <= spec.ladder_values.back())
        bad("ladder.values", "must be strictly increasing");
      spec.ladder_values.push_back(rho);

      const std::string path = "ladder.targets[" + std::to_string(i) + "]";
      if (!targets[i].is_string()) bad(path, "expected \"index0\" or \"index1\"");
      const std::string target = targets[i].get<std::string>();
      IndexTarget it;
      if (target == "index0") {
        it = IndexTarget::index0;
      } else if (target == "index1") {
        it = IndexTarget::index1;
      } else {
        bad(path, "expected \"index0\" or \"index1\"");
      }
      if (!spec.ladder_targets.empty() && spec.ladder_targets.back() == it)
        bad("ladder.targets", "targets must alternate between index0 and index1");
      spec.ladder_targets.push_back(it);
    }
  }

  // halfline block
  if (config.contains("halfline")) {
    const json& hl = config.at("halfline");
    check_keys(hl, "halfline", {"d", "n", "k_factor", "T_trunc", "horizon", "M1", "M2"});
    if (hl.contains("d")) {
      spec.d_override = number_field(hl, "halfline", "d");
      if (!(*spec.d_override > 0)) bad("halfline.d", "must be > 0");
    }
    if (hl.contains("n")) spec.n_exponent = number_field(hl, "halfline", "n");
    if (hl.contains("k_factor")) {
      spec.k_factor = number_field(hl, "halfline", "k_factor");
      if (!(spec.k_factor > 1)) bad("halfline.k_factor", "must be > 1");
    }
    if (hl.contains("T_trunc")) spec.T_trunc = number_field(hl, "halfline", "T_trunc");
    if (hl.contains("horizon")) spec.horizon = number_field(hl, "halfline", "horizon");
    if (hl.contains("M1")) spec.M1_override = number_field(hl, "halfline", "M1");
    if (hl.contains("M2")) spec.M2_override = number_field(hl, "halfline", "M2");
  }

  // tolerances block
  if (config.contains("tolerances")) {
    const json& tj = config.at("tolerances");
    check_keys(tj, "tolerances",
               {"profile", "quad_abs", "quad_rel", "kernel_quad", "ivp", "certify_base",
                "grid_n", "solver_tol", "damping", "max_picard", "max_newton", "glue",
                "screen_pts", "ff2_kmax", "screen_tol", "t_trunc_factor", "horizon_factor",
                "extremum_coarse", "extremum_refine"});
    if (tj.contains("profile")) {
      try {
        spec.tol = Tolerances::profile(string_field(tj, "tolerances", "profile"));
      } catch (const std::invalid_argument& e) {
        bad("tolerances.profile", e.what());
      }
    }
    auto num = [&](const char* key, double& slot) {
      if (tj.contains(key)) slot = number_field(tj, "tolerances", key);
    };
    auto integer = [&](const char* key, int& slot) {
      if (tj.contains(key)) slot = static_cast<int>(number_field(tj, "tolerances", key));
    };
    num("quad_abs", spec.tol.quad_abs);
    num("quad_rel", spec.tol.quad_rel);
    num("kernel_quad", spec.tol.kernel_quad);
    num("ivp", spec.tol.ivp);
    num("certify_base", spec.tol.certify_base);
    integer("grid_n", spec.tol.grid_n);
    num("solver_tol", spec.tol.solver_tol);
    num("damping", spec.tol.damping);
    integer("max_picard", spec.tol.max_picard);
    integer("max_newton", spec.tol.max_newton);
    num("glue", spec.tol.glue);
    integer("screen_pts", spec.tol.screen_pts);
    integer("ff2_kmax", spec.tol.ff2_kmax);
    num("screen_tol", spec.tol.screen_tol);
    num("t_trunc_factor", spec.tol.t_trunc_factor);
    num("horizon_factor", spec.tol.horizon_factor);
    integer("extremum_coarse", spec.tol.extremum_coarse);
    integer("extremum_refine", spec.tol.extremum_refine);
  }

  return spec;
}

nlohmann::json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open config file " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("(file)", std::string("JSON parse error: ") + e.what());
  }
}

ProblemSpec load_spec_file(const std::filesystem::path& path) {
  return load_spec(read_config_file(path));
}

std::string config_hash(const std::string& raw) {
  // FNV-1a, 64 bit
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : raw) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace hlbvp
