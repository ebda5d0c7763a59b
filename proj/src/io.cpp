#include "crowdmarket/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "crowdmarket/error.hpp"

namespace crowdmarket::io {
namespace {

std::string path_join(std::string_view context, std::string_view key) {
  if (context.empty()) return std::string(key);
  return std::string(context) + "." + std::string(key);
}

const Json& require(const Json& obj, std::string_view key, std::string_view context) {
  if (!obj.is_object()) {
    throw ParseError("'" + (context.empty() ? std::string("<root>") : std::string(context)) +
                     "' must be an object");
  }
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) throw ParseError("missing key '" + path_join(context, key) + "'");
  return *it;
}

double as_number(const Json& value, const std::string& where) {
  if (!value.is_number()) throw ParseError("'" + where + "' must be a number");
  return value.get<double>();
}

double number_at(const Json& obj, std::string_view key, std::string_view context) {
  return as_number(require(obj, key, context), path_join(context, key));
}

double number_or(const Json& obj, std::string_view key, double fallback,
                 std::string_view context) {
  if (!obj.contains(std::string(key))) return fallback;
  return number_at(obj, key, context);
}

Eigen::VectorXd vector_at(const Json& value, const std::string& where) {
  if (!value.is_array()) throw ParseError("'" + where + "' must be an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) =
        as_number(value[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

Json parse_override_value(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error&) {
    return Json(text);
  }
}

bool is_index(std::string_view segment) {
  return !segment.empty() &&
         std::all_of(segment.begin(), segment.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Json vector_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

}  // namespace

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // e.byte is 1-based and points at the offending character.
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream os;
    os << source << ":" << line << ":" << column << ": malformed JSON: " << e.what();
    throw ParseError(os.str());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ParseError("failed writing '" + path + "'");
}

void apply_overrides(Json& doc, std::span<const std::string> overrides) {
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ParseError("override '" + item + "' must look like key=value");
    }
    const std::string key = item.substr(0, eq);
    Json* node = &doc;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string segment =
          key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (segment.empty()) throw ParseError("override key '" + key + "' has an empty segment");
      if (node->is_array() && is_index(segment)) {
        const auto idx = static_cast<std::size_t>(std::stoull(segment));
        if (idx >= node->size()) {
          throw ParseError("override key '" + key + "': index " + segment + " out of range");
        }
        node = &(*node)[idx];
      } else {
        if (!node->is_object() && !node->is_null()) {
          throw ParseError("override key '" + key + "': '" + segment +
                           "' does not address an object");
        }
        node = &(*node)[segment];
      }
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    *node = parse_override_value(item.substr(eq + 1));
  }
}

MarketInstance instance_from_json(const Json& doc) {
  const Json& profiles = require(doc, "profiles", "");
  if (!profiles.is_array() || profiles.empty()) {
    throw ParseError("'profiles' must be a non-empty array of {a, b}");
  }
  std::vector<MuProfile> mus;
  mus.reserve(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const std::string ctx = "profiles[" + std::to_string(i) + "]";
    mus.push_back(MuProfile{number_at(profiles[i], "a", ctx), number_at(profiles[i], "b", ctx)});
  }

  const auto n = static_cast<Eigen::Index>(mus.size());
  SocialGraph::Matrix g = SocialGraph::Matrix::Zero(n, n);
  if (doc.contains("graph")) {
    const Json& rows = doc["graph"];
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
      throw InvariantError("'graph' must have " + std::to_string(n) + " rows to match profiles");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const Json& row = rows[static_cast<std::size_t>(i)];
      const std::string ctx = "graph[" + std::to_string(i) + "]";
      if (!row.is_array()) throw ParseError("'" + ctx + "' must be an array of numbers");
      if (static_cast<Eigen::Index>(row.size()) != n) {
        throw ParseError("'" + ctx + "' has " + std::to_string(row.size()) +
                         " entries, expected " + std::to_string(n));
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        g(i, j) = as_number(row[static_cast<std::size_t>(j)],
                            ctx + "[" + std::to_string(j) + "]");
      }
    }
  }

  const Json& p = require(doc, "params", "");
  MarketParams params{number_at(p, "c", "params"), number_at(p, "mu", "params"),
                      number_at(p, "s", "params"), number_at(p, "t", "params")};
  return MarketInstance(std::move(mus), SocialGraph(std::move(g)), params);
}

Json to_json(const MarketInstance& inst) {
  Json doc;
  Json profiles = Json::array();
  for (const MuProfile& p : inst.profiles()) profiles.push_back({{"a", p.a}, {"b", p.b}});
  doc["profiles"] = std::move(profiles);
  Json graph = Json::array();
  for (std::size_t i = 0; i < inst.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < inst.size(); ++j) row.push_back(inst.graph()(i, j));
    graph.push_back(std::move(row));
  }
  doc["graph"] = std::move(graph);
  const MarketParams& p = inst.params();
  doc["params"] = {{"c", p.c}, {"mu", p.mu}, {"s", p.s}, {"t", p.t}};
  return doc;
}

std::optional<ExpectationProfile> expectation_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("expectation")) return std::nullopt;
  const Json& e = doc["expectation"];
  ExpectationProfile exp{number_at(e, "e_a", "expectation"), number_at(e, "e_b", "expectation")};
  exp.validate();
  return exp;
}

RewardVector reward_from_json(const Json& doc) {
  return RewardVector(vector_at(require(doc, "r", ""), "r"));
}

Json to_json(const RewardVector& r) { return Json{{"r", vector_json(r.values())}}; }

ScenarioConfig scenario_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError("scenario document must be an object");
  ScenarioConfig cfg;
  if (doc.contains("n")) {
    const Json& n = doc["n"];
    if (!n.is_number_integer() || n.get<long long>() < 1) {
      throw ParseError("'n' must be a positive integer");
    }
    cfg.n = n.get<std::size_t>();
  }
  cfg.mu_a = number_or(doc, "mu_a", cfg.mu_a, "");
  cfg.sigma2_a = number_or(doc, "sigma2_a", cfg.sigma2_a, "");
  cfg.mu_b = number_or(doc, "mu_b", cfg.mu_b, "");
  cfg.sigma2_b = number_or(doc, "sigma2_b", cfg.sigma2_b, "");
  cfg.mu_g = number_or(doc, "mu_g", cfg.mu_g, "");
  cfg.sigma2_g = number_or(doc, "sigma2_g", cfg.sigma2_g, "");
  cfg.b_floor = number_or(doc, "b_floor", cfg.b_floor, "");
  if (doc.contains("seed")) {
    const Json& s = doc["seed"];
    if (!s.is_number_integer()) throw ParseError("'seed' must be an integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("enforce_assumption1")) {
    const Json& e = doc["enforce_assumption1"];
    if (!e.is_boolean()) throw ParseError("'enforce_assumption1' must be a boolean");
    cfg.enforce_assumption1 = e.get<bool>();
  }
  if (doc.contains("params")) {
    const Json& p = doc["params"];
    cfg.params.c = number_or(p, "c", cfg.params.c, "params");
    cfg.params.mu = number_or(p, "mu", cfg.params.mu, "params");
    cfg.params.s = number_or(p, "s", cfg.params.s, "params");
    cfg.params.t = number_or(p, "t", cfg.params.t, "params");
  }
  cfg.validate();
  return cfg;
}

Json to_json(const ScenarioConfig& cfg) {
  Json doc;
  doc["n"] = cfg.n;
  doc["mu_a"] = cfg.mu_a;
  doc["sigma2_a"] = cfg.sigma2_a;
  doc["mu_b"] = cfg.mu_b;
  doc["sigma2_b"] = cfg.sigma2_b;
  doc["mu_g"] = cfg.mu_g;
  doc["sigma2_g"] = cfg.sigma2_g;
  doc["params"] = {{"c", cfg.params.c}, {"mu", cfg.params.mu}, {"s", cfg.params.s},
                   {"t", cfg.params.t}};
  doc["seed"] = cfg.seed;
  doc["b_floor"] = cfg.b_floor;
  doc["enforce_assumption1"] = cfg.enforce_assumption1;
  return doc;
}

Json to_json(const EquilibriumResult& eq) {
  Json doc;
  doc["x"] = vector_json(eq.x.values());
  doc["method"] = std::string(to_string(eq.method));
  doc["iterations"] = eq.iterations;
  doc["interior"] = eq.interior;
  doc["converged"] = eq.converged;
  doc["residual"] = eq.residual;
  doc["assumption1_holds"] = eq.assumption1_holds;
  doc["warnings"] = eq.warnings;
  return doc;
}

Json to_json(const RewardSolution& sol) {
  Json doc;
  doc["regime"] = std::string(to_string(sol.regime));
  doc["r"] = vector_json(sol.r.values());
  doc["equilibrium"] = to_json(sol.equilibrium);
  doc["revenue"] = sol.revenue;
  doc["mu_utilities"] = vector_json(sol.mu_utilities);
  doc["warnings"] = sol.warnings;
  doc["model"] = {{"x", vector_json(sol.model_x.values())},
                  {"interior", sol.model_interior},
                  {"revenue", sol.model_revenue},
                  {"mu_utilities", vector_json(sol.model_mu_utilities)}};
  return doc;
}

}  // namespace crowdmarket::io
