#pragma once

// JSON network documents:
//
//   {"variables": [{"name": "a", "outcomes": ["A", "notA"]}, ...],
//    "nodes": [{"var": "a", "parents": [], "cpt": [[0.5, 0.5]]},
//              {"var": "c", "parents": ["a", "b"],
//               "noisy_or": {"strengths": [0.8, 0.6], "leak": 0.01}}, ...]}

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qpn/model.hpp"

namespace qpn {

namespace detail {

using nlohmann::json;

inline const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + " is missing key '" + key + "'");
  return *it;
}

inline std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ValidationError(where + " must be a string");
  return j.get<std::string>();
}

inline double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + " must be a number");
  return j.get<double>();
}

inline const json& as_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + " must be an array");
  return j;
}

}  // namespace detail

inline Network parse_network(std::string_view document) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what(), e.byte);
  }

  std::vector<Variable> variables;
  const json& vars = detail::as_array(detail::member(doc, "variables", "document"), "'variables'");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string where = "variables[" + std::to_string(i) + "]";
    Variable var;
    var.name = detail::as_string(detail::member(vars[i], "name", where), where + ".name");
    const json& outs = detail::as_array(detail::member(vars[i], "outcomes", where), where + ".outcomes");
    for (std::size_t k = 0; k < outs.size(); ++k)
      var.outcomes.push_back(
          detail::as_string(outs[k], where + ".outcomes[" + std::to_string(k) + "]"));
    variables.push_back(std::move(var));
  }

  std::vector<NodeDecl> decls;
  const json& nodes = detail::as_array(detail::member(doc, "nodes", "document"), "'nodes'");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string where = "nodes[" + std::to_string(i) + "]";
    NodeDecl decl;
    decl.var = detail::as_string(detail::member(nodes[i], "var", where), where + ".var");
    where += " ('" + decl.var + "')";
    const json& parents = detail::as_array(detail::member(nodes[i], "parents", where), where + ".parents");
    for (const auto& p : parents) decl.parents.push_back(detail::as_string(p, where + ".parents[]"));

    const bool has_cpt = nodes[i].contains("cpt");
    const bool has_nor = nodes[i].contains("noisy_or");
    if (has_cpt == has_nor)
      throw ValidationError(where + " needs exactly one of 'cpt' or 'noisy_or'");
    if (has_cpt) {
      std::vector<std::vector<double>> rows;
      const json& cpt = detail::as_array(nodes[i]["cpt"], where + ".cpt");
      for (std::size_t r = 0; r < cpt.size(); ++r) {
        const std::string rw = where + ".cpt[" + std::to_string(r) + "]";
        std::vector<double> row;
        for (const auto& p : detail::as_array(cpt[r], rw)) row.push_back(detail::as_number(p, rw));
        rows.push_back(std::move(row));
      }
      decl.body = std::move(rows);
    } else {
      const json& nor = nodes[i]["noisy_or"];
      NoisyOrParams params;
      for (const auto& s : detail::as_array(detail::member(nor, "strengths", where + ".noisy_or"),
                                            where + ".noisy_or.strengths"))
        params.strengths.push_back(detail::as_number(s, where + ".noisy_or.strengths[]"));
      params.leak = nor.contains("leak") ? detail::as_number(nor["leak"], where + ".noisy_or.leak") : 0.0;
      decl.body = std::move(params);
    }
    decls.push_back(std::move(decl));
  }
  return Network::build(std::move(variables), decls);
}

inline std::string serialize_network(const Network& net) {
  using detail::json;
  json doc;
  doc["variables"] = json::array();
  for (const auto& v : net.variables())
    doc["variables"].push_back({{"name", v.name}, {"outcomes", v.outcomes}});
  doc["nodes"] = json::array();
  for (const auto& d : net.declarations()) {
    json node{{"var", d.var}, {"parents", d.parents}};
    if (const auto* params = std::get_if<NoisyOrParams>(&d.body))
      node["noisy_or"] = {{"strengths", params->strengths}, {"leak", params->leak}};
    else
      node["cpt"] = std::get<std::vector<std::vector<double>>>(d.body);
    doc["nodes"].push_back(std::move(node));
  }
  return doc.dump(2) + "\n";
}

inline Network load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open network file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

}  // namespace qpn
