#include "polyopt/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace polyopt {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("instance: " + msg);
}

double parse_number(const json& j, const std::string& what) {
  if (!j.is_number()) fail(what + " must be a number");
  return j.get<double>();
}

Polynomial parse_terms(const json& j, int n, const std::string& what) {
  if (!j.is_array()) fail(what + " must be an array of terms");
  Polynomial p(n);
  for (const auto& term : j) {
    if (!term.is_object() || !term.contains("coef") || !term.contains("expo"))
      fail(what + " terms need \"coef\" and \"expo\"");
    const double coef = parse_number(term["coef"], what + " coef");
    if (!std::isfinite(coef)) fail(what + " coef must be finite");
    const auto& expo = term["expo"];
    if (!expo.is_array() || static_cast<int>(expo.size()) != n)
      fail(what + " expo must be an array of length n");
    std::vector<int> e;
    e.reserve(expo.size());
    for (const auto& v : expo) {
      if (!v.is_number_integer()) fail(what + " exponents must be integers");
      const int ev = v.get<int>();
      if (ev < 0) fail(what + " exponents must be non-negative");
      e.push_back(ev);
    }
    p.add_term(Monomial(std::move(e)), coef);
  }
  return p;
}

PopInstance from_document(const json& doc) {
  if (!doc.is_object()) fail("document must be a JSON object");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) fail("\"n\" must be an integer");
  const int n = doc["n"].get<int>();
  if (n < 1) fail("\"n\" must be at least 1");

  PopInstance inst;
  inst.n = n;

  if (!doc.contains("objective")) fail("missing \"objective\"");
  if (!doc["objective"].is_array() || doc["objective"].empty())
    fail("\"objective\" must be a non-empty term array");
  inst.objective = parse_terms(doc["objective"], n, "objective");

  if (doc.contains("constraints")) {
    if (!doc["constraints"].is_array()) fail("\"constraints\" must be an array");
    for (const auto& c : doc["constraints"]) {
      if (!c.is_object() || !c.contains("terms")) fail("constraints need a \"terms\" array");
      Constraint constraint;
      constraint.poly = parse_terms(c["terms"], n, "constraint");
      if (c.contains("name")) {
        if (!c["name"].is_string()) fail("constraint \"name\" must be a string");
        constraint.name = c["name"].get<std::string>();
      }
      inst.constraints.push_back(std::move(constraint));
    }
  }

  if (doc.contains("box")) {
    const auto& box = doc["box"];
    if (!box.is_array() || static_cast<int>(box.size()) != n)
      fail("\"box\" must be an array of n intervals");
    std::vector<std::array<double, 2>> bounds;
    for (const auto& interval : box) {
      if (!interval.is_array() || interval.size() != 2) fail("box intervals are [lo, hi]");
      const double lo = parse_number(interval[0], "box bound");
      const double hi = parse_number(interval[1], "box bound");
      if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
        fail("box intervals need finite lo <= hi");
      bounds.push_back({lo, hi});
    }
    inst.box = std::move(bounds);
  }
  return inst;
}

ordered_json terms_to_json(const Polynomial& p) {
  ordered_json arr = ordered_json::array();
  for (const auto& [mon, coef] : p.terms()) {
    ordered_json term;
    term["coef"] = coef;
    term["expo"] = mon.exponents();
    arr.push_back(std::move(term));
  }
  return arr;
}

}  // namespace

PopInstance parse_instance(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  return from_document(doc);
}

PopInstance parse_instance_text(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

PopInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  return parse_instance(in);
}

std::string serialize_instance(const PopInstance& inst, int indent) {
  ordered_json doc;
  doc["n"] = inst.n;
  doc["objective"] = terms_to_json(inst.objective);
  ordered_json constraints = ordered_json::array();
  for (const auto& c : inst.constraints) {
    ordered_json entry;
    if (!c.name.empty()) entry["name"] = c.name;
    entry["terms"] = terms_to_json(c.poly);
    constraints.push_back(std::move(entry));
  }
  doc["constraints"] = std::move(constraints);
  if (inst.box) {
    ordered_json box = ordered_json::array();
    for (const auto& b : *inst.box) box.push_back({b[0], b[1]});
    doc["box"] = std::move(box);
  }
  return doc.dump(indent);
}

}  // namespace polyopt
