#include "neurocnn/serialize.hpp"

#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace neurocnn {

using json = nlohmann::json;

namespace {

json big_json(const BigInt& v) {
  if (v >= 0 && v <= std::numeric_limits<std::uint64_t>::max()) return json(v.convert_to<std::uint64_t>());
  return json(v.str());
}

json arch_json(const Architecture& arch) {
  return json{{"spec", format_architecture(arch)}, {"d", arch.d}, {"k", arch.k}, {"s", arch.s}, {"r", arch.r}};
}

json weights_json(const WeightTuple<double>& w) {
  json out = json::array();
  for (const auto& f : w.filters) out.push_back(f);
  return out;
}

std::string rational_string(const Rational& q) {
  std::string out = boost::multiprecision::numerator(q).str();
  if (boost::multiprecision::denominator(q) != 1) out += "/" + boost::multiprecision::denominator(q).str();
  return out;
}

template <class T, class Coef>
std::string poly_json(const HomoPoly<T>& p, Coef&& coef) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back(json{{"e", e}, {"c", coef(c)}});
  return json{{"nvars", p.nvars()}, {"degree", p.degree()}, {"terms", std::move(terms)}}.dump();
}

std::vector<double> double_array(const json& v, const char* key, std::size_t line) {
  if (!v.contains(key) || !v[key].is_array()) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": missing array '" + key + "'");
  }
  std::vector<double> out;
  for (const auto& x : v[key]) {
    if (!x.is_number()) throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": non-numeric entry");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

std::string big_to_string(const BigInt& v) { return v.str(); }

std::string to_json(const HomoPoly<double>& p) {
  return poly_json(p, [](double c) { return json(c); });
}

std::string to_json(const HomoPoly<Rational>& p) {
  return poly_json(p, [](const Rational& c) { return json(rational_string(c)); });
}

HomoPoly<double> poly_from_json(const std::string& text) {
  try {
    const json v = json::parse(text);
    HomoPoly<double> p(v.at("nvars").get<int>(), v.at("degree").get<int>());
    for (const auto& t : v.at("terms")) p.add_term(t.at("e").get<Exponent>(), t.at("c").get<double>());
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("polynomial JSON: ") + e.what());
  }
}

std::string to_json(const Architecture& arch) { return arch_json(arch).dump(); }

std::string to_json(const WeightTuple<double>& w) { return weights_json(w).dump(); }

std::string to_json(const InvariantReport& report) {
  return json{{"dim", report.dim},
              {"degree", big_json(report.degree)},
              {"ged", big_json(report.ged)},
              {"m", report.m},
              {"p", report.p}}
      .dump();
}

std::string to_json(const CensusReport& report) {
  json points = json::array();
  for (const auto& p : report.points) {
    points.push_back(json{{"weights", weights_json(p.weights)},
                          {"phi", p.coords},
                          {"loss", p.loss},
                          {"grad_norm", p.grad_norm},
                          {"multiplicity", p.multiplicity},
                          {"class", to_string(p.kind)},
                          {"inertia", {p.positive, p.negative, p.degenerate}},
                          {"smoothness", to_string(p.smoothness)},
                          {"criticality_residual", p.criticality_residual},
                          {"accepted", p.accepted}});
  }
  const auto& o = report.options;
  return json{{"arch", arch_json(report.arch)},
              {"ged", big_json(report.ged)},
              {"seed", o.seed},
              {"starts", o.n_starts},
              {"tolerances",
               {{"grad", o.grad_tol}, {"dedup", o.dedup_tol}, {"criticality", o.criticality_tol},
                {"zero", o.zero_tol}, {"degeneracy", o.degeneracy_threshold}}},
              {"max_iter", o.max_iter},
              {"convergence",
               {{"converged", report.raw_converged}, {"failed", report.raw_failed},
                {"failed_near_cone_vertex", report.failed_near_cone_vertex},
                {"mean_iterations", report.mean_iterations}}},
              {"counts",
               {{"smooth", report.smooth_count}, {"min", report.minima}, {"saddle", report.saddles},
                {"max", report.maxima}, {"singular", report.singular}, {"nodal", report.nodal},
                {"rejected", report.rejected}}},
              {"bound_ok", report.bound_ok},
              {"warnings", report.warnings},
              {"points", std::move(points)}}
      .dump(2);
}

void write_jsonl(std::ostream& out, const Dataset& data) {
  for (std::size_t i = 0; i < data.size(); ++i) out << json{{"x", data.x[i]}, {"y", data.y[i]}}.dump() << '\n';
}

Dataset read_jsonl(std::istream& in) {
  Dataset data;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json v;
    try {
      v = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(number) + ": " + e.what());
    }
    data.x.push_back(double_array(v, "x", number));
    data.y.push_back(double_array(v, "y", number));
  }
  return data;
}

}  // namespace neurocnn
