#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "levelsp/audits.hpp"
#include "levelsp/voting.hpp"

namespace levelsp::io {

using json = nlohmann::ordered_json;

/// Tool version stamped into every report.
inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Scalar values in JSON
//
// Exact mode renders values as fraction strings ("1/2") so reports are
// byte-stable; float mode writes plain numbers. Parsing accepts numbers,
// decimal strings and fraction strings in either mode. A JSON decimal
// literal entering exact mode becomes the exact value of its (shortest)
// decimal text, so "0.3" means 3/10.

template <class T>
json value_to_json(const T& v) {
  if constexpr (arith<T>::exact) {
    return json(v.str());
  } else {
    return json(v);
  }
}

template <class T>
T value_from_json(const json& j, const std::string& where) {
  try {
    if (j.is_string()) return arith<T>::parse(j.get<std::string>());
    if (j.is_number_integer()) {
      if constexpr (arith<T>::exact)
        return T(j.get<long long>());
      else
        return static_cast<double>(j.get<long long>());
    }
    if (j.is_number_float()) {
      if constexpr (arith<T>::exact)
        return Rational::from_double(j.get<double>());
      else
        return j.get<double>();
    }
  } catch (const Error& e) {
    throw ParseError(where + ": " + e.what());
  }
  throw ParseError(where + ": expected a number or a fraction string");
}

template <class T>
json values_to_json(const std::vector<T>& vs) {
  json arr = json::array();
  for (const T& v : vs) arr.push_back(value_to_json(v));
  return arr;
}

template <class T>
std::vector<T> values_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  std::vector<T> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(value_from_json<T>(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << text;
}

// ---------------------------------------------------------------------------
// Ballot files
//
// {
//   "scale": ["terrible", "average", "great"],        // ascending
//   "voters": [{"id": "v1", "weight": 1}, ...],
//   "candidates": ["A", "B"],
//   "ballots": {"v1": {"A": [0.9, 0, 0.1], ...}, ...} // one mass row each
// }

template <class T>
Election<T> election_from_json(const json& doc, const std::string& file) {
  if (!doc.is_object()) throw ParseError(file + ": ballot file must be an object");
  if (!doc.contains("scale") || !doc["scale"].is_array())
    throw ParseError(file + ": missing 'scale' array");
  std::vector<std::string> labels;
  for (const auto& l : doc["scale"]) {
    if (!l.is_string()) throw ParseError(file + ": scale labels must be strings");
    labels.push_back(l.get<std::string>());
  }
  ScalePtr scale;
  try {
    scale = std::make_shared<OutcomeScale>(labels);
  } catch (const Error& e) {
    throw ParseError(file + ": scale: " + e.what());
  }

  if (!doc.contains("voters") || !doc["voters"].is_array() ||
      doc["voters"].empty())
    throw ParseError(file + ": missing non-empty 'voters' array");
  std::vector<std::string> voter_ids;
  std::vector<T> weights;
  for (const auto& v : doc["voters"]) {
    if (!v.is_object() || !v.contains("id"))
      throw ParseError(file + ": voters entries need an 'id'");
    voter_ids.push_back(v["id"].get<std::string>());
    weights.push_back(v.contains("weight")
                          ? value_from_json<T>(v["weight"], file + ": voters." +
                                                                voter_ids.back() +
                                                                ".weight")
                          : T(1));
  }

  if (!doc.contains("candidates") || !doc["candidates"].is_array() ||
      doc["candidates"].empty())
    throw ParseError(file + ": missing non-empty 'candidates' array");
  std::vector<std::string> candidates;
  for (const auto& c : doc["candidates"])
    candidates.push_back(c.get<std::string>());

  if (!doc.contains("ballots") || !doc["ballots"].is_object())
    throw ParseError(file + ": missing 'ballots' object");
  std::vector<std::vector<Pmf<T>>> ballots;
  for (const auto& id : voter_ids) {
    if (!doc["ballots"].contains(id))
      throw ParseError(file + ": ballots: no row for voter '" + id + "'");
    const json& row = doc["ballots"][id];
    std::vector<Pmf<T>> prow;
    for (const auto& cand : candidates) {
      if (!row.contains(cand))
        throw ParseError(file + ": ballots." + id + ": no entry for candidate '" +
                         cand + "'");
      const std::string where = file + ": ballots." + id + "." + cand;
      std::vector<T> mass = values_from_json<T>(row[cand], where);
      try {
        prow.emplace_back(scale, std::move(mass));
      } catch (const Error& e) {
        throw ParseError(where + ": " + e.what());
      }
    }
    ballots.push_back(std::move(prow));
  }

  try {
    return Election<T>(scale, candidates, voter_ids, std::move(weights),
                       std::move(ballots));
  } catch (const Error& e) {
    throw ParseError(file + ": " + e.what());
  }
}

template <class T>
json election_to_json(const Election<T>& e) {
  json doc;
  doc["scale"] = e.scale().labels();
  doc["voters"] = json::array();
  for (int v = 0; v < e.voters(); ++v) {
    doc["voters"].push_back(
        {{"id", e.voter_ids()[v]}, {"weight", value_to_json(e.weights()[v])}});
  }
  doc["candidates"] = e.candidates();
  json ballots = json::object();
  for (int v = 0; v < e.voters(); ++v) {
    json row = json::object();
    for (size_t c = 0; c < e.candidates().size(); ++c)
      row[e.candidates()[c]] = values_to_json(e.ballot(v, c).mass());
    ballots[e.voter_ids()[v]] = std::move(row);
  }
  doc["ballots"] = std::move(ballots);
  return doc;
}

// ---------------------------------------------------------------------------
// Phantom systems
//
// {"kind": "anonymous", "functions": [[..f0 per grade..], ..., [..fn..]]}
// {"kind": "general", "voters": 2,
//  "functions": [{"subset": [], "values": [...]},
//                {"subset": [0], "values": [...]}, ...]}   // all 2^n subsets

template <class T>
PhantomSystem<T> phantom_system_from_json(const json& doc,
                                          const std::string& file) {
  if (!doc.is_object() || !doc.contains("kind"))
    throw ParseError(file + ": phantom system needs a 'kind'");
  const std::string kind = doc["kind"].get<std::string>();
  if (!doc.contains("functions") || !doc["functions"].is_array())
    throw ParseError(file + ": phantom system needs a 'functions' array");
  if (kind == "anonymous") {
    std::vector<std::vector<T>> fns;
    for (size_t k = 0; k < doc["functions"].size(); ++k)
      fns.push_back(values_from_json<T>(
          doc["functions"][k], file + ": functions[" + std::to_string(k) + "]"));
    try {
      return PhantomSystem<T>(AnonymousPhantoms<T>(std::move(fns)));
    } catch (const Error& e) {
      throw ParseError(file + ": " + e.what());
    }
  }
  if (kind == "general") {
    if (!doc.contains("voters"))
      throw ParseError(file + ": general phantom system needs 'voters'");
    const int n = doc["voters"].get<int>();
    if (n < 1 || n > kMaxGeneralVoters)
      throw ParseError(file + ": unsupported voter count");
    std::vector<std::vector<T>> fns(size_t(1) << n);
    std::vector<bool> seen(fns.size(), false);
    for (const auto& entry : doc["functions"]) {
      if (!entry.is_object() || !entry.contains("subset") ||
          !entry.contains("values"))
        throw ParseError(file + ": general functions need 'subset' and 'values'");
      unsigned mask = 0;
      for (const auto& i : entry["subset"]) {
        const int voter = i.get<int>();
        if (voter < 0 || voter >= n)
          throw ParseError(file + ": subset member out of range");
        mask |= 1u << voter;
      }
      if (seen[mask]) throw ParseError(file + ": duplicate subset entry");
      seen[mask] = true;
      fns[mask] = values_from_json<T>(entry["values"], file + ": subset values");
    }
    for (size_t mask = 0; mask < seen.size(); ++mask)
      if (!seen[mask])
        throw ParseError(file + ": missing phantom function for a subset");
    try {
      return PhantomSystem<T>(GeneralPhantoms<T>(n, std::move(fns)));
    } catch (const Error& e) {
      throw ParseError(file + ": " + e.what());
    }
  }
  throw ParseError(file + ": unknown phantom system kind '" + kind + "'");
}

template <class T>
json phantom_system_to_json(const PhantomSystem<T>& sys) {
  json doc;
  if (std::holds_alternative<AnonymousPhantoms<T>>(sys)) {
    const auto& s = std::get<AnonymousPhantoms<T>>(sys);
    doc["kind"] = "anonymous";
    json fns = json::array();
    for (int k = 0; k <= s.voters(); ++k) fns.push_back(values_to_json(s.of(k)));
    doc["functions"] = std::move(fns);
  } else {
    const auto& s = std::get<GeneralPhantoms<T>>(sys);
    doc["kind"] = "general";
    doc["voters"] = s.voters();
    json fns = json::array();
    for (unsigned mask = 0; mask < unsigned(s.coalitions()); ++mask) {
      json subset = json::array();
      for (int i = 0; i < s.voters(); ++i)
        if (mask & (1u << i)) subset.push_back(i);
      fns.push_back({{"subset", std::move(subset)},
                     {"values", values_to_json(s.of(mask))}});
    }
    doc["functions"] = std::move(fns);
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Grading curves

template <class T>
GradingCurve<T> grading_curve_from_json(const json& doc,
                                        const std::string& file) {
  if (!doc.is_object() || !doc.contains("kind"))
    throw ParseError(file + ": grading curve needs a 'kind'");
  const std::string kind = doc["kind"].get<std::string>();
  try {
    if (kind == "identity") return GradingCurve<T>::identity();
    if (kind == "step")
      return GradingCurve<T>::step(
          value_from_json<T>(doc.at("threshold"), file + ": threshold"));
    if (kind == "affine")
      return GradingCurve<T>::affine(
          value_from_json<T>(doc.at("slope"), file + ": slope"),
          value_from_json<T>(doc.at("offset"), file + ": offset"));
    if (kind == "table") {
      std::vector<std::vector<std::pair<T, T>>> rows;
      for (const auto& row : doc.at("knots")) {
        std::vector<std::pair<T, T>> knots;
        for (const auto& kv : row) {
          if (!kv.is_array() || kv.size() != 2)
            throw ParseError(file + ": table knots must be [x, y] pairs");
          knots.emplace_back(value_from_json<T>(kv[0], file + ": knot x"),
                             value_from_json<T>(kv[1], file + ": knot y"));
        }
        rows.push_back(std::move(knots));
      }
      return GradingCurve<T>::table(std::move(rows));
    }
  } catch (const json::exception& e) {
    throw ParseError(file + ": " + e.what());
  }
  throw ParseError(file + ": unknown grading curve kind '" + kind + "'");
}

template <class T>
json grading_curve_to_json(const GradingCurve<T>& curve) {
  json doc;
  switch (curve.kind()) {
    case GradingCurve<T>::Kind::identity:
      doc["kind"] = "identity";
      break;
    case GradingCurve<T>::Kind::step:
      doc["kind"] = "step";
      doc["threshold"] = value_to_json(curve.step_threshold());
      break;
    case GradingCurve<T>::Kind::affine:
      doc["kind"] = "affine";
      doc["slope"] = value_to_json(curve.affine_slope());
      doc["offset"] = value_to_json(curve.affine_offset());
      break;
    case GradingCurve<T>::Kind::table: {
      doc["kind"] = "table";
      json rows = json::array();
      for (const auto& row : curve.knots()) {
        json knots = json::array();
        for (const auto& [x, y] : row)
          knots.push_back(json::array({value_to_json(x), value_to_json(y)}));
        rows.push_back(std::move(knots));
      }
      doc["knots"] = std::move(rows);
      break;
    }
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Method descriptors
//
// Textual grammar used on the command line; '@' arguments name JSON files.
//   proportional
//   weighted-proportional[:w1,w2,...]
//   order:K
//   median:@FILE | maxmin:@FILE
//   grading-curve:identity[:w1,...]
//   grading-curve:step:T[:w1,...]
//   grading-curve:affine:A:B[:w1,...]
//   grading-curve:@FILE[:w1,...]
//   mean
//   dictator:I

template <class T>
std::vector<T> weights_from_csv(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(arith<T>::parse(item));
  if (out.empty()) throw ConfigError("empty weight list");
  return out;
}

template <class T>
Method<T> method_from_descriptor(const std::string& desc) {
  std::vector<std::string> parts;
  std::stringstream ss(desc);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty()) throw ConfigError("empty method descriptor");
  const std::string& name = parts[0];
  try {
    if (name == "proportional" && parts.size() == 1)
      return Method<T>::proportional();
    if (name == "weighted-proportional" && parts.size() <= 2) {
      std::vector<T> w;
      if (parts.size() == 2) w = weights_from_csv<T>(parts[1]);
      return Method<T>::weighted_proportional(std::move(w));
    }
    if (name == "order" && parts.size() == 2)
      return Method<T>::order(std::stoi(parts[1]));
    if (name == "mean" && parts.size() == 1) return Method<T>::mean();
    if (name == "dictator" && parts.size() == 2)
      return Method<T>::dictator(std::stoi(parts[1]));
    if ((name == "median" || name == "maxmin") && parts.size() == 2 &&
        !parts[1].empty() && parts[1][0] == '@') {
      const std::string path = parts[1].substr(1);
      PhantomSystem<T> sys = phantom_system_from_json<T>(load_json_file(path), path);
      if (name == "median") {
        if (!std::holds_alternative<AnonymousPhantoms<T>>(sys))
          throw ConfigError("median needs an anonymous phantom system");
        return Method<T>::median(std::get<AnonymousPhantoms<T>>(std::move(sys)));
      }
      if (std::holds_alternative<GeneralPhantoms<T>>(sys))
        return Method<T>::maxmin(std::get<GeneralPhantoms<T>>(std::move(sys)));
      return Method<T>::maxmin(
          std::get<AnonymousPhantoms<T>>(sys).induced_general());
    }
    if (name == "grading-curve" && parts.size() >= 2) {
      size_t consumed = 2;
      GradingCurve<T> curve = GradingCurve<T>::identity();
      if (parts[1] == "identity") {
        // already
      } else if (parts[1] == "step" && parts.size() >= 3) {
        curve = GradingCurve<T>::step(arith<T>::parse(parts[2]));
        consumed = 3;
      } else if (parts[1] == "affine" && parts.size() >= 4) {
        curve = GradingCurve<T>::affine(arith<T>::parse(parts[2]),
                                        arith<T>::parse(parts[3]));
        consumed = 4;
      } else if (!parts[1].empty() && parts[1][0] == '@') {
        const std::string path = parts[1].substr(1);
        curve = grading_curve_from_json<T>(load_json_file(path), path);
      } else {
        throw ConfigError("unknown grading curve form '" + parts[1] + "'");
      }
      std::vector<T> w;
      if (parts.size() == consumed + 1) w = weights_from_csv<T>(parts[consumed]);
      else if (parts.size() > consumed + 1)
        throw ConfigError("trailing arguments in method descriptor");
      return Method<T>::grading_curve(std::move(curve), std::move(w));
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad numeric argument in method descriptor '" + desc + "'");
  } catch (const std::out_of_range&) {
    throw ConfigError("numeric argument out of range in '" + desc + "'");
  }
  throw ConfigError("unknown method descriptor '" + desc + "'");
}

template <class T>
json method_to_json(const Method<T>& method) {
  using M = Method<T>;
  json doc;
  doc["name"] = method.name();
  std::visit(
      [&](const auto& spec) {
        using S = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<S, typename M::MaxMin>) {
          doc["phantoms"] = phantom_system_to_json(PhantomSystem<T>(spec.phantoms));
        } else if constexpr (std::is_same_v<S, typename M::MedianPhantoms>) {
          doc["phantoms"] = phantom_system_to_json(PhantomSystem<T>(spec.phantoms));
        } else if constexpr (std::is_same_v<S, typename M::Order>) {
          doc["k"] = spec.k;
        } else if constexpr (std::is_same_v<S, typename M::WeightedProportional>) {
          if (!spec.weights.empty()) doc["weights"] = values_to_json(spec.weights);
        } else if constexpr (std::is_same_v<S, typename M::Curve>) {
          doc["curve"] = grading_curve_to_json(spec.curve);
          if (!spec.weights.empty()) doc["weights"] = values_to_json(spec.weights);
        } else if constexpr (std::is_same_v<S, typename M::Dictator>) {
          doc["voter"] = spec.voter;
        }
      },
      method.spec());
  return doc;
}

// ---------------------------------------------------------------------------
// Audit reports and witnesses

inline json witness_to_json(const Witness& w) {
  json doc;
  doc["grid"] = w.grid;
  doc["profile"] = w.profile;
  if (w.voter >= 0) doc["voter"] = w.voter;
  if (!w.deviation.empty()) doc["deviation"] = w.deviation;
  if (!w.deviation2.empty()) doc["deviation2"] = w.deviation2;
  if (w.grade >= 0) doc["grade"] = w.grade;
  if (w.grade2 >= 0) doc["grade_hi"] = w.grade2;
  if (!w.before.empty()) doc["before"] = w.before;
  if (!w.after.empty()) doc["after"] = w.after;
  if (!w.reference.empty()) doc["voter_value"] = w.reference;
  if (!w.note.empty()) doc["note"] = w.note;
  return doc;
}

inline Witness witness_from_json(const json& doc) {
  Witness w;
  w.grid = doc.at("grid").get<int>();
  w.profile = doc.at("profile").get<std::vector<std::vector<int>>>();
  if (doc.contains("voter")) w.voter = doc["voter"].get<int>();
  if (doc.contains("deviation"))
    w.deviation = doc["deviation"].get<std::vector<int>>();
  if (doc.contains("deviation2"))
    w.deviation2 = doc["deviation2"].get<std::vector<int>>();
  if (doc.contains("grade")) w.grade = doc["grade"].get<int>();
  if (doc.contains("grade_hi")) w.grade2 = doc["grade_hi"].get<int>();
  if (doc.contains("before")) w.before = doc["before"].get<std::string>();
  if (doc.contains("after")) w.after = doc["after"].get<std::string>();
  if (doc.contains("voter_value"))
    w.reference = doc["voter_value"].get<std::string>();
  if (doc.contains("note")) w.note = doc["note"].get<std::string>();
  return w;
}

inline json audit_report_to_json(const AuditReport& rep) {
  json doc;
  doc["axiom"] = rep.axiom;
  doc["verdict"] = rep.holds ? "holds-on-space" : "violated";
  doc["instances_checked"] = rep.instances_checked;
  if (rep.witness) doc["witness"] = witness_to_json(*rep.witness);
  if (!rep.note.empty()) doc["note"] = rep.note;
  return doc;
}

// ---------------------------------------------------------------------------
// Rankings

template <class T>
json mj_trace_to_json(const MjTrace<T>& t) {
  json doc;
  doc["a"] = value_to_json(t.a);
  doc["b"] = value_to_json(t.b);
  doc["c"] = value_to_json(t.c);
  doc["c_side"] = t.c_is_b ? "b" : "a";
  doc["b_attained"] = t.b_attained;
  return doc;
}

template <class T>
json ranking_to_json(const Ranking<T>& r, const OutcomeScale& scale) {
  json doc;
  json order = json::array();
  for (const auto& rc : r.order) {
    order.push_back({{"candidate", rc.label},
                     {"majority_grade", scale.label(rc.majority_grade)},
                     {"majority_grade_rank", rc.majority_grade + 1},
                     {"tie_class", rc.tie_class},
                     {"pmf", values_to_json(rc.aggregate.mass())},
                     {"cdf", values_to_json(rc.aggregate_cdf.cum())}});
  }
  doc["order"] = std::move(order);
  json pairs = json::array();
  for (const auto& p : r.adjacent) {
    pairs.push_back({{"first", p.first},
                     {"second", p.second},
                     {"ordering", p.ordering == MjOrdering::equal
                                      ? "tie"
                                      : (p.ordering == MjOrdering::a_above
                                             ? "first-above"
                                             : "second-above")},
                     {"trace", mj_trace_to_json(p.trace)}});
  }
  doc["adjacent_comparisons"] = std::move(pairs);
  return doc;
}

// ---------------------------------------------------------------------------
// CSV export: one row per (candidate, grade) with cumulative and mass

template <class T>
std::string aggregates_to_csv(const OutcomeScale& scale,
                              const std::vector<std::string>& candidates,
                              const std::vector<Cdf<T>>& cdfs) {
  std::string out = "grade,candidate,cdf,pmf\n";
  for (size_t c = 0; c < candidates.size(); ++c) {
    const Pmf<T> pmf = cdf_to_pmf(cdfs[c]);
    for (int a = 0; a < scale.size(); ++a) {
      out += scale.label(a);
      out += ',';
      out += candidates[c];
      out += ',';
      out += arith<T>::render(cdfs[c].cum()[a]);
      out += ',';
      out += arith<T>::render(pmf.mass()[a]);
      out += '\n';
    }
  }
  return out;
}

/// Shared envelope of every report the CLI writes.
inline json report_skeleton(const std::string& command, bool exact) {
  json doc;
  doc["tool_version"] = kToolVersion;
  doc["arithmetic"] = exact ? "exact" : "float";
  doc["command"] = command;
  return doc;
}

}  // namespace levelsp::io
