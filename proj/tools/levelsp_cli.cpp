// Command-line front end: aggregate probabilistic ballots, rank candidates,
// audit axioms over discretized spaces, search for manipulations, and run
// referendum tallies. Exit codes: 0 success, 1 usage error, 2 validation
// error, 3 an axiom expected to hold was violated.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "levelsp/json_io.hpp"
#include "levelsp/levelsp.hpp"

using namespace levelsp;
namespace io = levelsp::io;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitViolation = 3;

void emit(const json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    io::write_text_file(out_path, report.dump(2) + "\n");
    std::cout << "report written to " << out_path << "\n";
  }
}

std::string join_argv(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

// ---------------------------------------------------------------------------

template <class T>
int run_aggregate(const std::string& command, const std::string& ballots_path,
                  const std::string& method_desc,
                  const std::string& weights_path, const std::string& out_path,
                  const std::string& csv_path) {
  Election<T> e =
      io::election_from_json<T>(io::load_json_file(ballots_path), ballots_path);
  if (!weights_path.empty()) {
    const json wdoc = io::load_json_file(weights_path);
    std::vector<T> weights = e.weights();
    for (int v = 0; v < e.voters(); ++v) {
      const auto& id = e.voter_ids()[v];
      if (wdoc.contains(id))
        weights[v] = io::value_from_json<T>(wdoc[id], weights_path + ": " + id);
    }
    std::vector<std::vector<Pmf<T>>> ballots;
    for (int v = 0; v < e.voters(); ++v) {
      std::vector<Pmf<T>> row;
      for (size_t c = 0; c < e.candidates().size(); ++c)
        row.push_back(e.ballot(v, static_cast<int>(c)));
      ballots.push_back(std::move(row));
    }
    e = Election<T>(e.scale_ptr(), e.candidates(), e.voter_ids(),
                    std::move(weights), std::move(ballots));
  }
  const Method<T> method = io::method_from_descriptor<T>(method_desc);

  json report = io::report_skeleton(command, arith<T>::exact);
  report["method"] = io::method_to_json(method);
  report["scale"] = e.scale().labels();
  json results = json::array();
  std::vector<Cdf<T>> cdfs;
  for (size_t c = 0; c < e.candidates().size(); ++c) {
    const Cdf<T> agg = aggregate(method, e.candidate_profile(static_cast<int>(c)));
    const Pmf<T> mass = cdf_to_pmf(agg);
    results.push_back({{"candidate", e.candidates()[c]},
                       {"cdf", io::values_to_json(agg.cum())},
                       {"pmf", io::values_to_json(mass.mass())}});
    cdfs.push_back(agg);
  }
  report["aggregates"] = std::move(results);
  if (!csv_path.empty()) {
    io::write_text_file(csv_path,
                        io::aggregates_to_csv(e.scale(), e.candidates(), cdfs));
    report["csv"] = csv_path;
  }
  emit(report, out_path);
  return kExitOk;
}

template <class T>
int run_rank(const std::string& command, const std::string& ballots_path,
             const std::string& out_path) {
  const Election<T> e =
      io::election_from_json<T>(io::load_json_file(ballots_path), ballots_path);
  const Ranking<T> ranking = mju_tally(e);
  json report = io::report_skeleton(command, arith<T>::exact);
  report["method"] = {{"name", "weighted-proportional"}};
  report["ranking"] = io::ranking_to_json(ranking, e.scale());
  emit(report, out_path);
  return kExitOk;
}

template <class T>
int run_referendum(const std::string& command, const std::string& priors_path,
                   const std::string& alpha_text, const std::string& out_path) {
  const json doc = io::load_json_file(priors_path);
  if (!doc.is_array() || doc.empty())
    throw ParseError(priors_path + ": expected a non-empty array of priors");
  const std::vector<T> priors = io::values_from_json<T>(doc, priors_path);
  const T alpha = arith<T>::parse(alpha_text);
  const ReferendumResult<T> res = referendum<T>(priors, alpha);
  json report = io::report_skeleton(command, arith<T>::exact);
  report["alpha"] = io::value_to_json(alpha);
  report["aggregate"] = io::value_to_json(res.aggregate);
  report["decision"] = res.reform ? "reform" : "status-quo";
  report["median_multiset"] = io::values_to_json(res.multiset);
  emit(report, out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Audit expectations: which verdicts the characterizations guarantee. The
// process exit code flags only violations of axioms expected to hold.

bool is_dictatorial_system(const PhantomSystem<Rational>& sys) {
  if (!std::holds_alternative<GeneralPhantoms<Rational>>(sys)) {
    const auto& anon = std::get<AnonymousPhantoms<Rational>>(sys);
    if (anon.voters() != 1) return false;
    return is_dictatorial_system(
        PhantomSystem<Rational>(anon.induced_general()));
  }
  const auto& gen = std::get<GeneralPhantoms<Rational>>(sys);
  for (int i = 0; i < gen.voters(); ++i) {
    bool match = true;
    for (unsigned mask = 0; match && mask < unsigned(gen.coalitions()); ++mask) {
      const Rational want((mask >> i) & 1u ? 1 : 0);
      for (int a = 0; a < gen.grades(); ++a)
        if (gen.value(mask, a) != want) {
          match = false;
          break;
        }
    }
    if (match) return true;
  }
  return false;
}

bool is_weighted_proportional_system(const Method<Rational>& method,
                                     const PhantomSystem<Rational>& sys,
                                     const InstanceSpace& space) {
  const auto weights = method_audit_weights(method, space.n);
  const GeneralPhantoms<Rational> want =
      phantoms_from_weights(weights, space.m);
  const GeneralPhantoms<Rational> have =
      std::holds_alternative<GeneralPhantoms<Rational>>(sys)
          ? std::get<GeneralPhantoms<Rational>>(sys)
          : std::get<AnonymousPhantoms<Rational>>(sys).induced_general();
  if (have.voters() != want.voters()) return false;
  for (unsigned mask = 0; mask < unsigned(want.coalitions()); ++mask)
    if (have.of(mask) != want.of(mask)) return false;
  return true;
}

std::optional<bool> expected_to_hold(const Method<Rational>& method,
                                     const std::string& axiom,
                                     const InstanceSpace& space) {
  const bool is_mean = method.name() == "mean";
  const auto sys = phantom_system_of(method, space.n, space.m);
  // Level-strategyproofness is what an aggregation rule under audit is
  // supposed to deliver, so a violation always fails the run, including for
  // the counterexample methods.
  if (axiom == "level-sp" || axiom.rfind("lr-cdf-sp", 0) == 0) return true;
  if (axiom == "certainty") {
    if (is_mean) return true;
    if (sys) return is_certainty_preserving(*sys);
    return std::nullopt;
  }
  if (axiom == "plausibility") {
    if (is_mean) return true;
    if (sys) return is_plausibility_preserving(*sys);
    return std::nullopt;
  }
  if (axiom == "l1-prob-sp") {
    if (!sys) return std::nullopt;
    if (is_dictatorial_system(*sys)) return true;
    if (space.m <= 3) return true;
    if (is_certainty_preserving(*sys) && space.n >= 2) return false;
    return std::nullopt;
  }
  if (axiom == "proportionality") {
    if (is_mean) return true;
    if (sys) return is_weighted_proportional_system(method, *sys, space);
    return std::nullopt;
  }
  if (axiom == "w-axioms") {
    return method.name() == "grading-curve" ? std::optional<bool>(true)
                                            : std::nullopt;
  }
  return std::nullopt;
}

int run_audit(const std::string& command, const std::string& method_desc,
              const std::string& axiom_list, const InstanceSpace& space,
              long long scenarios, const std::string& out_path) {
  const Method<Rational> method =
      io::method_from_descriptor<Rational>(method_desc);
  std::vector<std::string> axioms;
  {
    std::stringstream ss(axiom_list);
    std::string item;
    while (std::getline(ss, item, ',')) axioms.push_back(item);
  }
  if (axioms.empty()) throw ConfigError("empty axiom list");

  json report = io::report_skeleton(command, true);
  report["method"] = io::method_to_json(method);
  report["space"] = {{"n", space.n},
                     {"m", space.m},
                     {"grid", space.grid},
                     {"mode", space.mode == InstanceSpace::Mode::exhaustive
                                  ? "exhaustive"
                                  : "random"},
                     {"seed", space.seed},
                     {"budget", space.budget}};
  json results = json::array();

  bool violated_expected = false;
  bool budget_hit = false;
  std::optional<bool> level_sp_held;
  for (const std::string& axiom : axioms) {
    std::vector<AuditReport> reps;
    try {
      if (axiom == "level-sp") {
        reps.push_back(audit_level_sp(method, space));
        level_sp_held = reps.back().holds;
      } else if (axiom == "lr-cdf-sp") {
        reps.push_back(audit_lr_cdf_sp(method, 1, space));
        reps.push_back(audit_lr_cdf_sp(method, 2, space));
      } else if (axiom == "l1-prob-sp") {
        reps.push_back(audit_l1_prob_sp(method, space));
      } else if (axiom == "certainty") {
        reps.push_back(audit_certainty(method, space));
      } else if (axiom == "plausibility") {
        reps.push_back(audit_plausibility(method, space));
      } else if (axiom == "proportionality") {
        reps.push_back(audit_proportionality(
            method, method_audit_weights(method, space.n), space));
      } else if (axiom == "w-axioms") {
        const auto* curve =
            std::get_if<Method<Rational>::Curve>(&method.spec());
        if (!curve)
          throw ConfigError("w-axioms need a grading-curve method");
        reps.push_back(
            audit_w_axioms(curve->curve, scenarios, space.seed));
      } else {
        throw ConfigError("unknown axiom '" + axiom + "'");
      }
    } catch (const BudgetExceeded& e) {
      budget_hit = true;
      json entry;
      entry["axiom"] = axiom;
      entry["verdict"] = "skipped";
      entry["note"] = std::string("budget exceeded: ") + e.what();
      results.push_back(std::move(entry));
      continue;
    }
    for (const auto& rep : reps) {
      json entry = io::audit_report_to_json(rep);
      const auto expected = expected_to_hold(method, rep.axiom, space);
      if (expected.has_value()) {
        entry["expected"] = *expected ? "holds" : "violated";
        if (*expected && !rep.holds) violated_expected = true;
      }
      // a level-sp pass must imply an L_r pass on the same space
      if (rep.axiom.rfind("lr-cdf-sp", 0) == 0 && level_sp_held == true &&
          !rep.holds) {
        entry["note"] = "inconsistent with the level-sp verdict";
        violated_expected = true;
      }
      std::printf("%-16s %s\n", rep.axiom.c_str(),
                  rep.holds ? "holds-on-space" : "violated");
      results.push_back(std::move(entry));
    }
  }
  report["audits"] = std::move(results);
  emit(report, out_path);
  if (violated_expected) return kExitViolation;
  if (budget_hit) return kExitValidation;
  return kExitOk;
}

int run_manipulate(const std::string& command, const std::string& method_desc,
                   const std::string& utility_desc, const InstanceSpace& space,
                   const std::string& out_path) {
  const Method<Rational> method =
      io::method_from_descriptor<Rational>(method_desc);
  Utility utility;
  if (utility_desc == "level") {
    utility = Utility::level();
  } else if (utility_desc.rfind("level:", 0) == 0) {
    utility = Utility::level(std::stoi(utility_desc.substr(6)));
  } else if (utility_desc.rfind("lr-cdf:", 0) == 0) {
    utility = Utility::lr_cdf(std::stoi(utility_desc.substr(7)));
  } else if (utility_desc == "l1-prob") {
    utility = Utility::l1_prob();
  } else {
    throw ConfigError("unknown utility '" + utility_desc + "'");
  }
  long long instances = 0;
  const auto witness = find_manipulation(method, utility, space, &instances);
  json report = io::report_skeleton(command, true);
  report["method"] = io::method_to_json(method);
  report["utility"] = utility.name();
  report["instances_checked"] = instances;
  report["found"] = witness.has_value();
  if (witness) report["witness"] = io::witness_to_json(*witness);
  emit(report, out_path);
  return kExitOk;
}

int run_export(const std::string& report_path, const std::string& out_path) {
  const json doc = io::load_json_file(report_path);
  if (!doc.contains("aggregates"))
    throw ParseError(report_path + ": not an aggregate report (no 'aggregates')");
  std::vector<std::string> labels;
  if (doc.contains("scale"))
    labels = doc["scale"].get<std::vector<std::string>>();
  std::string csv = "grade,candidate,cdf,pmf\n";
  for (const auto& entry : doc["aggregates"]) {
    const auto& cdf = entry.at("cdf");
    const auto& pmf = entry.at("pmf");
    const std::string cand = entry.at("candidate").get<std::string>();
    for (size_t a = 0; a < cdf.size(); ++a) {
      const auto render = [](const json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
      };
      const std::string grade =
          a < labels.size() ? labels[a] : "g" + std::to_string(a + 1);
      csv += grade + "," + cand + "," + render(cdf[a]) + "," + render(pmf[a]) +
             "\n";
    }
  }
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    io::write_text_file(out_path, csv);
    std::cout << "csv written to " << out_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-strategyproof probability aggregation and MJ ranking"};
  app.require_subcommand(1);
  const std::string command = join_argv(argc, argv);

  std::string ballots, method_desc, weights_path, out_path, csv_path;
  std::string priors_path, alpha_text = "0.5";
  std::string axiom_list, utility_desc = "level", report_path;
  bool exact = false;
  InstanceSpace space;
  long long scenarios = 1000;
  std::string mode = "exhaustive";

  auto* agg = app.add_subcommand("aggregate", "Aggregate ballots per candidate");
  agg->add_option("--ballots", ballots, "ballot JSON file")->required();
  agg->add_option("--method", method_desc, "method descriptor")->required();
  agg->add_option("--weights", weights_path, "voter weight override JSON");
  agg->add_option("--out", out_path, "report output path");
  agg->add_option("--csv", csv_path, "CSV export path");
  agg->add_flag("--exact", exact, "exact rational arithmetic");

  auto* rank = app.add_subcommand("rank", "Rank candidates with MJ under uncertainty");
  rank->add_option("--ballots", ballots, "ballot JSON file")->required();
  rank->add_option("--out", out_path, "report output path");
  rank->add_flag("--exact", exact, "exact rational arithmetic");

  auto* audit = app.add_subcommand("audit", "Audit axioms on a discretized space");
  audit->add_option("--method", method_desc, "method descriptor")->required();
  audit->add_option("--axioms", axiom_list,
                    "comma list: level-sp,lr-cdf-sp,l1-prob-sp,certainty,"
                    "plausibility,proportionality,w-axioms")
      ->required();
  audit->add_option("--n", space.n, "voters")->required();
  audit->add_option("--m", space.m, "grades")->required();
  audit->add_option("--grid", space.grid, "level grid resolution")->required();
  audit->add_option("--seed", space.seed, "random seed");
  audit->add_option("--budget", space.budget, "instance budget");
  audit->add_option("--samples", space.samples, "random-mode sample count");
  audit->add_option("--scenarios", scenarios, "w-axiom scenario count");
  audit->add_option("--mode", mode, "exhaustive|random");
  audit->add_option("--out", out_path, "report output path");

  auto* manip = app.add_subcommand("manipulate", "Search for a profitable deviation");
  manip->add_option("--method", method_desc, "method descriptor")->required();
  manip->add_option("--utility", utility_desc, "level[:grade]|lr-cdf:R|l1-prob");
  manip->add_option("--n", space.n, "voters")->required();
  manip->add_option("--m", space.m, "grades")->required();
  manip->add_option("--grid", space.grid, "level grid resolution")->required();
  manip->add_option("--seed", space.seed, "random seed");
  manip->add_option("--budget", space.budget, "instance budget");
  manip->add_option("--samples", space.samples, "random-mode sample count");
  manip->add_option("--mode", mode, "exhaustive|random");
  manip->add_option("--out", out_path, "report output path");

  auto* refe = app.add_subcommand("referendum", "Aggregate reform priors");
  refe->add_option("--priors", priors_path, "JSON array of priors")->required();
  refe->add_option("--alpha", alpha_text, "decision threshold in (0,1)")
      ->required();
  refe->add_option("--out", out_path, "report output path");
  refe->add_flag("--exact", exact, "exact rational arithmetic");

  auto* expo = app.add_subcommand("export", "Convert an aggregate report to CSV");
  expo->add_option("--report", report_path, "aggregate report JSON")->required();
  expo->add_option("--out", out_path, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (mode == "random") {
    space.mode = InstanceSpace::Mode::random;
    if (space.samples <= 0) space.samples = 1000;
  } else if (mode != "exhaustive") {
    std::fprintf(stderr, "error: unknown mode '%s'\n", mode.c_str());
    return kExitUsage;
  }

  try {
    if (agg->parsed()) {
      return exact ? run_aggregate<Rational>(command, ballots, method_desc,
                                             weights_path, out_path, csv_path)
                   : run_aggregate<double>(command, ballots, method_desc,
                                           weights_path, out_path, csv_path);
    }
    if (rank->parsed()) {
      return exact ? run_rank<Rational>(command, ballots, out_path)
                   : run_rank<double>(command, ballots, out_path);
    }
    if (audit->parsed())
      return run_audit(command, method_desc, axiom_list, space, scenarios,
                       out_path);
    if (manip->parsed())
      return run_manipulate(command, method_desc, utility_desc, space, out_path);
    if (refe->parsed()) {
      return exact ? run_referendum<Rational>(command, priors_path, alpha_text,
                                              out_path)
                   : run_referendum<double>(command, priors_path, alpha_text,
                                            out_path);
    }
    if (expo->parsed()) return run_export(report_path, out_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitUsage;
}
