#include "coopfarm/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coopfarm/numfmt.hpp"

namespace coopfarm {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw ScenarioError(ScenarioErrorKind::validation, path, path + ": " + what);
}

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string index(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

// Reads the members of one JSON object, tracking which keys were used so that
// leftovers can be reported as unknown fields.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const Json& raw(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) invalid(join(path_, key), "missing required field");
    return j_.at(key);
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!j_.contains(key) && fallback) return *fallback;
    const auto& v = raw(key);
    if (!v.is_number()) invalid(path(key), "expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) {
    if (!j_.contains(key) && fallback) return *fallback;
    const auto& v = raw(key);
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) invalid(path(key), "integer out of range");
      return static_cast<std::int64_t>(u);
    }
    if (!v.is_number_integer()) invalid(path(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::optional<std::uint64_t> fallback) {
    if (!j_.contains(key) && fallback) return *fallback;
    const auto& v = raw(key);
    if (!v.is_number_unsigned()) invalid(path(key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt) {
    if (!j_.contains(key) && fallback) return *fallback;
    const auto& v = raw(key);
    if (!v.is_boolean()) invalid(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (!j_.contains(key) && fallback) return *fallback;
    const auto& v = raw(key);
    if (!v.is_string()) invalid(path(key), "expected a string");
    return v.get<std::string>();
  }

  const Json& array(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_array()) invalid(path(key), "expected an array");
    return v;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) invalid(join(path_, it.key()), "unknown field");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Json parse_strict(const std::string& text) {
  // Duplicate keys are a format error; track the keys seen per open object.
  std::vector<std::set<std::string>> open;
  auto callback = [&](int, Json::parse_event_t event, Json& parsed) {
    switch (event) {
      case Json::parse_event_t::object_start: open.emplace_back(); break;
      case Json::parse_event_t::object_end: open.pop_back(); break;
      case Json::parse_event_t::key: {
        const auto key = parsed.get<std::string>();
        if (!open.back().insert(key).second)
          throw ScenarioError(ScenarioErrorKind::parse, key, "duplicate key '" + key + "'");
        break;
      }
      default: break;
    }
    return true;
  };
  try {
    return Json::parse(text, callback);
  } catch (const Json::parse_error& e) {
    throw ScenarioError(ScenarioErrorKind::parse, "", e.what());
  }
}

void check_unit(double v, const std::string& path) {
  if (!(std::isfinite(v) && v >= 0.0 && v <= 1.0)) invalid(path, "must be in [0, 1]");
}

void check_nonneg(double v, const std::string& path) {
  if (!(std::isfinite(v) && v >= 0.0)) invalid(path, "must be finite and >= 0");
}

// ---- scenario --------------------------------------------------------------

Json corruption_json(const CorruptionSpec& c) {
  Json j;
  j["mode"] = std::string(to_string(c.mode));
  j["rate"] = c.rate;
  return j;
}

CorruptionSpec read_corruption(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  CorruptionSpec c;
  const auto mode = r.string("mode");
  try {
    c.mode = corruption_mode_from_string(mode);
  } catch (const std::invalid_argument&) {
    invalid(r.path("mode"), "unknown corruption mode '" + mode + "'");
  }
  c.rate = r.number("rate", 0.0);
  r.finish();
  return c;
}

Json costs_json(const CostVector& c) {
  Json j;
  j["membership"] = c.membership;
  j["penalty"] = c.penalty;
  j["upload_comm"] = c.upload_comm;
  j["download_comm"] = c.download_comm;
  j["storage"] = c.storage;
  j["local_compute"] = c.local_compute;
  return j;
}

Json scenario_json(const ScenarioConfig& c) {
  Json j;
  j["version"] = std::string(kScenarioVersion);
  j["seed"] = c.seed;
  j["penalty_in_coop_cost"] = c.payoff.penalty_in_coop_cost;
  Json farms = Json::array();
  for (const auto& f : c.farms) {
    Json fj;
    fj["device_count"] = f.device_count;
    fj["quality"] = f.quality;
    if (f.corruption) fj["corruption"] = corruption_json(*f.corruption);
    farms.push_back(std::move(fj));
  }
  j["farms"] = std::move(farms);
  j["costs"] = costs_json(c.costs);
  j["payoff"] = {{"benefit_coefficient", c.payoff.benefit_coefficient},
                 {"a_min", c.payoff.accuracy_model.a_min},
                 {"a_max", c.payoff.accuracy_model.a_max},
                 {"volume_scale", c.payoff.accuracy_model.volume_scale}};
  j["pipeline"] = {{"k", c.pipeline.k},
                   {"restarts", c.pipeline.restarts},
                   {"lambda_reg", c.pipeline.lambda_reg},
                   {"classifier_steps", c.pipeline.classifier_steps},
                   {"records_per_device", c.pipeline.gen.records_per_device},
                   {"golden_records", c.pipeline.gen.golden_records}};
  j["dynamics"] = {{"rounds", c.dynamics.rounds}, {"epsilon", c.dynamics.epsilon}};
  return j;
}

int to_int(std::int64_t v, const std::string& path) {
  if (v < INT32_MIN || v > INT32_MAX) invalid(path, "integer out of range");
  return static_cast<int>(v);
}

ScenarioConfig read_scenario(const Json& j, const std::string& base) {
  const ScenarioConfig defaults;
  ObjectReader r(j, base);
  ScenarioConfig c;

  const auto version = r.string("version", std::string(kScenarioVersion));
  if (version != kScenarioVersion) invalid(r.path("version"), "unsupported version '" + version + "'");
  c.seed = r.unsigned_integer("seed", defaults.seed);
  c.payoff.penalty_in_coop_cost = r.boolean("penalty_in_coop_cost", true);

  const auto& farms = r.array("farms");
  for (std::size_t i = 0; i < farms.size(); ++i) {
    const auto path = index(r.path("farms"), i);
    ObjectReader fr(farms[i], path);
    FarmSpec f;
    f.device_count = to_int(fr.integer("device_count"), fr.path("device_count"));
    f.quality = fr.number("quality");
    if (fr.has("corruption")) f.corruption = read_corruption(fr.raw("corruption"), fr.path("corruption"));
    else if (farms[i].contains("corruption")) fr.raw("corruption");
    fr.finish();
    c.farms.push_back(f);
  }

  if (j.contains("costs")) {
    ObjectReader cr(r.raw("costs"), r.path("costs"));
    c.costs.membership = cr.number("membership", 0.0);
    c.costs.penalty = cr.number("penalty", 0.0);
    c.costs.upload_comm = cr.number("upload_comm", 0.0);
    c.costs.download_comm = cr.number("download_comm", 0.0);
    c.costs.storage = cr.number("storage", 0.0);
    c.costs.local_compute = cr.number("local_compute", 0.0);
    cr.finish();
  }
  if (j.contains("payoff")) {
    ObjectReader pr(r.raw("payoff"), r.path("payoff"));
    const auto& d = defaults.payoff;
    c.payoff.benefit_coefficient = pr.number("benefit_coefficient", d.benefit_coefficient);
    c.payoff.accuracy_model.a_min = pr.number("a_min", d.accuracy_model.a_min);
    c.payoff.accuracy_model.a_max = pr.number("a_max", d.accuracy_model.a_max);
    c.payoff.accuracy_model.volume_scale = pr.number("volume_scale", d.accuracy_model.volume_scale);
    pr.finish();
  }
  if (j.contains("pipeline")) {
    ObjectReader pr(r.raw("pipeline"), r.path("pipeline"));
    const auto& d = defaults.pipeline;
    const auto k = pr.integer("k", static_cast<std::int64_t>(d.k));
    if (k < 1) invalid(pr.path("k"), "must be >= 1");
    c.pipeline.k = static_cast<std::size_t>(k);
    const auto restarts = pr.integer("restarts", static_cast<std::int64_t>(d.restarts));
    if (restarts < 1) invalid(pr.path("restarts"), "must be >= 1");
    c.pipeline.restarts = static_cast<std::size_t>(restarts);
    c.pipeline.lambda_reg = pr.number("lambda_reg", d.lambda_reg);
    c.pipeline.classifier_steps = pr.integer("classifier_steps", d.classifier_steps);
    c.pipeline.gen.records_per_device =
        to_int(pr.integer("records_per_device", d.gen.records_per_device), pr.path("records_per_device"));
    c.pipeline.gen.golden_records =
        to_int(pr.integer("golden_records", d.gen.golden_records), pr.path("golden_records"));
    pr.finish();
  }
  if (j.contains("dynamics")) {
    ObjectReader dr(r.raw("dynamics"), r.path("dynamics"));
    c.dynamics.rounds = to_int(dr.integer("rounds", defaults.dynamics.rounds), dr.path("rounds"));
    c.dynamics.epsilon = dr.number("epsilon", defaults.dynamics.epsilon);
    dr.finish();
  }
  r.finish();

  try {
    validate_scenario(c);
  } catch (const ScenarioError& e) {
    if (base.empty()) throw;
    throw ScenarioError(e.kind(), join(base, e.field_path()), base + "." + e.what());
  }
  return c;
}

// ---- report ----------------------------------------------------------------

Json strategies_json(const std::vector<Strategy>& s) {
  Json j = Json::array();
  for (auto v : s) j.push_back(std::string(to_string(v)));
  return j;
}

std::vector<Strategy> read_strategies(const Json& j, const std::string& path) {
  if (!j.is_array()) invalid(path, "expected an array");
  std::vector<Strategy> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) invalid(index(path, i), "expected \"CP\" or \"DF\"");
    try {
      out.push_back(strategy_from_string(j[i].get<std::string>()));
    } catch (const std::invalid_argument&) {
      invalid(index(path, i), "expected \"CP\" or \"DF\"");
    }
  }
  return out;
}

template <typename T>
std::vector<T> read_numbers(const Json& j, const std::string& path) {
  if (!j.is_array()) invalid(path, "expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if constexpr (std::is_floating_point_v<T>) {
      if (!j[i].is_number()) invalid(index(path, i), "expected a number");
    } else {
      if (!j[i].is_number_unsigned()) invalid(index(path, i), "expected a nonnegative integer");
    }
    out.push_back(j[i].get<T>());
  }
  return out;
}

Json equilibrium_json(const EquilibriumAnalysis& a) {
  const auto& rep = a.report;
  const bool complete = rep.profiles_evaluated <= kMaxSerializedWitnessProfiles;
  const auto all_cp_mask = static_cast<std::uint32_t>(rep.profiles_evaluated - 1);

  Json j;
  j["farm_count"] = rep.farm_count;
  j["profiles_evaluated"] = rep.profiles_evaluated;
  j["all_df_is_ne"] = rep.all_df_is_ne;
  j["all_cp_is_ne"] = rep.all_cp_is_ne;
  Json nash = Json::array();
  for (auto m : rep.nash_masks) nash.push_back(StrategyProfile::from_mask(m, rep.farm_count).to_code());
  j["nash_profiles"] = std::move(nash);
  j["witnesses_complete"] = complete;
  Json witnesses = Json::array();
  for (const auto& w : rep.witness_deviations) {
    if (!complete && w.profile_mask != 0 && w.profile_mask != all_cp_mask) continue;
    witnesses.push_back({{"profile", StrategyProfile::from_mask(w.profile_mask, rep.farm_count).to_code()},
                         {"farm", w.deviation.farm},
                         {"old_payoff", w.deviation.old_payoff},
                         {"new_payoff", w.deviation.new_payoff}});
  }
  j["witness_deviations"] = std::move(witnesses);
  j["theorem1"] = {{"condition_met", a.theorem1.condition_met}, {"holds", a.theorem1.holds}};
  Json t2;
  t2["all_cp_is_ne"] = a.theorem2.all_cp_is_ne;
  t2["claim_holds"] = a.theorem2.claim_holds;
  t2["claim_is_parameter_dependent"] = a.theorem2.counterexample.has_value();
  t2["margins"] = a.theorem2.margins;
  if (a.theorem2.counterexample) {
    const auto& c = *a.theorem2.counterexample;
    t2["counterexample"] = {{"benefit_coefficient", c.benefit_coefficient},
                            {"coop_cost", c.coop_cost},
                            {"local_compute", c.local_compute},
                            {"grand_coalition_accuracy", c.grand_coalition_accuracy}};
  } else {
    t2["counterexample"] = nullptr;
  }
  j["theorem2"] = std::move(t2);
  return j;
}

std::uint32_t read_profile_mask(const Json& j, const std::string& path, std::size_t n) {
  if (!j.is_string()) invalid(path, "expected a profile code");
  try {
    const auto p = StrategyProfile::from_code(j.get<std::string>());
    if (p.size() != n) invalid(path, "profile length does not match farm_count");
    return p.mask();
  } catch (const std::invalid_argument&) {
    invalid(path, "expected a string of 'C'/'D'");
  }
}

EquilibriumAnalysis read_equilibrium(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  EquilibriumAnalysis a;
  auto& rep = a.report;
  rep.farm_count = static_cast<std::size_t>(r.unsigned_integer("farm_count", std::nullopt));
  if (rep.farm_count < 1 || rep.farm_count > kMaxEnumerationFarms) invalid(r.path("farm_count"), "out of range");
  rep.profiles_evaluated = r.unsigned_integer("profiles_evaluated", std::nullopt);
  rep.all_df_is_ne = r.boolean("all_df_is_ne");
  rep.all_cp_is_ne = r.boolean("all_cp_is_ne");
  const auto& nash = r.array("nash_profiles");
  for (std::size_t i = 0; i < nash.size(); ++i)
    rep.nash_masks.push_back(read_profile_mask(nash[i], index(r.path("nash_profiles"), i), rep.farm_count));
  r.boolean("witnesses_complete");
  const auto& ws = r.array("witness_deviations");
  for (std::size_t i = 0; i < ws.size(); ++i) {
    ObjectReader wr(ws[i], index(r.path("witness_deviations"), i));
    WitnessedProfile w;
    w.profile_mask = read_profile_mask(wr.raw("profile"), wr.path("profile"), rep.farm_count);
    w.deviation.farm = static_cast<std::size_t>(wr.unsigned_integer("farm", std::nullopt));
    w.deviation.old_payoff = wr.number("old_payoff");
    w.deviation.new_payoff = wr.number("new_payoff");
    wr.finish();
    rep.witness_deviations.push_back(w);
  }
  {
    ObjectReader tr(r.raw("theorem1"), r.path("theorem1"));
    a.theorem1.condition_met = tr.boolean("condition_met");
    a.theorem1.holds = tr.boolean("holds");
    tr.finish();
  }
  {
    ObjectReader tr(r.raw("theorem2"), r.path("theorem2"));
    a.theorem2.all_cp_is_ne = tr.boolean("all_cp_is_ne");
    a.theorem2.claim_holds = tr.boolean("claim_holds");
    tr.boolean("claim_is_parameter_dependent");
    a.theorem2.margins = read_numbers<double>(tr.array("margins"), tr.path("margins"));
    const auto& ce = tr.raw("counterexample");
    if (!ce.is_null()) {
      ObjectReader cr(ce, tr.path("counterexample"));
      Theorem2Counterexample c;
      c.benefit_coefficient = cr.number("benefit_coefficient");
      c.coop_cost = cr.number("coop_cost");
      c.local_compute = cr.number("local_compute");
      c.grand_coalition_accuracy = cr.number("grand_coalition_accuracy");
      cr.finish();
      a.theorem2.counterexample = c;
    }
    tr.finish();
  }
  r.finish();
  return a;
}

Json report_json(const SimulationReport& rep) {
  Json j;
  j["version"] = rep.version;
  j["command"] = rep.command;
  j["arm"] = rep.arm;
  j["scenario"] = scenario_json(rep.scenario);

  Json farms = Json::array();
  for (const auto& f : rep.farms) {
    Json fj;
    fj["id"] = f.id;
    fj["device_count"] = f.device_count;
    fj["quality"] = f.quality;
    fj["local_accuracy"] = f.local_accuracy;
    fj["malicious"] = f.malicious ? corruption_json(*f.malicious) : Json(nullptr);
    farms.push_back(std::move(fj));
  }
  j["farms"] = std::move(farms);

  Json scores = Json::array();
  for (const auto& s : rep.scores) scores.push_back({{"farm_id", s.farm_id}, {"accuracy", s.accuracy}});
  j["scores"] = std::move(scores);

  if (rep.clustering) {
    const auto& c = *rep.clustering;
    j["clustering"] = {{"k", c.k}, {"centroids", c.centroids}, {"assignment", c.assignment},
                       {"inertia", c.inertia}};
  } else {
    j["clustering"] = nullptr;
  }

  if (rep.assignment) {
    Json blocs = Json::array();
    for (const auto& b : rep.assignment->blocs)
      blocs.push_back({{"cluster", b.cluster}, {"members", b.members}, {"coop_accuracy", b.coop_accuracy}});
    j["assignment"] = {{"blocs", std::move(blocs)},
                       {"strategy_of", strategies_json(rep.assignment->strategy_of)}};
  } else {
    j["assignment"] = nullptr;
  }

  j["equilibrium"] = rep.equilibrium ? equilibrium_json(*rep.equilibrium) : Json(nullptr);

  Json rounds = Json::array();
  for (const auto& t : rep.rounds) {
    rounds.push_back({{"round", t.round},
                      {"strategy_of", strategies_json(t.strategy_of)},
                      {"payoffs", t.payoffs},
                      {"defections", t.defections_this_round}});
  }
  j["rounds"] = std::move(rounds);
  return j;
}

SimulationReport read_report(const Json& j) {
  ObjectReader r(j, "");
  SimulationReport rep;
  rep.version = r.string("version");
  if (rep.version != kReportVersion) invalid("version", "unsupported report version '" + rep.version + "'");
  rep.command = r.string("command");
  rep.arm = r.string("arm");
  rep.scenario = read_scenario(r.raw("scenario"), "scenario");

  const auto& farms = r.array("farms");
  for (std::size_t i = 0; i < farms.size(); ++i) {
    ObjectReader fr(farms[i], index("farms", i));
    Farm f;
    f.id = static_cast<std::size_t>(fr.unsigned_integer("id", std::nullopt));
    f.device_count = to_int(fr.integer("device_count"), fr.path("device_count"));
    f.quality = fr.number("quality");
    f.local_accuracy = fr.number("local_accuracy");
    const auto& m = fr.raw("malicious");
    if (!m.is_null()) f.malicious = read_corruption(m, fr.path("malicious"));
    fr.finish();
    rep.farms.push_back(f);
  }

  const auto& scores = r.array("scores");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    ObjectReader sr(scores[i], index("scores", i));
    AccuracyScore s;
    s.farm_id = static_cast<std::size_t>(sr.unsigned_integer("farm_id", std::nullopt));
    s.accuracy = sr.number("accuracy");
    check_unit(s.accuracy, sr.path("accuracy"));
    sr.finish();
    rep.scores.push_back(s);
  }

  if (const auto& cj = r.raw("clustering"); !cj.is_null()) {
    ObjectReader cr(cj, "clustering");
    Clustering c;
    c.k = static_cast<std::size_t>(cr.unsigned_integer("k", std::nullopt));
    c.centroids = read_numbers<double>(cr.array("centroids"), cr.path("centroids"));
    c.assignment = read_numbers<std::size_t>(cr.array("assignment"), cr.path("assignment"));
    c.inertia = cr.number("inertia");
    cr.finish();
    rep.clustering = std::move(c);
  }

  if (const auto& aj = r.raw("assignment"); !aj.is_null()) {
    ObjectReader ar(aj, "assignment");
    BlocAssignment a;
    const auto& blocs = ar.array("blocs");
    for (std::size_t i = 0; i < blocs.size(); ++i) {
      ObjectReader br(blocs[i], index(ar.path("blocs"), i));
      Bloc b;
      b.cluster = static_cast<std::size_t>(br.unsigned_integer("cluster", std::nullopt));
      b.members = read_numbers<std::size_t>(br.array("members"), br.path("members"));
      b.coop_accuracy = br.number("coop_accuracy");
      br.finish();
      a.blocs.push_back(std::move(b));
    }
    a.strategy_of = read_strategies(ar.raw("strategy_of"), ar.path("strategy_of"));
    ar.finish();
    rep.assignment = std::move(a);
  }

  if (const auto& ej = r.raw("equilibrium"); !ej.is_null()) rep.equilibrium = read_equilibrium(ej, "equilibrium");

  const auto& rounds = r.array("rounds");
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    ObjectReader tr(rounds[i], index("rounds", i));
    RoundTrace t;
    t.round = to_int(tr.integer("round"), tr.path("round"));
    t.strategy_of = read_strategies(tr.raw("strategy_of"), tr.path("strategy_of"));
    t.payoffs = read_numbers<double>(tr.array("payoffs"), tr.path("payoffs"));
    t.defections_this_round = read_numbers<std::size_t>(tr.array("defections"), tr.path("defections"));
    tr.finish();
    rep.rounds.push_back(std::move(t));
  }
  r.finish();
  return rep;
}

}  // namespace

void validate_scenario(const ScenarioConfig& c) {
  if (c.farms.empty()) invalid("farms", "at least one farm is required");
  for (std::size_t i = 0; i < c.farms.size(); ++i) {
    const auto base = index("farms", i);
    const auto& f = c.farms[i];
    if (f.device_count < 1) invalid(base + ".device_count", "must be >= 1");
    check_unit(f.quality, base + ".quality");
    if (f.corruption) check_unit(f.corruption->rate, base + ".corruption.rate");
  }
  check_nonneg(c.costs.membership, "costs.membership");
  check_nonneg(c.costs.penalty, "costs.penalty");
  check_nonneg(c.costs.upload_comm, "costs.upload_comm");
  check_nonneg(c.costs.download_comm, "costs.download_comm");
  check_nonneg(c.costs.storage, "costs.storage");
  check_nonneg(c.costs.local_compute, "costs.local_compute");

  const auto& p = c.payoff;
  if (!(std::isfinite(p.benefit_coefficient) && p.benefit_coefficient > 0.0))
    invalid("payoff.benefit_coefficient", "must be > 0");
  check_unit(p.accuracy_model.a_min, "payoff.a_min");
  check_unit(p.accuracy_model.a_max, "payoff.a_max");
  if (!(p.accuracy_model.a_max > p.accuracy_model.a_min)) invalid("payoff.a_max", "must exceed a_min");
  if (!(std::isfinite(p.accuracy_model.volume_scale) && p.accuracy_model.volume_scale > 0.0))
    invalid("payoff.volume_scale", "must be > 0");

  if (c.pipeline.k < 1) invalid("pipeline.k", "must be >= 1");
  if (c.pipeline.restarts < 1) invalid("pipeline.restarts", "must be >= 1");
  if (!(std::isfinite(c.pipeline.lambda_reg) && c.pipeline.lambda_reg > 0.0))
    invalid("pipeline.lambda_reg", "must be > 0");
  if (c.pipeline.classifier_steps < 1) invalid("pipeline.classifier_steps", "must be >= 1");
  if (c.pipeline.gen.records_per_device < 1) invalid("pipeline.records_per_device", "must be >= 1");
  if (c.pipeline.gen.golden_records < 2 || c.pipeline.gen.golden_records % 2 != 0)
    invalid("pipeline.golden_records", "must be an even number >= 2");

  if (c.dynamics.rounds < 1) invalid("dynamics.rounds", "must be >= 1");
  check_nonneg(c.dynamics.epsilon, "dynamics.epsilon");
}

ScenarioConfig parse_scenario(const std::string& text) { return read_scenario(parse_strict(text), ""); }

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(ScenarioErrorKind::missing_file, "", path.string() + ": cannot open scenario");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const ScenarioConfig& config) { return scenario_json(config).dump(2) + "\n"; }

std::string report_to_json(const SimulationReport& report) { return report_json(report).dump(2) + "\n"; }

SimulationReport parse_report(const std::string& text) { return read_report(parse_strict(text)); }

SimulationReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(ScenarioErrorKind::missing_file, "", path.string() + ": cannot open report");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_report(buf.str());
}

std::string scores_csv(const SimulationReport& report) {
  std::ostringstream out;
  out << "farm_id,device_count,quality,local_accuracy,scored_accuracy,cluster,strategy\n";
  for (const auto& f : report.farms) {
    out << f.id << ',' << f.device_count << ',' << format_double(f.quality) << ','
        << format_double(f.local_accuracy) << ',';
    const auto score = std::find_if(report.scores.begin(), report.scores.end(),
                                    [&](const AccuracyScore& s) { return s.farm_id == f.id; });
    if (score != report.scores.end()) out << format_double(score->accuracy);
    out << ',';
    if (report.clustering && f.id < report.clustering->assignment.size())
      out << report.clustering->assignment[f.id];
    out << ',';
    if (report.assignment && f.id < report.assignment->strategy_of.size())
      out << to_string(report.assignment->strategy_of[f.id]);
    out << '\n';
  }
  return out.str();
}

std::string rounds_csv(const SimulationReport& report) {
  std::ostringstream out;
  out << "round,farm_id,strategy,payoff,defected\n";
  for (const auto& t : report.rounds) {
    for (std::size_t i = 0; i < t.strategy_of.size(); ++i) {
      const bool left = std::find(t.defections_this_round.begin(), t.defections_this_round.end(), i) !=
                        t.defections_this_round.end();
      out << t.round << ',' << i << ',' << to_string(t.strategy_of[i]) << ',' << format_double(t.payoffs[i])
          << ',' << (left ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ReportFiles write_report(const SimulationReport& report, const std::filesystem::path& path,
                         bool with_csv) {
  ReportFiles files;
  files.json = path;
  write_text_file(path, report_to_json(report));
  if (with_csv) {
    const auto dir = path.parent_path();
    const auto stem = path.stem().string();
    files.scores_csv = dir / (stem + "_scores.csv");
    files.rounds_csv = dir / (stem + "_rounds.csv");
    write_text_file(*files.scores_csv, scores_csv(report));
    write_text_file(*files.rounds_csv, rounds_csv(report));
  }
  return files;
}

}  // namespace coopfarm
