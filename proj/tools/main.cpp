// Command line front end: dataset generation and ingestion plus the
// studies built on the library (AGC ambiguity, environment transfer,
// two-phase ranging). Output files are pure functions of config and
// seed, so identical invocations are byte-comparable.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "uwbrss/channel_sim.hpp"
#include "uwbrss/dataset.hpp"
#include "uwbrss/errors.hpp"
#include "uwbrss/evaluation.hpp"
#include "uwbrss/features.hpp"
#include "uwbrss/protocol.hpp"
#include "uwbrss/regressors.hpp"

namespace {

using nlohmann::ordered_json;
using namespace uwbrss;

// Domain separation for the per-trial RNG streams of protocol-bench.
constexpr std::uint64_t kTrialStreamTag = 0xBEEF;

struct GlobalOpts {
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  std::string config_path;
};

std::string out_file(const GlobalOpts& g, const std::string& name) {
  std::filesystem::create_directories(g.out_dir);
  return (std::filesystem::path(g.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write " + path);
  out << content;
}

// --config wins over --preset so one JSON file can pin a whole scenario.
SimPreset resolve_sim(const GlobalOpts& g, const std::string& preset_name) {
  if (!g.config_path.empty()) return load_sim_config(g.config_path, g.seed);
  return preset(preset_name, g.seed);
}

// The studies keep their fixed environment presets, but --config may still
// reshape the simulated scenario (distances, gains, packets per cell).
ScenarioConfig study_scenario(const GlobalOpts& g) {
  if (g.config_path.empty()) return ScenarioConfig::defaults(g.seed);
  return load_sim_config(g.config_path, g.seed).scenario;
}

std::map<std::string, std::string> load_mapping(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
    return j.get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Dataset load_input(const std::string& input, const std::string& mapping_path) {
  if (mapping_path.empty()) return load_csv(input);
  return load_csv(input, load_mapping(mapping_path));
}

RegressorParams parse_params(const std::vector<std::string>& kv) {
  RegressorParams params;
  for (const auto& item : kv) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--param expects key=value, got '" + item + "'");
    params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return params;
}

std::size_t delivered_count(const Dataset& ds) {
  std::size_t n = 0;
  for (const auto& rec : ds.records()) n += rec.delivered ? 1 : 0;
  return n;
}

ordered_json report_cell(const EvalReport& report) {
  return ordered_json::parse(report_to_json(report));
}

int run_simulate(const GlobalOpts& g, const std::string& preset_name) {
  SimPreset p = resolve_sim(g, preset_name);
  Dataset ds = simulate(p.env, p.rx, p.scenario);
  std::string path = out_file(g, "dataset.csv");
  save_csv(ds, path);
  std::cout << ds.size() << " records (" << delivered_count(ds)
            << " delivered) -> " << path << "\n";
  return 0;
}

int run_ingest(const GlobalOpts& g, const std::string& input,
               const std::string& mapping_path) {
  Dataset ds = load_input(input, mapping_path);
  std::string path = out_file(g, "dataset.csv");
  save_csv(ds, path);
  std::cout << ds.size() << " records (" << delivered_count(ds)
            << " delivered) -> " << path << "\n";
  return 0;
}

// 2x2 study: does the regressor see the transmit gain, and is the AGC
// hiding it? Both simulations share the seed so the channels match.
int run_agc_study(const GlobalOpts& g, double train_fraction) {
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"agc_off", "hallway_agc_off"}, {"agc_on", "hallway_agc_on"}};
  const std::vector<std::string> feature_sets = {"fppl_gain", "fppl_only"};

  ordered_json cells = ordered_json::object();
  std::map<std::string, double> table;
  for (const auto& [row_label, preset_name] : rows) {
    SimPreset p = preset(preset_name, g.seed);
    p.scenario = study_scenario(g);
    Dataset ds = simulate(p.env, p.rx, p.scenario);
    for (const auto& features : feature_sets) {
      EvalReport report =
          split_evaluation(ds, FeatureSpec::preset(features),
                           regressor_factory("knn"), train_fraction, g.seed);
      std::string label = row_label + "/" + features;
      cells[label] = report_cell(report);
      table[label] = report.averaged_mae;
    }
  }

  ordered_json doc;
  doc["model"] = "knn";
  doc["seed"] = g.seed;
  doc["train_fraction"] = train_fraction;
  doc["cells"] = cells;
  std::string path = out_file(g, "agc_study.json");
  write_text(path, doc.dump(2) + "\n");

  std::cout << "averaged MAE (m)  fppl_gain  fppl_only\n";
  for (const auto& [row_label, preset_name] : rows) {
    std::cout << std::left << std::setw(18) << row_label;
    for (const auto& features : feature_sets)
      std::cout << std::setw(11) << std::setprecision(4)
                << table.at(row_label + "/" + features);
    std::cout << "\n";
  }
  std::cout << "-> " << path << "\n";
  return 0;
}

int run_transfer(const GlobalOpts& g, bool ablation, bool loo,
                 double train_fraction) {
  std::map<std::string, Dataset> sets;
  for (const auto& [name, offset] :
       std::map<std::string, std::uint64_t>{{"hallway_agc_off", 0},
                                            {"hall_agc_off", 1}}) {
    SimPreset p = preset(name, g.seed + offset);
    p.scenario = study_scenario(g);
    p.scenario.seed = g.seed + offset;
    sets[p.env.name] = simulate(p.env, p.rx, p.scenario);
  }

  FeatureSpec spec = FeatureSpec::preset(ablation ? "cir32_nogain" : "cir32_gain");
  TransferStudy study = transfer_study(sets, sets, spec,
                                       regressor_factory("knn"), train_fraction,
                                       g.seed);

  std::string json_path = out_file(g, "transfer.json");
  write_text(json_path, transfer_to_json(study));
  write_text(out_file(g, "transfer.csv"), transfer_to_csv(study));

  if (loo) {
    for (const auto& [env, ds] : sets) {
      EvalReport report = loo_distance_cv(ds, spec, regressor_factory("knn"));
      write_text(out_file(g, "loo_" + env + ".json"), report_to_json(report));
    }
  }

  std::cout << "averaged MAE (m), train row -> test column\n";
  std::cout << std::left << std::setw(10) << "";
  for (const auto& env : study.envs) std::cout << std::setw(10) << env;
  std::cout << "\n";
  for (const auto& train_env : study.envs) {
    std::cout << std::setw(10) << train_env;
    for (const auto& test_env : study.envs)
      std::cout << std::setw(10) << std::setprecision(4)
                << study.cells.at({train_env, test_env}).averaged_mae;
    std::cout << "\n";
  }
  std::cout << "-> " << json_path << "\n";
  return 0;
}

int run_protocol_bench(const GlobalOpts& g, int trials) {
  if (trials < 1) throw ConfigError("--trials must be >= 1");

  SimPreset p = preset("hallway_agc_off", g.seed);
  p.scenario = study_scenario(g);
  Dataset train = simulate(p.env, p.rx, p.scenario);
  RangingSession session = calibrate(train, FeatureSpec::preset("fppl_gain"),
                                     regressor_factory("knn"));

  std::string csv =
      "true_distance_m,coarse_m,refined_m,gain_used_db,"
      "phase1_delivered,phase2_delivered\n";
  int sounding_lost = 0, refine_failed = 0;
  long total_retries = 0;
  double coarse_abs = 0.0, refined_abs = 0.0;
  std::size_t scored = 0;
  for (int i = 0; i < trials; ++i) {
    Rng rng = Rng::substream(g.seed, kTrialStreamTag,
                             static_cast<std::uint64_t>(i), 0);
    double d = rng.uniform(0.5, 6.5);
    try {
      EstimateResult res = estimate(session, p.env, p.rx, d, rng);
      total_retries += res.retries;
      if (res.refined_delivered) {
        ++scored;
        coarse_abs += std::abs(res.coarse_m - d);
        refined_abs += std::abs(res.refined_m - d);
        csv += format_double(d) + "," + format_double(res.coarse_m) + "," +
               format_double(res.refined_m) + "," +
               format_double(res.gain_used_db) + ",1,1\n";
      } else {
        ++refine_failed;
        csv += format_double(d) + "," + format_double(res.coarse_m) + ",,,1,0\n";
      }
    } catch (const SoundingLost&) {
      ++sounding_lost;
      csv += format_double(d) + ",,,,0,0\n";
    }
  }

  // MAEs compare the two phases on the trials where both delivered.
  double coarse_mae = scored ? coarse_abs / static_cast<double>(scored) : 0.0;
  double refined_mae = scored ? refined_abs / static_cast<double>(scored) : 0.0;

  ordered_json summary;
  summary["trials"] = trials;
  summary["scored_trials"] = scored;
  summary["sounding_lost"] = sounding_lost;
  summary["refine_failed"] = refine_failed;
  summary["total_retries"] = total_retries;
  summary["coarse_mae"] = coarse_mae;
  summary["refined_mae"] = refined_mae;
  summary["improvement_m"] = coarse_mae - refined_mae;
  std::string path = out_file(g, "protocol_summary.json");
  write_text(path, summary.dump(2) + "\n");
  write_text(out_file(g, "protocol_trials.csv"), csv);

  std::cout << "coarse MAE " << std::setprecision(4) << coarse_mae
            << " m, refined MAE " << refined_mae << " m over " << scored
            << " of " << trials << " trials\n-> " << path << "\n";
  return 0;
}

int run_report(const GlobalOpts& g, const std::string& input,
               const std::string& mapping_path, const std::string& features,
               const std::string& model, const std::vector<std::string>& kv,
               double train_fraction) {
  Dataset ds = load_input(input, mapping_path);
  EvalReport report = split_evaluation(ds, FeatureSpec::preset(features),
                                       regressor_factory(model, parse_params(kv)),
                                       train_fraction, g.seed);
  std::string json_path = out_file(g, "report.json");
  write_text(json_path, report_to_json(report));
  write_text(out_file(g, "report.csv"), report_to_csv(report));
  std::cout << "averaged MAE " << std::setprecision(4) << report.averaged_mae
            << " m, overall MAE " << report.overall_mae << " m over "
            << report.n_test << " test rows\n-> " << json_path << "\n";
  return 0;
}

std::string joined(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signal-strength UWB ranging: simulation, models, studies"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "base RNG seed")->capture_default_str();
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--config", g.config_path,
                 "JSON simulation config (overrides --preset)");

  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset CSV");
  sim->fallthrough();
  std::string sim_preset = "hallway_agc_off";
  sim->add_option("--preset", sim_preset, "one of: " + joined(preset_names()))
      ->capture_default_str();

  auto* ing = app.add_subcommand("ingest",
                                 "convert a foreign CSV to the canonical schema");
  ing->fallthrough();
  std::string ing_input, ing_mapping;
  ing->add_option("--input", ing_input, "CSV to ingest")->required();
  ing->add_option("--mapping", ing_mapping,
                  "JSON object renaming foreign columns to canonical ones");

  auto* agc = app.add_subcommand(
      "agc-study", "distance error with and without AGC and gain knowledge");
  agc->fallthrough();
  double agc_fraction = 0.75;
  agc->add_option("--train-fraction", agc_fraction, "train split fraction")
      ->capture_default_str();

  auto* tra = app.add_subcommand("transfer",
                                 "cross-environment train/test error matrix");
  tra->fallthrough();
  bool tra_ablation = false, tra_loo = false;
  double tra_fraction = 0.75;
  tra->add_flag("--ablation", tra_ablation, "drop the gain feature");
  tra->add_flag("--loo", tra_loo,
                "also run leave-one-distance-out CV per environment");
  tra->add_option("--train-fraction", tra_fraction, "train split fraction")
      ->capture_default_str();

  auto* pb = app.add_subcommand("protocol-bench",
                                "two-phase ranging accuracy over random trials");
  pb->fallthrough();
  int pb_trials = 1000;
  pb->add_option("--trials", pb_trials, "number of ranging trials")
      ->capture_default_str();

  auto* rep = app.add_subcommand("report", "train/test report for one dataset");
  rep->fallthrough();
  std::string rep_input, rep_mapping, rep_model = "knn";
  std::string rep_features = "fppl_gain";
  std::vector<std::string> rep_params;
  double rep_fraction = 0.75;
  rep->add_option("--input", rep_input, "canonical CSV")->required();
  rep->add_option("--mapping", rep_mapping,
                  "JSON object renaming foreign columns to canonical ones");
  rep->add_option("--features", rep_features,
                  "one of: " + joined(FeatureSpec::preset_names()))
      ->capture_default_str();
  rep->add_option("--model", rep_model,
                  "one of: " + joined(registered_regressors()))
      ->capture_default_str();
  rep->add_option("--param", rep_params, "regressor parameter key=value");
  rep->add_option("--train-fraction", rep_fraction, "train split fraction")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(g, sim_preset);
    if (ing->parsed()) return run_ingest(g, ing_input, ing_mapping);
    if (agc->parsed()) return run_agc_study(g, agc_fraction);
    if (tra->parsed()) return run_transfer(g, tra_ablation, tra_loo, tra_fraction);
    if (pb->parsed()) return run_protocol_bench(g, pb_trials);
    if (rep->parsed())
      return run_report(g, rep_input, rep_mapping, rep_features, rep_model,
                        rep_params, rep_fraction);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
