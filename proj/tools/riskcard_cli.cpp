#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "riskcard/config.hpp"
#include "riskcard/csv.hpp"
#include "riskcard/error.hpp"
#include "riskcard/metrics.hpp"
#include "riskcard/pipeline.hpp"
#include "riskcard/random.hpp"
#include "riskcard/scorecard.hpp"
#include "riskcard/synth.hpp"

using namespace riskcard;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw DataError("write to '" + path + "' failed");
}

// FNV-1a of the file bytes.
std::string file_fingerprint(const std::string& path) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : read_file(path)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string number_token(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

struct Manifest {
  std::string path;
  json doc;

  void input(const std::string& role, const std::string& file) {
    doc["inputs"][role] = {{"path", file}, {"fingerprint", file_fingerprint(file)}};
  }
  void output(const std::string& role, const std::string& file) {
    doc["outputs"][role] = {{"path", file}, {"fingerprint", file_fingerprint(file)}};
  }
  void write() const {
    if (!path.empty()) write_file(path, doc.dump(2) + "\n");
  }
};

Manifest start_manifest(const std::string& command, const std::string& path, int argc,
                        char** argv) {
  Manifest m;
  m.path = path;
  m.doc = {{"command", command},
           {"argv", std::vector<std::string>(argv, argv + argc)},
           {"inputs", json::object()},
           {"outputs", json::object()}};
  return m;
}

struct CardSource {
  std::string card_path;
  std::string pool_path;
  std::size_t index = 0;

  void add_options(CLI::App* app) {
    auto* card = app->add_option("--card", card_path, "Scorecard document");
    auto* pool = app->add_option("--pool", pool_path, "Pool document");
    app->add_option("--index", index, "Card index inside the pool")->needs(pool);
    card->excludes(pool);
  }

  Scorecard load(Manifest& manifest) const {
    if (!card_path.empty()) {
      manifest.input("card", card_path);
      return deserialize(read_file(card_path));
    }
    if (pool_path.empty()) throw CLI::RequiredError("--card or --pool");
    manifest.input("pool", pool_path);
    const std::string text = read_file(pool_path);
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError("byte " + std::to_string(e.byte), "malformed pool document");
    }
    return card_from_pool(doc, index);
  }
};

RawDataset load_dataset(const std::string& path, const std::optional<std::string>& label) {
  return to_raw_dataset(read_csv_file(path), label);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse integer risk scorecards"};
  app.require_subcommand(1);
  std::string manifest_path;
  app.add_option("--manifest", manifest_path,
                 "Manifest path (default: <output>.manifest.json when an output is written)");

  // train
  auto* train_cmd = app.add_subcommand("train", "Learn a pool of scorecards from a CSV file");
  std::string train_data, train_out, config_path, schema_path;
  RunConfig config;
  std::optional<std::size_t> f_lambda, f_gamma, f_bins, f_beam, f_T, f_M, f_Nm, f_passes, f_cv;
  std::optional<std::uint64_t> f_seed;
  std::optional<double> f_eps, f_val, f_lower, f_upper;
  std::optional<std::string> f_label;
  std::optional<unsigned> f_threads;
  train_cmd->add_option("--data", train_data, "Training CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_out, "Pool document to write")->required();
  train_cmd->add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  train_cmd->add_option("--schema", schema_path, "Variable kind sidecar")->check(CLI::ExistingFile);
  train_cmd->add_option("--label", f_label, "Label column");
  train_cmd->add_option("--lambda", f_lambda, "Maximum nonzero coefficients");
  train_cmd->add_option("--gamma", f_gamma, "Maximum variables used");
  train_cmd->add_option("--seed", f_seed, "Random seed");
  train_cmd->add_option("--bins", f_bins, "Quantile bins per continuous variable");
  train_cmd->add_option("--beam-width", f_beam, "Beam width B");
  train_cmd->add_option("--epsilon", f_eps, "Pool loss tolerance");
  train_cmd->add_option("--swap-candidates", f_T, "Swap candidates T per removed coordinate");
  train_cmd->add_option("--pool-size", f_M, "Pool size M");
  train_cmd->add_option("--multipliers", f_Nm, "Multiplier grid size");
  train_cmd->add_option("--swap-passes", f_passes, "Swap passes");
  train_cmd->add_option("--cv-folds", f_cv, "Cross-validation folds (0 disables)");
  train_cmd->add_option("--validation-fraction", f_val, "Held-out validation fraction");
  train_cmd->add_option("--box-lower", f_lower, "Default coefficient lower bound");
  train_cmd->add_option("--box-upper", f_upper, "Default coefficient upper bound");
  train_cmd->add_option("--threads", f_threads, "Worker threads (0 = all cores)");

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Append a risk column to a CSV file");
  CardSource predict_src;
  predict_src.add_options(predict_cmd);
  std::string predict_data, predict_out;
  predict_cmd->add_option("--data", predict_data, "Input CSV")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", predict_out, "Output CSV (default: stdout)");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Compute metrics of a card on labelled data");
  CardSource eval_src;
  eval_src.add_options(eval_cmd);
  std::string eval_data, eval_out, eval_label = "y";
  std::optional<std::size_t> calibrate;
  std::uint64_t eval_seed = 0;
  eval_cmd->add_option("--data", eval_data, "Labelled CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--label", eval_label, "Label column")->capture_default_str();
  eval_cmd->add_option("--calibrate", calibrate,
                       "Fit isotonic calibration on this many rows, evaluate on the rest");
  eval_cmd->add_option("--seed", eval_seed, "Seed for the calibration split")->capture_default_str();
  eval_cmd->add_option("--out", eval_out, "Report document (default: stdout)");
  std::string calibrated_out;
  eval_cmd->add_option("--calibrated-card", calibrated_out, "Write the calibrated card here");

  // render
  auto* render_cmd = app.add_subcommand("render", "Print a scorecard");
  CardSource render_src;
  render_src.add_options(render_cmd);
  bool render_json = false;
  render_cmd->add_flag("--json", render_json, "Print the machine-readable document instead");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Sample labelled data from a ground-truth card");
  std::string synth_spec, synth_out, synth_truth;
  std::size_t synth_n = 0, synth_noise = 0;
  std::uint64_t synth_seed = 0;
  auto* seed_opt = synth_cmd->add_option("--seed", synth_seed, "Random seed");
  seed_opt->required();
  synth_cmd->add_option("--spec", synth_spec, "Ground-truth spec (JSON); default is the built-in 10-variable card")
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--n", synth_n, "Rows to sample")->required();
  synth_cmd->add_option("--noise", synth_noise, "Extra noise variables (built-in spec only)");
  synth_cmd->add_option("--out", synth_out, "CSV to write")->required();
  synth_cmd->add_option("--truth", synth_truth, "Write the true card and true risks here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*train_cmd) {
      if (!config_path.empty()) load_config_file(config_path, config);
      if (!schema_path.empty()) load_schema_file(schema_path, config);
      if (f_label) config.label = *f_label;
      if (f_lambda) config.lambda = *f_lambda;
      if (f_gamma) config.gamma = *f_gamma;
      if (f_seed) config.seed = *f_seed;
      if (f_bins) config.bins_per_variable = *f_bins;
      if (f_beam) config.beam_width = *f_beam;
      if (f_eps) config.epsilon_u = *f_eps;
      if (f_T) config.swap_candidates = *f_T;
      if (f_M) config.pool_size = *f_M;
      if (f_Nm) config.multipliers = *f_Nm;
      if (f_passes) config.swap_passes = *f_passes;
      if (f_cv) config.cv_folds = *f_cv;
      if (f_val) config.validation_fraction = *f_val;
      if (f_lower) config.box.lower = *f_lower;
      if (f_upper) config.box.upper = *f_upper;
      if (f_threads) config.threads = *f_threads;
      check(config);

      Manifest manifest = start_manifest(
          "train", manifest_path.empty() ? train_out + ".manifest.json" : manifest_path, argc,
          argv);
      manifest.input("data", train_data);
      if (!config_path.empty()) manifest.input("config", config_path);
      if (!schema_path.empty()) manifest.input("schema", schema_path);
      const RawDataset data = load_dataset(train_data, config.label);
      const TrainResult result = train(data, config);
      write_file(train_out, pool_document(result).dump(2) + "\n");
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << summary_table(result);
      manifest.doc["config"] = to_json(config);
      manifest.doc["seed"] = *config.seed;
      manifest.doc["threads"] = config.threads;
      manifest.output("pool", train_out);
      manifest.write();
      return kOk;
    }

    if (*predict_cmd) {
      Manifest manifest = start_manifest(
          "predict",
          manifest_path.empty() && !predict_out.empty() ? predict_out + ".manifest.json"
                                                         : manifest_path,
          argc, argv);
      const Scorecard card = predict_src.load(manifest);
      manifest.input("data", predict_data);
      CsvTable table = read_csv_file(predict_data);
      const RawDataset data = to_raw_dataset(table, std::nullopt);
      const auto risk = predict_risk(card, data);
      table.header.push_back("risk");
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        table.rows[i].push_back(number_token(risk[i]));
      }
      if (predict_out.empty()) {
        write_csv(std::cout, table);
      } else {
        std::ostringstream buf;
        write_csv(buf, table);
        write_file(predict_out, buf.str());
        manifest.output("predictions", predict_out);
      }
      manifest.write();
      return kOk;
    }

    if (*eval_cmd) {
      Manifest manifest = start_manifest(
          "evaluate",
          manifest_path.empty() && !eval_out.empty() ? eval_out + ".manifest.json"
                                                      : manifest_path,
          argc, argv);
      Scorecard card = eval_src.load(manifest);
      manifest.input("data", eval_data);
      RawDataset data = load_dataset(eval_data, eval_label);
      json report;
      if (calibrate) {
        const std::size_t n = data.num_rows();
        if (*calibrate == 0) throw ConfigError("--calibrate needs at least one row");
        if (*calibrate >= n) {
          throw ConfigError("--calibrate " + std::to_string(*calibrate) +
                            " leaves no rows to evaluate (dataset has " + std::to_string(n) +
                            ")");
        }
        Rng rng(eval_seed);
        const auto order = permutation(rng, n);
        std::vector<std::size_t> fit_rows(order.begin(), order.begin() + *calibrate);
        std::vector<std::size_t> test_rows(order.begin() + *calibrate, order.end());
        std::sort(fit_rows.begin(), fit_rows.end());
        std::sort(test_rows.begin(), test_rows.end());
        const RawDataset fit_set = data.subset(fit_rows);
        card.calibration.reset();
        card.calibration = fit_isotonic(predict_risk(card, fit_set), fit_set.labels01());
        data = data.subset(test_rows);
        report["calibration_rows"] = *calibrate;
        manifest.doc["seed"] = eval_seed;
        if (!calibrated_out.empty()) write_file(calibrated_out, serialize(card));
      }
      const auto probs = predict_risk(card, data);
      const auto labels = data.labels01();
      report["card"] = card.name;
      report["metrics"] = to_json(evaluate(labels, probs));
      report["sparsity"] = to_json(sparsity(card));
      const std::string text = report.dump(2) + "\n";
      if (eval_out.empty()) {
        std::cout << text;
      } else {
        write_file(eval_out, text);
        manifest.output("report", eval_out);
      }
      if (!calibrated_out.empty() && calibrate) manifest.output("calibrated_card", calibrated_out);
      manifest.write();
      return kOk;
    }

    if (*render_cmd) {
      Manifest manifest = start_manifest("render", manifest_path, argc, argv);
      const Scorecard card = render_src.load(manifest);
      std::cout << (render_json ? serialize(card) : render_scorecard(card));
      manifest.write();
      return kOk;
    }

    if (*synth_cmd) {
      Manifest manifest = start_manifest(
          "synth", manifest_path.empty() ? synth_out + ".manifest.json" : manifest_path, argc,
          argv);
      SynthSpec spec;
      if (synth_spec.empty()) {
        spec = reference_synth_spec(synth_noise);
      } else {
        manifest.input("spec", synth_spec);
        const std::string text = read_file(synth_spec);
        json doc;
        try {
          doc = json::parse(text);
        } catch (const json::parse_error& e) {
          throw ParseError("byte " + std::to_string(e.byte), "malformed synth spec");
        }
        spec = synth_spec_from_json(doc);
      }
      const SynthResult result = synthesize(spec, synth_n, synth_seed);
      std::ostringstream csv;
      write_dataset_csv(csv, result.data, spec.label);
      write_file(synth_out, csv.str());
      manifest.doc["seed"] = synth_seed;
      manifest.doc["spec"] = to_json(spec);
      manifest.output("data", synth_out);
      if (!synth_truth.empty()) {
        json truth{{"card", to_json(result.truth)}, {"true_risk", result.true_risk}};
        write_file(synth_truth, truth.dump(2) + "\n");
        manifest.output("truth", synth_truth);
      }
      manifest.write();
      return kOk;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
