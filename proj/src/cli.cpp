#include "kanfis/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "kanfis/baseline.hpp"
#include "kanfis/error.hpp"
#include "kanfis/format.hpp"
#include "kanfis/metrics.hpp"
#include "kanfis/synthetic.hpp"

namespace kanfis {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"data",
       {"path", "target", "task", "train_fraction", "split_seed", "stratify", "synthetic", "rows", "features",
        "noise", "generator_seed"}},
      {"model", {"rules", "bases", "family", "it2", "mask_init"}},
      {"train",
       {"epochs", "batch_size", "learning_rate", "lambda_s", "lambda_d", "seed", "warmup", "standardize_target"}},
      {"output", {"dir", "threshold"}},
  };
  return keys;
}

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(what + ": expected a number, got '" + s + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(what + ": expected a nonnegative integer, got '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ConfigError(what + ": expected true or false, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    parts.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return parts;
}

TaskKind to_task(const std::string& s, const std::string& what) {
  if (s == "regression") return TaskKind::Regression;
  if (s == "classification") return TaskKind::Classification;
  throw ConfigError(what + ": expected regression or classification, got '" + s + "'");
}

std::string_view task_name(TaskKind k) { return k == TaskKind::Regression ? "regression" : "classification"; }

fs::path resolve(const fs::path& base, const std::string& value) {
  const fs::path p(value);
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// Column order of `ds` must match the model; classification labels are
// renumbered to the model's class list.
void align_to_model(Dataset& ds, const ModelMetadata& meta, const KanfisModel& model) {
  if (ds.feature_names != meta.feature_names) {
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& n : v) s += (s.empty() ? "" : ",") + n;
      return s;
    };
    throw ShapeError("model expects " + std::to_string(model.input_dim()) + " features [" +
                     join(meta.feature_names) + "] but data has " + std::to_string(ds.features()) + " [" +
                     join(ds.feature_names) + "]");
  }
  if (!model.task().is_classification()) return;
  std::vector<std::size_t> remap(ds.class_names.size());
  for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
    const auto it = std::find(meta.class_names.begin(), meta.class_names.end(), ds.class_names[c]);
    if (it == meta.class_names.end()) throw LabelError("label '" + ds.class_names[c] + "' is unknown to the model");
    remap[c] = static_cast<std::size_t>(it - meta.class_names.begin());
  }
  for (std::size_t r = 0; r < ds.size(); ++r) ds.y(r, 0) = static_cast<double>(remap[static_cast<std::size_t>(ds.y(r, 0))]);
  ds.class_names = meta.class_names;
}

MetricList evaluate(const KanfisModel& model, const Matrix& x, const Dataset& ds, const std::string& prefix) {
  MetricList m;
  if (model.task().is_classification()) {
    const ClassPrediction p = predict_class(model, x);
    const ClassificationMetrics c = metrics_classification(p.probabilities, p.labels, ds.labels());
    m.emplace_back(prefix + "accuracy", c.accuracy);
    m.emplace_back(prefix + "f1", c.f1);
    m.emplace_back(prefix + "auroc", c.auroc);
  } else {
    const Matrix pred = model_forward(model, x).prediction;
    const RegressionMetrics r = metrics_regression(pred.values(), ds.y.values());
    m.emplace_back(prefix + "rmse", r.rmse);
    m.emplace_back(prefix + "mae", r.mae);
    if (r.mape) m.emplace_back(prefix + "mape", *r.mape);
  }
  return m;
}

std::string metrics_text(const MetricList& metrics) {
  std::string s;
  for (const auto& [k, v] : metrics) s += k + "=" + format_double(v) + "\n";
  return s;
}

std::string metrics_json(const MetricList& metrics) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metrics) j[k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json();
  return j.dump(1) + "\n";
}

Dataset load_dataset(const DataConfig& d) {
  if (d.synthetic == "sparse") return make_sparse_regression(d.rows, d.features, d.noise, d.generator_seed);
  if (d.synthetic == "sine") return make_sine(d.rows);
  return load_csv(d.path, d.target, d.task);
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const fs::path& base_dir) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(in, pt);
  } catch (const boost::property_tree::ptree_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  bool have_path = false;
  for (const auto& [section, body] : pt) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' appears outside a section");
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, node] : body) {
      if (!known->second.count(key)) throw ConfigError("config: unknown key " + where(section, key));
      const std::string v = node.get_value<std::string>();
      const std::string w = where(section, key);
      if (section == "data") {
        auto& d = cfg.data;
        if (key == "path") {
          have_path = !v.empty();
          d.path = v.empty() ? fs::path() : resolve(base_dir, v);
        } else if (key == "target") {
          d.target = v;
        } else if (key == "task") {
          d.task = to_task(v, w);
        } else if (key == "train_fraction") {
          d.split.train_fraction = to_double(v, w);
        } else if (key == "split_seed") {
          d.split.seed = to_u64(v, w);
        } else if (key == "stratify") {
          d.split.stratify = to_bool(v, w);
        } else if (key == "synthetic") {
          if (v != "none" && v != "sparse" && v != "sine") throw ConfigError(w + ": expected none, sparse or sine");
          d.synthetic = v;
        } else if (key == "rows") {
          d.rows = to_u64(v, w);
        } else if (key == "features") {
          d.features = to_u64(v, w);
        } else if (key == "noise") {
          d.noise = to_double(v, w);
        } else {
          d.generator_seed = to_u64(v, w);
        }
      } else if (section == "model") {
        auto& s = cfg.train.shape;
        if (key == "rules") {
          s.widths.clear();
          for (const auto& part : split_list(v)) s.widths.push_back(to_u64(part, w));
        } else if (key == "bases") {
          s.bases_per_edge = to_u64(v, w);
        } else if (key == "family") {
          s.family = parse_family(v);
        } else if (key == "it2") {
          s.it2 = to_bool(v, w);
        } else {
          cfg.train.mask_init = to_double(v, w);
        }
      } else if (section == "train") {
        auto& t = cfg.train;
        if (key == "epochs") t.epochs = to_u64(v, w);
        else if (key == "batch_size") t.batch_size = to_u64(v, w);
        else if (key == "learning_rate") t.learning_rate = to_double(v, w);
        else if (key == "lambda_s") t.lambda_s = to_double(v, w);
        else if (key == "lambda_d") t.lambda_d = to_double(v, w);
        else if (key == "seed") t.seed = to_u64(v, w);
        else if (key == "warmup") t.warmup_fraction = to_double(v, w);
        else t.standardize_target = to_bool(v, w);
      } else {
        if (key == "dir") cfg.output_dir = resolve(base_dir, v);
        else cfg.threshold = to_double(v, w);
      }
    }
  }
  if (cfg.output_dir.is_relative()) cfg.output_dir = resolve(base_dir, cfg.output_dir.string());

  if (cfg.data.synthetic != "none") {
    if (have_path) throw ConfigError("config: [data] path and synthetic are mutually exclusive");
    cfg.data.task = TaskKind::Regression;
    cfg.data.target = "y";
  } else if (!have_path) {
    throw ConfigError("config: [data] needs a path or a synthetic generator");
  }
  if (!(cfg.data.split.train_fraction > 0.0 && cfg.data.split.train_fraction < 1.0)) {
    throw ConfigError("config: [data] train_fraction must lie in (0, 1)");
  }
  if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) throw ConfigError("config: [output] threshold must lie in (0, 1)");
  cfg.train.validate();
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_run_config(in, fs::absolute(path).parent_path());
}

std::string render_run_config(const RunConfig& cfg) {
  const auto& d = cfg.data;
  const auto& t = cfg.train;
  std::string rules;
  for (std::size_t w : t.shape.widths) rules += (rules.empty() ? "" : ",") + std::to_string(w);
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  std::ostringstream o;
  o << "[data]\n"
    << "path = " << d.path.string() << "\n"
    << "target = " << d.target << "\n"
    << "task = " << task_name(d.task) << "\n"
    << "train_fraction = " << format_double(d.split.train_fraction) << "\n"
    << "split_seed = " << d.split.seed << "\n"
    << "stratify = " << b(d.split.stratify) << "\n"
    << "synthetic = " << d.synthetic << "\n"
    << "rows = " << d.rows << "\n"
    << "features = " << d.features << "\n"
    << "noise = " << format_double(d.noise) << "\n"
    << "generator_seed = " << d.generator_seed << "\n\n"
    << "[model]\n"
    << "rules = " << rules << "\n"
    << "bases = " << t.shape.bases_per_edge << "\n"
    << "family = " << to_string(t.shape.family) << "\n"
    << "it2 = " << b(t.shape.it2) << "\n"
    << "mask_init = " << format_double(t.mask_init) << "\n\n"
    << "[train]\n"
    << "epochs = " << t.epochs << "\n"
    << "batch_size = " << t.batch_size << "\n"
    << "learning_rate = " << format_double(t.learning_rate) << "\n"
    << "lambda_s = " << format_double(t.lambda_s) << "\n"
    << "lambda_d = " << format_double(t.lambda_d) << "\n"
    << "seed = " << t.seed << "\n"
    << "warmup = " << format_double(t.warmup_fraction) << "\n"
    << "standardize_target = " << b(t.standardize_target) << "\n\n"
    << "[output]\n"
    << "dir = " << cfg.output_dir.string() << "\n"
    << "threshold = " << format_double(cfg.threshold) << "\n";
  return o.str();
}

RunResult run_experiment(const RunConfig& cfg) {
  const Dataset all = load_dataset(cfg.data);
  const Split split = split_indices(all, cfg.data.split);
  const Dataset train_set = all.subset(split.train);
  const Dataset test_set = all.subset(split.test);
  const Standardizer transform = Standardizer::fit(train_set.x, train_set.feature_names);
  const Matrix x_train = transform.apply(train_set.x);
  const Matrix x_test = transform.apply(test_set.x);

  KanfisModel model = KanfisModel::create(all.features(), cfg.train.shape, all.task,
                                          {cfg.train.seed, cfg.train.mask_init});
  std::optional<ValidationSet> validation;
  if (test_set.size() > 0) validation = ValidationSet{&x_test, &test_set.y};

  RunResult r{SavedModel{model, {all.feature_names, transform, all.target_name, all.class_names}}, {}, {}, {}, 0.0, 0.0};
  r.report = train(model, x_train, train_set.y, cfg.train, validation);
  r.saved.model = model;

  if (test_set.size() > 0) {
    r.metrics = evaluate(model, x_test, test_set, "test_");
    r.val_metric = r.metrics.front().second;
  }
  const MetricList train_metrics = evaluate(model, x_train, train_set, "train_");
  r.metrics.insert(r.metrics.end(), train_metrics.begin(), train_metrics.end());

  std::vector<std::string> outputs = all.class_names;
  if (outputs.empty()) outputs.push_back(all.target_name);
  r.rules = extract_rules(model, x_train, train_set.stats, transform, all.feature_names, outputs, {cfg.threshold});
  r.mean_features_per_rule = feature_count_stats(r.rules).mean;
  r.metrics.emplace_back("mean_features_per_rule", r.mean_features_per_rule);
  if (cfg.train.shape.widths.front() >= 2) {
    r.metrics.emplace_back("mean_pairwise_cosine", mean_pairwise_cosine(model_forward(model, x_train).firing));
  }
  r.metrics.emplace_back("final_loss", r.report.epochs.back().loss.total);
  r.metrics.emplace_back("parameters", static_cast<double>(model.parameter_count()));
  return r;
}

void write_run_outputs(const RunConfig& cfg, const RunResult& result, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  RunConfig effective = cfg;
  effective.output_dir = dir;
  write_file(dir / "effective.cfg", render_run_config(effective));
  save_model(dir / "model.json", result.saved.model, result.saved.meta);
  std::ostringstream log;
  write_epoch_log(log, result.report);
  write_file(dir / "epochs.csv", log.str());
  write_file(dir / "metrics.txt", metrics_text(result.metrics));
  write_file(dir / "metrics.json", metrics_json(result.metrics));
}

namespace {

struct TrainArgs {
  std::string config;
  std::string output;
};

struct EvalArgs {
  std::string model;
  std::string data;
  std::string output;
};

struct RulesArgs {
  std::string model;
  std::string data;
  double threshold = 0.5;
  std::size_t max_antecedents = 0;
  std::string markdown;
  std::string counts;
};

struct AblateArgs {
  std::string config;
  std::string grid;
  std::string output;
  std::size_t jobs = 1;
};

struct ComplexityArgs {
  std::string n_range = "2..10";
  std::size_t m = 3;
  std::size_t h = 16;
  std::size_t k = 3;
  std::string family = "gaussian";
  bool it2 = false;
  std::string output;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  RunConfig cfg = load_run_config(a.config);
  if (!a.output.empty()) cfg.output_dir = fs::absolute(a.output).lexically_normal();
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run_experiment(cfg);
  write_run_outputs(cfg, r, cfg.output_dir);
  out << metrics_text(r.metrics);
  out << "trained " << r.report.epochs.size() << " epochs in " << format_fixed(seconds_since(t0), 2)
      << " s; outputs in " << cfg.output_dir.string() << "\n";
  return 0;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const SavedModel saved = load_model(a.model);
  Dataset ds = load_csv(a.data, saved.meta.target_name, saved.model.task().kind);
  align_to_model(ds, saved.meta, saved.model);
  const MetricList m = evaluate(saved.model, saved.meta.input_transform.apply(ds.x), ds, "");
  const std::string text = metrics_text(m);
  out << text;
  if (!a.output.empty()) write_file(a.output, text);
  return 0;
}

int cmd_rules(const RulesArgs& a, std::ostream& out, std::ostream& err) {
  const SavedModel saved = load_model(a.model);
  Dataset ds = load_csv(a.data, saved.meta.target_name, saved.model.task().kind);
  align_to_model(ds, saved.meta, saved.model);
  std::vector<std::string> outputs = saved.meta.class_names;
  if (outputs.empty()) outputs.push_back(saved.meta.target_name);
  RuleOptions opt;
  opt.threshold = a.threshold;
  if (a.max_antecedents > 0) opt.max_antecedents = a.max_antecedents;
  const RuleSet set = extract_rules(saved.model, saved.meta.input_transform.apply(ds.x), ds.stats,
                                    saved.meta.input_transform, saved.meta.feature_names, outputs, opt);
  if (feature_count_stats(set).mean == 0.0) err << "warning: no feature passes the mask threshold\n";
  out << render_report(set, ReportFormat::Plain);
  if (!a.markdown.empty()) write_file(a.markdown, render_report(set, ReportFormat::Markdown));
  const fs::path counts = a.counts.empty() ? fs::path(a.model).parent_path() / "feature_counts.csv" : fs::path(a.counts);
  std::ostringstream csv;
  write_feature_counts(csv, set);
  write_file(counts, csv.str());
  return 0;
}

int cmd_ablate(const AblateArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<double> grid;
  for (const auto& part : split_list(a.grid)) {
    if (part.empty()) continue;
    const double v = to_double(part, "--lambda-s-grid");
    if (v < 0.0) throw ConfigError("--lambda-s-grid: values must be nonnegative");
    grid.push_back(v);
  }
  if (grid.empty()) throw ConfigError("--lambda-s-grid is empty");
  if (a.jobs == 0) throw ConfigError("--jobs must be positive");
  const RunConfig base = load_run_config(a.config);
  const fs::path root = a.output.empty() ? base.output_dir : fs::absolute(a.output).lexically_normal();
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create output directory '" + root.string() + "': " + ec.message());
  write_file(root / "effective.cfg", render_run_config(base));

  struct Point {
    bool ok = false;
    double mean_features = 0.0;
    double val_metric = 0.0;
    std::string error;
  };
  auto run_point = [&](double lambda) {
    Point p;
    try {
      RunConfig cfg = base;
      cfg.train.lambda_s = lambda;
      const RunResult r = run_experiment(cfg);
      write_run_outputs(cfg, r, root / ("lambda_s_" + format_double(lambda)));
      p = {true, r.mean_features_per_rule, r.val_metric, ""};
    } catch (const std::exception& e) {
      p.error = e.what();
    }
    return p;
  };

  // Each grid point trains its own model and writes its own directory.
  std::vector<Point> points(grid.size());
  for (std::size_t start = 0; start < grid.size(); start += a.jobs) {
    std::vector<std::future<Point>> running;
    for (std::size_t i = start; i < std::min(grid.size(), start + a.jobs); ++i) {
      running.push_back(std::async(a.jobs > 1 ? std::launch::async : std::launch::deferred, run_point, grid[i]));
    }
    for (std::size_t i = 0; i < running.size(); ++i) points[start + i] = running[i].get();
  }

  std::string csv = "lambda_s,mean_features_per_rule,val_metric\n";
  std::size_t failures = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!points[i].ok) {
      ++failures;
      err << "lambda_s=" << format_double(grid[i]) << " failed: " << points[i].error << "\n";
      continue;
    }
    csv += format_double(grid[i]) + "," + format_double(points[i].mean_features) + "," +
           format_double(points[i].val_metric) + "\n";
  }
  write_file(root / "ablation.csv", csv);
  out << csv;
  if (failures > 0) {
    err << failures << " of " << grid.size() << " grid points failed\n";
    return 1;
  }
  return 0;
}

int cmd_complexity(const ComplexityArgs& a, std::ostream& out) {
  std::size_t first = 0, last = 0;
  const auto dots = a.n_range.find("..");
  if (dots == std::string::npos) {
    first = last = to_u64(a.n_range, "--n-range");
  } else {
    first = to_u64(a.n_range.substr(0, dots), "--n-range");
    last = to_u64(a.n_range.substr(dots + 2), "--n-range");
  }
  const MfFamily family = parse_family(a.family);
  if (a.it2 && family != MfFamily::Gaussian) throw ConfigError("IT2 is only available for the gaussian family");
  if (a.k == 0) throw ConfigError("--k must be positive");
  const std::size_t ppb = FuzzyLayer(1, 1, a.k, family, a.it2).params_per_basis();
  std::ostringstream csv;
  write_complexity_csv(csv, complexity_table(first, last, a.m, a.h, a.k, ppb));
  out << csv.str();
  if (!a.output.empty()) write_file(a.output, csv.str());
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"KANFIS: additive neuro-fuzzy inference with interpretable rules"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a config file");
  train_cmd->add_option("--config", train_args.config, "Run config file")->required();
  train_cmd->add_option("--output", train_args.output, "Output directory (overrides [output] dir)");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model on a CSV file");
  eval_cmd->add_option("--model", eval_args.model, "Model file")->required();
  eval_cmd->add_option("--data", eval_args.data, "CSV file with the model's columns")->required();
  eval_cmd->add_option("--output", eval_args.output, "Also write the metrics to this file");

  RulesArgs rules_args;
  auto* rules_cmd = app.add_subcommand("rules", "Print the IF-THEN rules of a saved model");
  rules_cmd->add_option("--model", rules_args.model, "Model file")->required();
  rules_cmd->add_option("--data", rules_args.data, "CSV file for feature quantiles and firing")->required();
  rules_cmd->add_option("--threshold", rules_args.threshold, "Mask threshold for active features");
  rules_cmd->add_option("--max-antecedents", rules_args.max_antecedents, "Antecedent cap per rule (0: none)");
  rules_cmd->add_option("--markdown", rules_args.markdown, "Write a markdown report to this file");
  rules_cmd->add_option("--counts", rules_args.counts, "Feature count CSV (default: next to the model)");

  AblateArgs ablate_args;
  auto* ablate_cmd = app.add_subcommand("ablate", "Train once per lambda_s value");
  ablate_cmd->add_option("--config", ablate_args.config, "Run config file")->required();
  ablate_cmd->add_option("--lambda-s-grid", ablate_args.grid, "Comma-separated lambda_s values")->required();
  ablate_cmd->add_option("--output", ablate_args.output, "Output directory (overrides [output] dir)");
  ablate_cmd->add_option("--jobs", ablate_args.jobs, "Grid points trained concurrently");

  ComplexityArgs cx;
  auto* cx_cmd = app.add_subcommand("complexity", "Rule and parameter counts, product vs additive");
  cx_cmd->set_help_flag("--help", "Print this help message and exit");
  cx_cmd->add_option("--n-range", cx.n_range, "Input dimensions, e.g. 2..10");
  cx_cmd->add_option("--m", cx.m, "MFs per input in the product system");
  cx_cmd->add_option("--h", cx.h, "Rules in the additive model");
  cx_cmd->add_option("--k", cx.k, "Bases per edge");
  cx_cmd->add_option("--family", cx.family, "gaussian, bell or sigmoid");
  cx_cmd->add_flag("--it2", cx.it2, "Interval type-2 bases");
  cx_cmd->add_option("--output", cx.output, "Also write the CSV to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*train_cmd) return cmd_train(train_args, out);
    if (*eval_cmd) return cmd_eval(eval_args, out);
    if (*rules_cmd) return cmd_rules(rules_args, out, err);
    if (*ablate_cmd) return cmd_ablate(ablate_args, out, err);
    return cmd_complexity(cx, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace kanfis
