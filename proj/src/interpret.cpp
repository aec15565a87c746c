#include "kanfis/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "kanfis/error.hpp"
#include "kanfis/format.hpp"

namespace kanfis {

std::string_view to_string(Linguistic label) {
  switch (label) {
    case Linguistic::Low: return "LOW";
    case Linguistic::Med: return "MED";
    case Linguistic::High: return "HIGH";
  }
  return "?";
}

Linguistic linguistic_label(double value, const FeatureStats& stats) {
  if (value < stats.q33) return Linguistic::Low;
  if (value > stats.q66) return Linguistic::High;
  return Linguistic::Med;
}

RuleSet extract_rules(const KanfisModel& model, const Matrix& x, const std::vector<FeatureStats>& stats,
                      const Standardizer& transform, const std::vector<std::string>& feature_names,
                      const std::vector<std::string>& output_names, const RuleOptions& options) {
  const FuzzyLayer& layer = model.layers().front();
  const std::size_t d = layer.d_in();
  if (stats.size() != d || feature_names.size() != d || transform.mean.size() != d ||
      transform.std.size() != d) {
    throw ShapeError("rule extraction expects " + std::to_string(d) + " features");
  }
  if (x.cols() != d) {
    throw ShapeError("data has " + std::to_string(x.cols()) + " features, model expects " + std::to_string(d));
  }
  if (!(options.threshold > 0.0 && options.threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");

  RuleSet out;
  out.classification = model.task().is_classification();
  out.partial = model.layers().size() > 1;
  out.threshold = options.threshold;
  out.output_names = output_names;

  const Matrix mask = layer.mask();
  const Matrix firing = x.rows() > 0 ? model_forward(model, x).firing : Matrix(0, layer.d_out());
  const LayerView view = layer.view();

  for (std::size_t j = 0; j < layer.d_out(); ++j) {
    RuleReport rule;
    rule.rule = j;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask(i, j) < options.threshold) continue;
      const std::size_t row = layer.edge_row(i, j);
      double amp_sum = 0.0, weighted = 0.0;
      for (std::size_t k = 0; k < layer.bases_per_edge(); ++k) {
        const EffectiveBasis b = effective_basis(view, row, k);
        amp_sum += b.amplitude;
        weighted += b.amplitude * b.center;
      }
      const double center_z = amp_sum > 0.0 ? weighted / amp_sum : 0.0;
      RuleAntecedent a;
      a.feature = i;
      a.feature_name = feature_names[i];
      a.mask = mask(i, j);
      a.coefficient = mask(i, j) * amp_sum;
      a.center = center_z * transform.std[i] + transform.mean[i];
      a.label = linguistic_label(a.center, stats[i]);
      rule.antecedents.push_back(std::move(a));
    }
    if (rule.antecedents.size() > options.max_antecedents) {
      std::stable_sort(rule.antecedents.begin(), rule.antecedents.end(),
                       [](const auto& a, const auto& b) { return a.coefficient > b.coefficient; });
      rule.antecedents.resize(options.max_antecedents);
      std::stable_sort(rule.antecedents.begin(), rule.antecedents.end(),
                       [](const auto& a, const auto& b) { return a.feature < b.feature; });
    }

    double max_w = 0.0;
    for (std::size_t o = 0; o < model.output_dim(); ++o) {
      rule.outer.push_back(model.head_w()(o, j));
      max_w = std::max(max_w, std::abs(model.head_w()(o, j)));
    }
    for (std::size_t o = 0; o < model.output_dim(); ++o)
      if (max_w > 0.0 && std::abs(rule.outer[o]) >= 0.5 * max_w) rule.dominant_outputs.push_back(o);

    double mean_firing = 0.0;
    for (std::size_t b = 0; b < firing.rows(); ++b) mean_firing += firing(b, j);
    if (firing.rows() > 0) mean_firing /= static_cast<double>(firing.rows());
    rule.importance = max_w * mean_firing;
    out.rules.push_back(std::move(rule));
  }
  std::stable_sort(out.rules.begin(), out.rules.end(),
                   [](const RuleReport& a, const RuleReport& b) { return a.importance > b.importance; });
  return out;
}

namespace {

std::string antecedent_text(const RuleReport& r) {
  if (r.antecedents.empty()) return "(no active features)";
  std::string s;
  for (std::size_t a = 0; a < r.antecedents.size(); ++a) {
    if (a) s += " AND ";
    s += r.antecedents[a].feature_name + " is " + std::string(to_string(r.antecedents[a].label));
  }
  return s;
}

std::string aggregate_text(const RuleReport& r) {
  if (r.antecedents.empty()) return "0";
  std::string s;
  for (std::size_t a = 0; a < r.antecedents.size(); ++a) {
    const auto& ant = r.antecedents[a];
    if (a) s += " + ";
    s += format_fixed(ant.coefficient, 4) + "*M_" + ant.feature_name + "(" + ant.feature_name + ")";
  }
  return "(" + s + ")";
}

std::string signed_fixed(double v) {
  std::string s = format_fixed(v, 4);
  return s.front() == '-' ? s : "+" + s;
}

std::vector<std::string> then_lines(const RuleSet& set, const RuleReport& r) {
  std::vector<std::string> lines;
  const std::string agg = aggregate_text(r);
  if (!set.classification) {
    const std::string name = set.output_names.empty() ? "y" : set.output_names.front();
    lines.push_back(name + " += " + signed_fixed(r.outer.front()) + " * " + agg);
    return lines;
  }
  for (std::size_t o : r.dominant_outputs) {
    const std::string name = o < set.output_names.size() ? set.output_names[o] : std::to_string(o);
    lines.push_back("class " + name + ": " + signed_fixed(r.outer[o]) + " * " + agg);
  }
  return lines;
}

std::string markdown_cell(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string render_report(const RuleSet& set, ReportFormat format) {
  std::ostringstream out;
  const std::string header = "Rules at mask threshold " + format_fixed(set.threshold, 4) + ": " +
                             std::to_string(set.rules.size()) + " rules, sorted by importance";
  if (format == ReportFormat::Plain) {
    out << header << '\n';
    if (set.partial) out << "Note: only the first layer is rendered; deeper layers are not shown.\n";
    if (set.rules.empty()) out << "Warning: no rules to report.\n";
    for (std::size_t n = 0; n < set.rules.size(); ++n) {
      const RuleReport& r = set.rules[n];
      out << '\n'
          << "Rule " << n + 1 << " (unit " << r.rule << ", importance " << format_fixed(r.importance, 4)
          << ")\n";
      out << "  IF " << antecedent_text(r) << '\n';
      for (const std::string& line : then_lines(set, r)) out << "  THEN " << line << '\n';
      for (const auto& a : r.antecedents) {
        out << "    " << a.feature_name << ": mask " << format_fixed(a.mask, 4) << ", coefficient "
            << format_fixed(a.coefficient, 4) << ", center " << format_fixed(a.center, 4) << '\n';
      }
    }
    return out.str();
  }

  out << "# " << header << "\n\n";
  if (set.partial) out << "_Only the first layer is rendered; deeper layers are not shown._\n\n";
  if (set.rules.empty()) {
    out << "_No rules to report._\n";
    return out.str();
  }
  out << "| Rank | Unit | IF | THEN | Importance |\n";
  out << "|---:|---:|---|---|---:|\n";
  for (std::size_t n = 0; n < set.rules.size(); ++n) {
    const RuleReport& r = set.rules[n];
    std::string then;
    for (const std::string& line : then_lines(set, r)) then += (then.empty() ? "" : "<br>") + line;
    out << "| " << n + 1 << " | " << r.rule << " | " << markdown_cell(antecedent_text(r)) << " | "
        << markdown_cell(then) << " | " << format_fixed(r.importance, 4) << " |\n";
  }
  return out.str();
}

FeatureCountStats feature_count_stats(const RuleSet& rules) {
  FeatureCountStats s;
  for (const auto& r : rules.rules) s.counts.push_back(r.antecedents.size());
  if (!s.counts.empty()) {
    s.mean = static_cast<double>(std::accumulate(s.counts.begin(), s.counts.end(), std::size_t{0})) /
             static_cast<double>(s.counts.size());
  }
  return s;
}

void write_feature_counts(std::ostream& out, const RuleSet& rules) {
  out << "rule,importance,active_features\n";
  for (const auto& r : rules.rules) {
    out << r.rule << ',' << format_double(r.importance) << ',' << r.antecedents.size() << '\n';
  }
  out << "mean,," << format_double(feature_count_stats(rules).mean) << '\n';
}

}  // namespace kanfis
