#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "kanfis/data.hpp"
#include "kanfis/network.hpp"

namespace kanfis {

enum class Linguistic { Low, Med, High };
std::string_view to_string(Linguistic label);

/// LOW below q33, HIGH above q66, MED otherwise.
Linguistic linguistic_label(double value, const FeatureStats& stats);

struct RuleAntecedent {
  std::size_t feature = 0;
  std::string feature_name;
  Linguistic label = Linguistic::Med;
  double mask = 0.0;
  double coefficient = 0.0;  // mask * sum of amplitudes
  double center = 0.0;       // amplitude-weighted, original units
};

struct RuleReport {
  std::size_t rule = 0;  // unit index in the first layer
  std::vector<RuleAntecedent> antecedents;
  std::vector<double> outer;  // head weight per output
  double importance = 0.0;
  std::vector<std::size_t> dominant_outputs;  // |w| >= half the largest |w|
};

struct RuleSet {
  std::vector<RuleReport> rules;  // descending importance
  std::vector<std::string> output_names;
  bool classification = false;
  bool partial = false;  // deeper layers were not rendered
  double threshold = 0.5;
};

struct RuleOptions {
  double threshold = 0.5;
  /// Largest number of antecedents kept per rule (highest coefficient first).
  std::size_t max_antecedents = std::numeric_limits<std::size_t>::max();
};

/// `x` holds samples in model input units; it is only used for the mean
/// firing strength in the importance score. `stats` are in original units and
/// `transform` maps original units to model input units.
RuleSet extract_rules(const KanfisModel& model, const Matrix& x, const std::vector<FeatureStats>& stats,
                      const Standardizer& transform, const std::vector<std::string>& feature_names,
                      const std::vector<std::string>& output_names, const RuleOptions& options = {});

enum class ReportFormat { Plain, Markdown };

std::string render_report(const RuleSet& rules, ReportFormat format);

struct FeatureCountStats {
  double mean = 0.0;
  std::vector<std::size_t> counts;  // per rule, in report order
};

FeatureCountStats feature_count_stats(const RuleSet& rules);

/// CSV with columns rule,importance,active_features.
void write_feature_counts(std::ostream& out, const RuleSet& rules);

}  // namespace kanfis
