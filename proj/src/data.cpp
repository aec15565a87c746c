#include "kanfis/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string_view>

#include "kanfis/error.hpp"
#include "kanfis/random.hpp"

namespace kanfis {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one record on commas. Double-quoted fields may contain commas and
// "" escapes; the file is assumed not to contain embedded newlines.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.emplace_back(trim(field));
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ShapeError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<FeatureStats> compute_stats(const Matrix& x) {
  std::vector<FeatureStats> out(x.cols());
  if (x.rows() == 0) return out;
  const double n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    std::vector<double> col(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) col[r] = x(r, c);
    FeatureStats& s = out[c];
    s.min = *std::min_element(col.begin(), col.end());
    s.max = *std::max_element(col.begin(), col.end());
    for (double v : col) s.mean += v;
    s.mean /= n;
    for (double v : col) s.std += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(s.std / n);
    s.q33 = quantile(col, 0.33);
    s.q66 = quantile(col, 0.66);
  }
  return out;
}

std::vector<std::size_t> Dataset::labels() const {
  std::vector<std::size_t> out(y.rows());
  for (std::size_t r = 0; r < y.rows(); ++r) out[r] = static_cast<std::size_t>(y(r, 0));
  return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.x = Matrix(rows.size(), x.cols());
  out.y = Matrix(rows.size(), y.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= size()) throw ShapeError("subset row index out of range");
    std::copy_n(x.row_span(rows[r]).begin(), x.cols(), out.x.row_span(r).begin());
    std::copy_n(y.row_span(rows[r]).begin(), y.cols(), out.y.row_span(r).begin());
  }
  out.feature_names = feature_names;
  out.target_name = target_name;
  out.task = task;
  out.class_names = class_names;
  out.stats = compute_stats(out.x);
  return out;
}

Dataset parse_csv(std::istream& in, const std::string& target_column, TaskKind kind,
                  const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(source + ": missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const std::vector<std::string> header = split_record(line);

  const auto target_it = std::find(header.begin(), header.end(), target_column);
  if (target_it == header.end()) {
    throw SchemaError(source + ": no column named '" + target_column + "'");
  }
  const std::size_t target = static_cast<std::size_t>(target_it - header.begin());

  Dataset ds;
  ds.target_name = target_column;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != target) ds.feature_names.push_back(header[c]);

  std::vector<double> xs, ys;
  std::map<std::string, std::size_t> class_ids;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const std::vector<std::string> cells = split_record(line);
    if (cells.size() != header.size()) {
      throw ParseError(source + ": row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == target && kind == TaskKind::Classification) {
        if (cells[c].empty()) throw ParseError(source + ": row " + std::to_string(row) + " has an empty label");
        const auto [it, fresh] = class_ids.emplace(cells[c], ds.class_names.size());
        if (fresh) ds.class_names.push_back(cells[c]);
        ys.push_back(static_cast<double>(it->second));
        continue;
      }
      double v;
      if (!parse_double(cells[c], v)) {
        throw ParseError(source + ": row " + std::to_string(row) + ", column '" + header[c] +
                         "': cannot parse '" + cells[c] + "' as a number");
      }
      (c == target ? ys : xs).push_back(v);
    }
  }
  if (row == 0) throw SchemaError(source + ": no data rows");

  const std::size_t d = ds.feature_names.size();
  ds.x = Matrix(row, d, std::move(xs));
  ds.y = Matrix(row, 1, std::move(ys));
  ds.task = kind == TaskKind::Classification ? Task::classification(ds.class_names.size())
                                             : Task::regression();
  ds.stats = compute_stats(ds.x);
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 TaskKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  return parse_csv(in, target_column, kind, path.string());
}

Standardizer Standardizer::fit(const Matrix& x, const std::vector<std::string>& names) {
  Standardizer s;
  for (const FeatureStats& f : compute_stats(x)) {
    const std::size_t c = s.mean.size();
    if (!(f.std > 0.0)) {
      const std::string name = c < names.size() ? names[c] : "#" + std::to_string(c);
      throw DegenerateFeatureError("feature '" + name + "' is constant and cannot be standardized");
    }
    s.mean.push_back(f.mean);
    s.std.push_back(f.std);
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) throw ShapeError("standardizer expects " + std::to_string(mean.size()) + " columns");
  Matrix z(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) z(r, c) = (x(r, c) - mean[c]) / std[c];
  return z;
}

Matrix Standardizer::inverse(const Matrix& z) const {
  if (z.cols() != mean.size()) throw ShapeError("standardizer expects " + std::to_string(mean.size()) + " columns");
  Matrix x(z.rows(), z.cols());
  for (std::size_t r = 0; r < z.rows(); ++r)
    for (std::size_t c = 0; c < z.cols(); ++c) x(r, c) = z(r, c) * std[c] + mean[c];
  return x;
}

Split split_indices(const Dataset& ds, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie strictly between 0 and 1");
  }
  Rng rng(spec.seed);
  std::vector<std::vector<std::size_t>> strata;
  if (spec.stratify && ds.task.is_classification()) {
    strata.resize(ds.task.num_classes);
    for (std::size_t r = 0; r < ds.size(); ++r) strata[static_cast<std::size_t>(ds.y(r, 0))].push_back(r);
  } else {
    strata.emplace_back(ds.size());
    for (std::size_t r = 0; r < ds.size(); ++r) strata[0][r] = r;
  }
  Split out;
  for (auto& s : strata) {
    rng.shuffle(std::span<std::size_t>(s));
    const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(s.size())));
    out.train.insert(out.train.end(), s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), s.begin() + static_cast<std::ptrdiff_t>(n_train), s.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace kanfis
