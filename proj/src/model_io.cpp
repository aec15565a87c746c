#include "kanfis/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kanfis/error.hpp"

namespace kanfis {

namespace {

using nlohmann::json;

json matrix_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from(const json& j, const std::string& what) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) throw ParseError("model field '" + what + "' has the wrong number of values");
  return Matrix(rows, cols, std::move(data));
}

}  // namespace

std::string serialize_model(const KanfisModel& model, const ModelMetadata& meta) {
  json layers = json::array();
  for (const auto& layer : model.layers()) {
    json l{{"d_in", layer.d_in()},
           {"d_out", layer.d_out()},
           {"bases_per_edge", layer.bases_per_edge()},
           {"centers", matrix_json(layer.centers())},
           {"widths", matrix_json(layer.widths())},
           {"amplitudes", matrix_json(layer.amplitudes())},
           {"mask_logits", matrix_json(layer.mask_logits())}};
    if (layer.has_shapes()) l["shapes"] = matrix_json(layer.shapes());
    layers.push_back(std::move(l));
  }
  json doc{
      {"format", "kanfis-model"},
      {"version", kModelFormatVersion},
      {"task", model.task().is_classification() ? "classification" : "regression"},
      {"num_classes", model.task().num_classes},
      {"family", std::string(to_string(model.family()))},
      {"it2", model.it2()},
      {"layers", std::move(layers)},
      {"head_w", matrix_json(model.head_w())},
      {"head_b", matrix_json(model.head_b())},
      {"metadata",
       {{"feature_names", meta.feature_names},
        {"feature_mean", meta.input_transform.mean},
        {"feature_std", meta.input_transform.std},
        {"target", meta.target_name},
        {"class_names", meta.class_names}}},
  };
  return doc.dump(1) + "\n";
}

SavedModel parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != "kanfis-model") throw ParseError("not a kanfis model file");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ParseError("unsupported model format version " + std::to_string(version));
    }
    const bool classify = doc.at("task").get<std::string>() == "classification";
    const Task task = classify ? Task::classification(doc.at("num_classes").get<std::size_t>())
                               : Task::regression();
    const MfFamily family = parse_family(doc.at("family").get<std::string>());
    const bool it2 = doc.at("it2").get<bool>();

    std::vector<FuzzyLayer> layers;
    for (const json& l : doc.at("layers")) {
      FuzzyLayer layer(l.at("d_in").get<std::size_t>(), l.at("d_out").get<std::size_t>(),
                       l.at("bases_per_edge").get<std::size_t>(), family, it2);
      auto load = [&](Matrix& dst, const char* key) {
        Matrix m = matrix_from(l.at(key), key);
        if (m.rows() != dst.rows() || m.cols() != dst.cols()) {
          throw ParseError(std::string("model field '") + key + "' is " + m.shape_string() +
                           ", expected " + dst.shape_string());
        }
        dst = std::move(m);
      };
      load(layer.centers(), "centers");
      load(layer.widths(), "widths");
      if (layer.has_shapes()) load(layer.shapes(), "shapes");
      load(layer.amplitudes(), "amplitudes");
      load(layer.mask_logits(), "mask_logits");
      layers.push_back(std::move(layer));
    }
    if (layers.empty()) throw ParseError("model has no layers");

    SavedModel out{KanfisModel(std::move(layers), matrix_from(doc.at("head_w"), "head_w"),
                               matrix_from(doc.at("head_b"), "head_b"), task),
                   {}};
    const json& meta = doc.at("metadata");
    out.meta.feature_names = meta.at("feature_names").get<std::vector<std::string>>();
    out.meta.input_transform.mean = meta.at("feature_mean").get<std::vector<double>>();
    out.meta.input_transform.std = meta.at("feature_std").get<std::vector<double>>();
    out.meta.target_name = meta.at("target").get<std::string>();
    out.meta.class_names = meta.at("class_names").get<std::vector<std::string>>();
    const std::size_t d = out.model.input_dim();
    if (out.meta.feature_names.size() != d || out.meta.input_transform.mean.size() != d ||
        out.meta.input_transform.std.size() != d) {
      throw ParseError("model metadata does not match its input dimension " + std::to_string(d));
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const KanfisModel& model, const ModelMetadata& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file '" + path.string() + "'");
  out << serialize_model(model, meta);
  if (!out) throw IoError("failed writing model file '" + path.string() + "'");
}

SavedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace kanfis
