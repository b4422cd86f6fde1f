#include "core/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace fxcast {

namespace {

using Json = nlohmann::ordered_json;

Json mat_to_json(const Mat& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const Json& j, std::size_t rows, std::size_t cols, const std::string& name) {
  require(j.is_array() && j.size() == rows, ErrorCode::Format,
          "checkpoint: tensor '" + name + "' has wrong row count");
  Mat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Json& row = j[r];
    require(row.is_array() && row.size() == cols, ErrorCode::Format,
            "checkpoint: tensor '" + name + "' has wrong column count");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

Json tensor3_to_json(const Tensor3& t) {
  Json out = Json::array();
  for (std::size_t i = 0; i < t.n0; ++i) {
    Json mid = Json::array();
    for (std::size_t j = 0; j < t.n1; ++j) {
      Json inner = Json::array();
      for (std::size_t k = 0; k < t.n2; ++k) inner.push_back(t(i, j, k));
      mid.push_back(std::move(inner));
    }
    out.push_back(std::move(mid));
  }
  return out;
}

Tensor3 tensor3_from_json(const Json& j, std::size_t n0, std::size_t n1, std::size_t n2,
                          const std::string& name) {
  require(j.is_array() && j.size() == n0, ErrorCode::Format,
          "checkpoint: tensor '" + name + "' has wrong filter count");
  Tensor3 t(n0, n1, n2);
  for (std::size_t i = 0; i < n0; ++i) {
    require(j[i].is_array() && j[i].size() == n1, ErrorCode::Format,
            "checkpoint: tensor '" + name + "' has wrong channel count");
    for (std::size_t c = 0; c < n1; ++c) {
      require(j[i][c].is_array() && j[i][c].size() == n2, ErrorCode::Format,
              "checkpoint: tensor '" + name + "' has wrong tap count");
      for (std::size_t k = 0; k < n2; ++k) t(i, c, k) = j[i][c][k].get<double>();
    }
  }
  return t;
}

Vec vec_from_json(const Json& j, std::size_t n, const std::string& name) {
  require(j.is_array() && j.size() == n, ErrorCode::Format,
          "checkpoint: vector '" + name + "' has wrong length");
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  const ModelSpec& spec = ckpt.params.spec;
  Json j;
  j["format_version"] = ckpt.format_version;
  j["model"] = {{"variant", variant_name(spec.variant)},
                {"input_size", spec.input_size},
                {"hidden_size", spec.hidden_size},
                {"num_filters", spec.num_filters},
                {"kernel_size", spec.kernel_size},
                {"lookback", spec.lookback}};
  j["indicators"] = {{"sma_n", ckpt.indicators.sma_n},
                     {"rsi_n", ckpt.indicators.rsi_n},
                     {"bb_n", ckpt.indicators.bb_n},
                     {"bb_k", ckpt.indicators.bb_k}};
  j["scaler"] = {{"min", ckpt.scaler.mins}, {"max", ckpt.scaler.maxs}};

  Json params;
  if (ckpt.params.lstm) {
    const LstmParams& l = *ckpt.params.lstm;
    params["lstm"] = {{"w_f", mat_to_json(l.w_f)}, {"w_i", mat_to_json(l.w_i)},
                      {"w_c", mat_to_json(l.w_c)}, {"w_o", mat_to_json(l.w_o)},
                      {"b_f", l.b_f},              {"b_i", l.b_i},
                      {"b_c", l.b_c},              {"b_o", l.b_o}};
  }
  if (ckpt.params.conv) {
    params["conv"] = {{"w", tensor3_to_json(ckpt.params.conv->w)}, {"b", ckpt.params.conv->b}};
  }
  params["attention"] = {{"w", ckpt.params.attention.w}, {"b", ckpt.params.attention.b}};
  params["dense"] = {{"w", ckpt.params.dense.w}, {"b", ckpt.params.dense.b}};
  j["params"] = std::move(params);
  j["meta"] = {{"seed", ckpt.seed}, {"epochs_trained", ckpt.epochs_trained}};

  std::ofstream out(path);
  if (!out) raise(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) raise(ErrorCode::Io, "write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Io, "cannot open '" + path + "' for reading");

  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(ErrorCode::Format, "checkpoint '" + path + "': invalid JSON: " + e.what());
  }

  try {
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      raise(ErrorCode::Format, "checkpoint '" + path + "': unknown format_version " +
                                   std::to_string(version));
    }

    Checkpoint ckpt;
    ckpt.format_version = version;

    const Json& jm = j.at("model");
    ModelSpec spec;
    spec.variant = variant_from_string(jm.at("variant").get<std::string>());
    spec.input_size = jm.at("input_size").get<std::size_t>();
    spec.hidden_size = jm.at("hidden_size").get<std::size_t>();
    spec.num_filters = jm.at("num_filters").get<std::size_t>();
    spec.kernel_size = jm.at("kernel_size").get<std::size_t>();
    spec.lookback = jm.at("lookback").get<std::size_t>();
    spec.validate();
    ckpt.params.spec = spec;

    const Json& ji = j.at("indicators");
    ckpt.indicators.sma_n = ji.at("sma_n").get<int>();
    ckpt.indicators.rsi_n = ji.at("rsi_n").get<int>();
    ckpt.indicators.bb_n = ji.at("bb_n").get<int>();
    ckpt.indicators.bb_k = ji.at("bb_k").get<double>();
    ckpt.indicators.validate();

    const Json& js = j.at("scaler");
    const std::size_t channels = spec.input_size + 1;
    ckpt.scaler.mins = vec_from_json(js.at("min"), channels, "scaler.min");
    ckpt.scaler.maxs = vec_from_json(js.at("max"), channels, "scaler.max");
    ckpt.scaler.fitted = true;

    const Json& jp = j.at("params");
    const std::size_t h = spec.hidden_size;
    const std::size_t width = h + spec.input_size;
    if (spec.variant != Variant::CnnOnly) {
      const Json& jl = jp.at("lstm");
      LstmParams l = lstm_zeros(h, spec.input_size);
      l.w_f = mat_from_json(jl.at("w_f"), h, width, "lstm.w_f");
      l.w_i = mat_from_json(jl.at("w_i"), h, width, "lstm.w_i");
      l.w_c = mat_from_json(jl.at("w_c"), h, width, "lstm.w_c");
      l.w_o = mat_from_json(jl.at("w_o"), h, width, "lstm.w_o");
      l.b_f = vec_from_json(jl.at("b_f"), h, "lstm.b_f");
      l.b_i = vec_from_json(jl.at("b_i"), h, "lstm.b_i");
      l.b_c = vec_from_json(jl.at("b_c"), h, "lstm.b_c");
      l.b_o = vec_from_json(jl.at("b_o"), h, "lstm.b_o");
      ckpt.params.lstm = std::move(l);
    }
    if (spec.variant != Variant::LstmOnly) {
      const Json& jc = jp.at("conv");
      Conv1dParams c = conv1d_zeros(spec.num_filters, spec.input_size, spec.kernel_size);
      c.w = tensor3_from_json(jc.at("w"), spec.num_filters, spec.input_size, spec.kernel_size,
                              "conv.w");
      c.b = vec_from_json(jc.at("b"), spec.num_filters, "conv.b");
      ckpt.params.conv = std::move(c);
    }
    const std::size_t m = spec.fused_width();
    ckpt.params.attention.w = vec_from_json(jp.at("attention").at("w"), m, "attention.w");
    ckpt.params.attention.b = jp.at("attention").at("b").get<double>();
    ckpt.params.dense.w = vec_from_json(jp.at("dense").at("w"), m, "dense.w");
    ckpt.params.dense.b = jp.at("dense").at("b").get<double>();

    const Json& jmeta = j.at("meta");
    ckpt.seed = jmeta.at("seed").get<std::uint64_t>();
    ckpt.epochs_trained = jmeta.at("epochs_trained").get<std::size_t>();
    return ckpt;
  } catch (const FxError&) {
    throw;
  } catch (const std::exception& e) {
    raise(ErrorCode::Format, "checkpoint '" + path + "': " + e.what());
  }
}

}  // namespace fxcast
