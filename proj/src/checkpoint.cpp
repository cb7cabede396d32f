#include "detnet/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <json.hpp>

#include "detnet/baselines.hpp"
#include "detnet/check.hpp"

namespace detnet {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'D', 'E', 'T', 'N', 'E', 'T', 'C', 'K'};
constexpr char kEndMagic[8] = {'D', 'E', 'T', 'N', 'E', 'T', 'E', 'N'};

json config_to_json(const ModelConfig& cfg) {
  json j;
  j["embed_dim"] = cfg.embed_dim;
  j["ffn_dim"] = cfg.ffn_dim;
  j["heads"] = cfg.heads;
  j["layers"] = cfg.layers;
  j["max_doc_len"] = cfg.max_doc_len;
  j["max_sent_len"] = cfg.max_sent_len;
  j["gate_gamma"] = cfg.gate_gamma;
  j["gate_lambda"] = cfg.gate_lambda;
  j["dropout"] = cfg.dropout;
  j["positional_encoding"] = cfg.positional_encoding;
  j["variant"] = variant_name(cfg.variant);
  return j;
}

ModelConfig config_from_json(const json& j) {
  ModelConfig cfg;
  cfg.embed_dim = j.at("embed_dim").get<int>();
  cfg.ffn_dim = j.at("ffn_dim").get<int>();
  cfg.heads = j.at("heads").get<int>();
  cfg.layers = j.at("layers").get<int>();
  cfg.max_doc_len = j.at("max_doc_len").get<int>();
  cfg.max_sent_len = j.at("max_sent_len").get<int>();
  cfg.gate_gamma = j.at("gate_gamma").get<double>();
  cfg.gate_lambda = j.at("gate_lambda").get<double>();
  cfg.dropout = j.at("dropout").get<double>();
  cfg.positional_encoding = j.at("positional_encoding").get<bool>();
  cfg.variant = variant_from_name(j.at("variant").get<std::string>());
  return cfg;
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v, const std::string& path) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError(path + ": truncated checkpoint blob");
}

}  // namespace

Checkpoint snapshot_model(Model& model, const Vocabulary& vocab, int epoch,
                          double dev_f1) {
  Checkpoint ck;
  ck.kind = model.kind();
  ck.config = model.config();
  ck.label_codes = model.labels().codes();
  ck.vocab_tokens = vocab.tokens();
  ck.vocab_hash = vocab.hash();
  ck.epoch = epoch;
  ck.dev_f1 = dev_f1;
  for (Tensor* t : model.params()) ck.tensors[t->name] = t->value;
  for (auto& [name, buf] : model.buffers()) ck.tensors[name] = *buf;
  if (auto* detnet = dynamic_cast<DetNetModel*>(&model);
      detnet && detnet->has_definitions())
    ck.definitions = detnet->definition_texts();
  return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, uint32_t(ck.format));
    write_pod(out, uint64_t(ck.vocab_hash));
    write_pod(out, uint32_t(ck.tensors.size()));
    for (const auto& [name, mat] : ck.tensors) {
      write_pod(out, uint32_t(name.size()));
      out.write(name.data(), std::streamsize(name.size()));
      write_pod(out, uint32_t(mat.rows()));
      write_pod(out, uint32_t(mat.cols()));
      out.write(reinterpret_cast<const char*>(mat.data()),
                std::streamsize(mat.size() * sizeof(double)));
    }
    out.write(kEndMagic, sizeof(kEndMagic));
    if (!out) throw DataError("failed writing checkpoint: " + path);
  }

  json j;
  j["format"] = ck.format;
  j["kind"] = ck.kind;
  j["config"] = config_to_json(ck.config);
  j["labels"] = ck.label_codes;
  j["vocab"] = ck.vocab_tokens;
  j["vocab_hash"] = ck.vocab_hash;
  j["epoch"] = ck.epoch;
  j["dev_f1"] = ck.dev_f1;
  if (!ck.definitions.empty()) j["definitions"] = ck.definitions;
  std::ofstream meta(path + ".json");
  if (!meta) throw DataError("cannot write checkpoint sidecar: " + path + ".json");
  meta << j.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  Checkpoint ck;

  {
    std::ifstream meta(path + ".json");
    if (!meta) throw DataError("cannot open checkpoint sidecar: " + path + ".json");
    json j;
    try {
      meta >> j;
    } catch (const json::exception& e) {
      throw DataError(path + ".json: malformed JSON: " + std::string(e.what()));
    }
    ck.format = j.at("format").get<int>();
    if (ck.format != 1)
      throw DataError(path + ": unsupported checkpoint format version " +
                      std::to_string(ck.format));
    ck.kind = j.at("kind").get<std::string>();
    ck.config = config_from_json(j.at("config"));
    ck.label_codes = j.at("labels").get<std::vector<std::string>>();
    ck.vocab_tokens = j.at("vocab").get<std::vector<std::string>>();
    ck.vocab_hash = j.at("vocab_hash").get<uint64_t>();
    ck.epoch = j.at("epoch").get<int>();
    ck.dev_f1 = j.at("dev_f1").get<double>();
    if (j.contains("definitions"))
      ck.definitions = j.at("definitions").get<DefinitionSet>();
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint blob: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw DataError(path + ": not a checkpoint blob");
  uint32_t format = 0;
  read_pod(in, format, path);
  if (int(format) != ck.format)
    throw DataError(path + ": blob/sidecar format mismatch");
  uint64_t blob_hash = 0;
  read_pod(in, blob_hash, path);
  if (blob_hash != ck.vocab_hash)
    throw DataError(path + ": vocabulary hash mismatch between blob and sidecar");
  uint32_t count = 0;
  read_pod(in, count, path);
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t name_len = 0;
    read_pod(in, name_len, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw DataError(path + ": truncated checkpoint blob");
    uint32_t rows = 0, cols = 0;
    read_pod(in, rows, path);
    read_pod(in, cols, path);
    Mat mat{int(rows), int(cols)};
    in.read(reinterpret_cast<char*>(mat.data()),
            std::streamsize(mat.size() * sizeof(double)));
    if (!in) throw DataError(path + ": truncated checkpoint blob");
    ck.tensors.emplace(std::move(name), std::move(mat));
  }
  char end[8];
  in.read(end, sizeof(end));
  if (!in || std::memcmp(end, kEndMagic, sizeof(kEndMagic)) != 0)
    throw DataError(path + ": truncated checkpoint blob");
  return ck;
}

std::unique_ptr<Model> make_model(const std::string& kind, ModelConfig cfg,
                                  DomainLabelSet labels, int vocab_size) {
  if (kind == "hiernet")
    return std::make_unique<HierNetModel>(cfg, std::move(labels), vocab_size);
  if (kind == "milnet")
    return std::make_unique<MilNetModel>(cfg, std::move(labels), vocab_size);
  if (kind == "major") return std::make_unique<MajorModel>(cfg, std::move(labels));
  cfg.variant = variant_from_name(kind);  // throws on unknown kinds
  return std::make_unique<DetNetModel>(cfg, std::move(labels), vocab_size);
}

std::unique_ptr<Model> build_model(const Checkpoint& ck) {
  DomainLabelSet labels(ck.label_codes);
  Vocabulary vocab(ck.vocab_tokens);
  if (vocab.hash() != ck.vocab_hash)
    throw DataError("checkpoint vocabulary hash does not match its tokens");

  std::unique_ptr<Model> model =
      make_model(ck.kind, ck.config, labels, vocab.size());
  if (auto* detnet = dynamic_cast<DetNetModel*>(model.get());
      detnet && ck.config.variant == Variant::FPlus) {
    if (ck.definitions.empty())
      throw DataError("checkpoint for " + ck.kind + " lacks definitions");
    detnet->set_definitions(ck.definitions, vocab);
  }

  for (Tensor* t : model->params()) {
    auto it = ck.tensors.find(t->name);
    if (it == ck.tensors.end())
      throw DataError("checkpoint missing tensor " + t->name);
    if (!it->second.same_shape(t->value))
      throw DataError("checkpoint tensor " + t->name + " has wrong shape");
    t->value = it->second;
  }
  for (auto& [name, buf] : model->buffers()) {
    auto it = ck.tensors.find(name);
    if (it == ck.tensors.end())
      throw DataError("checkpoint missing buffer " + name);
    if (!it->second.same_shape(*buf))
      throw DataError("checkpoint buffer " + name + " has wrong shape");
    *buf = it->second;
  }
  return model;
}

}  // namespace detnet
