#include "ballot/model_io.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "ballot/error.hpp"

namespace ballot {

using nlohmann::json;

namespace {

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i)
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in, std::string_view what) {
  std::array<unsigned char, sizeof(U)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw Error(Errc::corrupt, "model file truncated in " + std::string(what));
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

const char* activation_name(nn::Activation a) {
  switch (a) {
    case nn::Activation::none:
      return "none";
    case nn::Activation::relu:
      return "relu";
    case nn::Activation::sigmoid:
      return "sigmoid";
    case nn::Activation::softmax:
      return "softmax";
  }
  return "none";
}

nn::Activation activation_from(const std::string& name) {
  if (name == "none") return nn::Activation::none;
  if (name == "relu") return nn::Activation::relu;
  if (name == "sigmoid") return nn::Activation::sigmoid;
  if (name == "softmax") return nn::Activation::softmax;
  throw Error(Errc::format, "unknown activation '" + name + "'");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read model " + path);
  return in;
}

void expect_kind(const json& manifest, std::string_view kind) {
  const auto found = manifest.value("kind", std::string{});
  if (found != kind)
    throw Error(Errc::format, "expected a " + std::string(kind) + " model, found '" + found + "'");
}

template <typename F>
auto parse_manifest(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::format, std::string("model manifest: ") + e.what());
  }
}

}  // namespace

void write_container(std::ostream& out, json manifest, const nn::ParameterSet<double>& tensors) {
  json entries = json::array();
  std::uint64_t offset = 0;
  for (nn::Index i = 0; i < tensors.size(); ++i) {
    entries.push_back({{"name", tensors.name(i)},
                       {"shape", {tensors[i].rows(), tensors[i].cols()}},
                       {"offset", offset}});
    offset += static_cast<std::uint64_t>(tensors[i].size()) * sizeof(float);
  }
  manifest["tensors"] = std::move(entries);
  manifest["payload_bytes"] = offset;
  manifest["dtype"] = "float32-le";
  const std::string text = manifest.dump();

  out.write(kModelMagic.data(), static_cast<std::streamsize>(kModelMagic.size()));
  put_le<std::uint32_t>(out, kModelFormatVersion);
  put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (nn::Index i = 0; i < tensors.size(); ++i) {
    const auto& t = tensors[i];
    for (nn::Index k = 0; k < t.size(); ++k)
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(t.data()[k])));
  }
  if (!out) throw Error(Errc::io, "failed writing model container");
}

ModelContainer read_container(std::istream& in) {
  std::array<char, kModelMagic.size()> magic{};
  if (!in.read(magic.data(), magic.size()))
    throw Error(Errc::corrupt, "model file truncated in header");
  if (std::string_view(magic.data(), magic.size()) != kModelMagic)
    throw Error(Errc::format, "not a model file (bad magic)");
  const auto version = get_le<std::uint32_t>(in, "version");
  if (version != kModelFormatVersion)
    throw Error(Errc::version, "model format version " + std::to_string(version) +
                                   " unsupported (expected " + std::to_string(kModelFormatVersion) +
                                   ")");
  const auto length = get_le<std::uint64_t>(in, "manifest length");
  if (length > (std::uint64_t{1} << 32)) throw Error(Errc::format, "implausible manifest length");
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length)))
    throw Error(Errc::corrupt, "model file truncated in manifest");

  ModelContainer c;
  std::uint64_t declared = 0;
  parse_manifest([&] {
    c.manifest = json::parse(text);
    declared = c.manifest.at("payload_bytes").get<std::uint64_t>();
    std::uint64_t offset = 0;
    for (const auto& t : c.manifest.at("tensors")) {
      const auto rows = t.at("shape").at(0).get<nn::Index>();
      const auto cols = t.at("shape").at(1).get<nn::Index>();
      if (rows < 0 || cols < 0) throw Error(Errc::format, "negative tensor dimension");
      if (t.at("offset").get<std::uint64_t>() != offset)
        throw Error(Errc::shape, "tensor '" + t.at("name").get<std::string>() +
                                     "' offset disagrees with preceding shapes");
      c.tensors.add(t.at("name").get<std::string>(), rows, cols);
      offset += static_cast<std::uint64_t>(rows * cols) * sizeof(float);
    }
    if (offset != declared)
      throw Error(Errc::shape, "manifest shapes account for " + std::to_string(offset) +
                                   " payload bytes but " + std::to_string(declared) +
                                   " are declared");
    return 0;
  });

  std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (payload.size() < declared)
    throw Error(Errc::corrupt, "payload truncated: " + std::to_string(payload.size()) + " of " +
                                   std::to_string(declared) + " bytes");
  if (payload.size() > declared)
    throw Error(Errc::shape, "payload has " + std::to_string(payload.size() - declared) +
                                 " bytes beyond the manifest shapes");

  const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
  for (nn::Index i = 0; i < c.tensors.size(); ++i) {
    auto& t = c.tensors[i];
    for (nn::Index k = 0; k < t.size(); ++k, p += 4) {
      const std::uint32_t bits = std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 |
                                 std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
      t.data()[k] = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return c;
}

json config_to_json(const ElectionNetConfig& config) {
  json conv = json::array();
  for (const auto& c : config.conv) {
    conv.push_back({{"window", c.window},
                    {"filters", c.filters},
                    {"pool", c.pool ? json(*c.pool) : json(nullptr)},
                    {"in_channels", c.in_channels}});
  }
  json dense = json::array();
  for (const auto& d : config.dense) {
    dense.push_back({{"in", d.in_size},
                     {"out", d.out_size},
                     {"activation", activation_name(d.activation)},
                     {"dropout", d.dropout_rate}});
  }
  return {{"input_length", config.input_length},
          {"alphabet_size", config.alphabet_size},
          {"conv", conv},
          {"dense", dense}};
}

ElectionNetConfig election_config_from_json(const json& j) {
  return parse_manifest([&] {
    ElectionNetConfig c;
    c.input_length = j.at("input_length").get<nn::Index>();
    c.alphabet_size = j.at("alphabet_size").get<nn::Index>();
    for (const auto& l : j.at("conv")) {
      nn::ConvLayerSpec s;
      s.window = l.at("window").get<nn::Index>();
      s.filters = l.at("filters").get<nn::Index>();
      if (!l.at("pool").is_null()) s.pool = l.at("pool").get<nn::Index>();
      s.in_channels = l.at("in_channels").get<nn::Index>();
      c.conv.push_back(s);
    }
    for (const auto& l : j.at("dense")) {
      nn::DenseLayerSpec s;
      s.in_size = l.at("in").get<nn::Index>();
      s.out_size = l.at("out").get<nn::Index>();
      s.activation = activation_from(l.at("activation").get<std::string>());
      s.dropout_rate = l.at("dropout").get<double>();
      c.dense.push_back(s);
    }
    c.validate();
    return c;
  });
}

json config_to_json(const TSNetConfig& config) {
  return {{"max_words", config.max_words},
          {"embedding_dim", config.embedding_dim},
          {"windows", config.windows},
          {"filters", config.filters},
          {"penultimate", config.penultimate},
          {"num_classes", config.num_classes},
          {"dropout", config.dropout_rate},
          {"oov_rate", config.oov_rate},
          {"embedding_init", config.embedding_init}};
}

TSNetConfig ts_config_from_json(const json& j) {
  return parse_manifest([&] {
    TSNetConfig c;
    c.max_words = j.at("max_words").get<nn::Index>();
    c.embedding_dim = j.at("embedding_dim").get<nn::Index>();
    c.windows = j.at("windows").get<std::vector<nn::Index>>();
    c.filters = j.at("filters").get<nn::Index>();
    c.penultimate = j.at("penultimate").get<nn::Index>();
    c.num_classes = j.at("num_classes").get<nn::Index>();
    c.dropout_rate = j.at("dropout").get<double>();
    c.oov_rate = j.at("oov_rate").get<double>();
    c.embedding_init = j.at("embedding_init").get<double>();
    c.validate();
    return c;
  });
}

void save_model(const ElectionNet& net, std::ostream& out, const json& metadata) {
  json manifest{{"kind", kElectionKind},
                {"config", config_to_json(net.config())},
                {"alphabet", std::string(Alphabet::standard().symbols())},
                {"metadata", metadata.is_null() ? json::object() : metadata}};
  write_container(out, std::move(manifest), net.parameters());
}

void save_model(const TSNet& net, std::ostream& out, const json& metadata) {
  json manifest{{"kind", kTSKind},
                {"config", config_to_json(net.config())},
                {"vocab", net.vocab().terms()},
                {"labels", net.label_names()},
                {"fallback_class", net.fallback_class()},
                {"metadata", metadata.is_null() ? json::object() : metadata}};
  write_container(out, std::move(manifest), net.parameters());
}

void save_model(const ElectionNet& net, const std::string& path, const json& metadata) {
  auto out = open_out(path);
  save_model(net, out, metadata);
}

void save_model(const TSNet& net, const std::string& path, const json& metadata) {
  auto out = open_out(path);
  save_model(net, out, metadata);
}

ElectionNet load_election_model(std::istream& in) {
  auto c = read_container(in);
  expect_kind(c.manifest, kElectionKind);
  const auto alphabet =
      parse_manifest([&] { return c.manifest.at("alphabet").get<std::string>(); });
  if (alphabet != Alphabet::standard().symbols())
    throw Error(Errc::format, "model alphabet differs from the built-in alphabet");
  auto config = election_config_from_json(parse_manifest([&] { return c.manifest.at("config"); }));
  return ElectionNet(std::move(config), std::move(c.tensors));
}

ElectionNet load_election_model(const std::string& path) {
  auto in = open_in(path);
  return load_election_model(in);
}

TSNet load_ts_model(std::istream& in) {
  auto c = read_container(in);
  expect_kind(c.manifest, kTSKind);
  return parse_manifest([&] {
    auto config = ts_config_from_json(c.manifest.at("config"));
    WordVocab vocab(c.manifest.at("vocab").get<std::vector<std::string>>());
    auto labels = c.manifest.at("labels").get<std::vector<std::string>>();
    const int fallback = c.manifest.at("fallback_class").get<int>();
    return TSNet(std::move(config), std::move(vocab), std::move(labels), fallback,
                 std::move(c.tensors));
  });
}

TSNet load_ts_model(const std::string& path) {
  auto in = open_in(path);
  return load_ts_model(in);
}

std::string model_kind(const std::string& path) {
  auto in = open_in(path);
  const auto c = read_container(in);
  return c.manifest.value("kind", std::string{});
}

}  // namespace ballot
