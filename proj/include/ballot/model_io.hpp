#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <string_view>

#include "ballot/election_model.hpp"
#include "ballot/topic_sentiment_model.hpp"

namespace ballot {

// Container layout, all integers little-endian:
//   8-byte magic "BALLOTMD", uint32 format version, uint64 manifest length,
//   UTF-8 JSON manifest, float32 tensor payload.
// The manifest lists every tensor's name, shape and byte offset into the
// payload together with the model kind and its configuration.
inline constexpr std::string_view kModelMagic = "BALLOTMD";
inline constexpr std::uint32_t kModelFormatVersion = 1;

inline constexpr std::string_view kElectionKind = "election";
inline constexpr std::string_view kTSKind = "topic_sentiment";

struct ModelContainer {
  nlohmann::json manifest;
  nn::ParameterSet<double> tensors;
};

// Errc::version for an unknown version, Errc::corrupt for a truncated file,
// Errc::shape when the manifest shapes disagree with the payload length and
// Errc::format for anything unparseable.
void write_container(std::ostream& out, nlohmann::json manifest,
                     const nn::ParameterSet<double>& tensors);
ModelContainer read_container(std::istream& in);

void save_model(const ElectionNet& net, std::ostream& out, const nlohmann::json& metadata = {});
void save_model(const TSNet& net, std::ostream& out, const nlohmann::json& metadata = {});
void save_model(const ElectionNet& net, const std::string& path,
                const nlohmann::json& metadata = {});
void save_model(const TSNet& net, const std::string& path, const nlohmann::json& metadata = {});

ElectionNet load_election_model(std::istream& in);
ElectionNet load_election_model(const std::string& path);
TSNet load_ts_model(std::istream& in);
TSNet load_ts_model(const std::string& path);

// The manifest's "kind" field.
std::string model_kind(const std::string& path);

nlohmann::json config_to_json(const ElectionNetConfig& config);
ElectionNetConfig election_config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const TSNetConfig& config);
TSNetConfig ts_config_from_json(const nlohmann::json& j);

}  // namespace ballot
