#include "ballot/election_model.hpp"

namespace ballot {

using nn::Activation;
using nn::Index;

ElectionNetConfig ElectionNetConfig::standard() {
  ElectionNetConfig c;
  c.conv = {
      {7, 256, 3, kAlphabetSize},  {7, 256, 3, 256},
      {3, 256, std::nullopt, 256}, {3, 256, std::nullopt, 256},
      {3, 256, std::nullopt, 256},
  };
  c.dense = {
      {2048, 1024, Activation::relu, 0.5},
      {1024, 512, Activation::relu, 0.0},
      {512, 1, Activation::sigmoid, 0.0},
  };
  return c;
}

std::vector<std::pair<Index, Index>> ElectionNetConfig::shape_chain() const {
  if (input_length < 1 || alphabet_size < 1)
    throw Error(Errc::config, "election config: input must be non-empty");
  if (conv.empty()) throw Error(Errc::config, "election config: no convolutional layers");
  if (dense.empty()) throw Error(Errc::config, "election config: no dense layers");

  std::vector<std::pair<Index, Index>> chain{{input_length, alphabet_size}};
  Index rows = input_length;
  Index channels = alphabet_size;
  for (std::size_t i = 0; i < conv.size(); ++i) {
    const auto& c = conv[i];
    const std::string where = "election config: conv layer " + std::to_string(i + 1);
    c.validate();
    if (c.in_channels != channels)
      throw Error(Errc::config, where + " expects " + std::to_string(c.in_channels) +
                                    " channels but receives " + std::to_string(channels));
    rows = rows - c.window + 1;
    if (rows < 1) throw Error(Errc::config, where + " window exceeds its input length");
    chain.emplace_back(rows, c.filters);
    if (c.pool) {
      if (rows < *c.pool) throw Error(Errc::config, where + " pool exceeds its input length");
      rows /= *c.pool;
      chain.emplace_back(rows, c.filters);
    }
    channels = c.filters;
  }
  Index width = rows * channels;
  chain.emplace_back(1, width);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    const auto& d = dense[i];
    const std::string where = "election config: dense layer " + std::to_string(i + 1);
    d.validate();
    if (d.in_size != width)
      throw Error(Errc::config, where + " expects " + std::to_string(d.in_size) +
                                    " inputs but receives " + std::to_string(width));
    if (d.activation == Activation::softmax)
      throw Error(Errc::config, where + " cannot use softmax");
    width = d.out_size;
    chain.emplace_back(1, width);
  }
  const auto& out = dense.back();
  if (out.out_size != 1 || out.activation != Activation::sigmoid || out.dropout_rate != 0.0)
    throw Error(Errc::config, "election config: output layer must be one sigmoid unit");
  return chain;
}

void ElectionNetConfig::validate() const { (void)shape_chain(); }

Index ElectionNetConfig::flatten_size() const { return dense.front().in_size; }

CharMatrix ElectionNetConfig::encode(std::string_view text) const {
  return encode_tweet(text, Alphabet::standard(), static_cast<int>(input_length));
}

ElectionDecision decide_election(double score, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw Error(Errc::parameter,
                "election threshold " + std::to_string(threshold) + " outside (0,1)");
  return {score >= threshold, score};
}

ElectionDecision classify_election(const ElectionNet& net, std::string_view text,
                                   double threshold) {
  decide_election(0.5, threshold);
  const double score = net.forward(net.config().encode(text));
  return decide_election(score, threshold);
}

}  // namespace ballot
