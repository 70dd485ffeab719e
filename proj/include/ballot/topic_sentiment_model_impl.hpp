#pragma once

#include <algorithm>
#include <set>

namespace ballot {

template <typename Scalar>
void BasicTSNet<Scalar>::declare_parameters() {
  params_ = {};
  params_.add("embedding", vocab_.size(), config_.embedding_dim);
  for (nn::Index l : config_.windows) {
    const std::string name = "conv_w" + std::to_string(l);
    params_.add(name + ".weight", config_.filters, l * config_.embedding_dim);
    params_.add(name + ".bias", 1, config_.filters);
  }
  params_.add("hidden.weight", config_.penultimate, config_.feature_size());
  params_.add("hidden.bias", 1, config_.penultimate);
  params_.add("output.weight", config_.num_classes, config_.penultimate);
  params_.add("output.bias", 1, config_.num_classes);
}

template <typename Scalar>
BasicTSNet<Scalar> BasicTSNet<Scalar>::build(const TSNetConfig& config, WordVocab vocab,
                                             std::vector<std::string> label_names,
                                             int fallback_class, std::uint64_t seed) {
  BasicTSNet net;
  net.config_ = config;
  net.vocab_ = std::move(vocab);
  net.labels_ = std::move(label_names);
  net.fallback_ = fallback_class;
  config.validate();
  if (static_cast<nn::Index>(net.labels_.size()) != config.num_classes)
    throw Error(Errc::config, "ts net: label names do not match the class count");
  if (fallback_class < 0 || fallback_class >= config.num_classes)
    throw Error(Errc::config, "ts net: fallback class out of range");
  net.declare_parameters();

  nn::Rng rng(seed);
  auto& embedding = net.params_[kEmbedding];
  nn::fill_uniform(embedding, -config.embedding_init, config.embedding_init, rng);
  embedding.row(WordVocab::kPad).setZero();
  for (std::size_t w = 0; w < config.windows.size(); ++w) {
    const nn::Index l = config.windows[w];
    nn::glorot_uniform(net.params_[net.conv_weight(w)], l * config.embedding_dim,
                       l * config.filters, rng);
  }
  nn::glorot_uniform(net.params_[net.hidden_weight()], config.feature_size(), config.penultimate,
                     rng);
  nn::glorot_uniform(net.params_[net.output_weight()], config.penultimate, config.num_classes, rng);
  return net;
}

template <typename Scalar>
BasicTSNet<Scalar>::BasicTSNet(TSNetConfig config, WordVocab vocab,
                               std::vector<std::string> label_names, int fallback_class,
                               nn::ParameterSet<Scalar> params)
    : config_(std::move(config)),
      vocab_(std::move(vocab)),
      labels_(std::move(label_names)),
      fallback_(fallback_class) {
  config_.validate();
  if (static_cast<nn::Index>(labels_.size()) != config_.num_classes)
    throw Error(Errc::config, "ts net: label names do not match the class count");
  if (fallback_ < 0 || fallback_ >= config_.num_classes)
    throw Error(Errc::config, "ts net: fallback class out of range");
  declare_parameters();
  if (!params_.same_shape(params))
    throw Error(Errc::shape, "ts net: parameter shapes do not match the configuration");
  if (!params.all_finite()) throw Error(Errc::parameter, "ts net: non-finite parameters");
  params_ = std::move(params);
}

template <typename Scalar>
void BasicTSNet<Scalar>::check_ids(const std::vector<nn::Index>& ids) const {
  if (ids.empty()) throw Error(Errc::empty_input, "ts net: empty token sequence");
  for (nn::Index id : ids)
    if (id < 0 || id >= vocab_.size())
      throw Error(Errc::lookup, "ts net: token id " + std::to_string(id) + " outside vocabulary");
}

template <typename Scalar>
nn::RowVector<Scalar> BasicTSNet<Scalar>::encode_features(const std::vector<nn::Index>& ids,
                                                          ExampleCache* cache) const {
  const auto n = static_cast<nn::Index>(ids.size());
  const auto& embedding = params_[kEmbedding];
  nn::RowVector<Scalar> features(config_.feature_size());
  if (cache) cache->windows.resize(config_.windows.size());
  for (std::size_t w = 0; w < config_.windows.size(); ++w) {
    const nn::Index l = config_.windows[w];
    // Sequences shorter than the window are zero-padded to exactly one window.
    Matrix input = Matrix::Zero(std::max(n, l), config_.embedding_dim);
    for (nn::Index i = 0; i < n; ++i)
      input.row(i) = embedding.row(ids[static_cast<std::size_t>(i)]);
    const nn::Index wt = conv_weight(w);
    Matrix output = nn::conv1d_forward(input, params_[wt], params_[wt + 1], nn::Activation::relu);
    nn::IndexMatrix argmax;
    features.segment(static_cast<nn::Index>(w) * config_.filters, config_.filters) =
        nn::max_over_time(output, cache ? &argmax : nullptr);
    if (cache) cache->windows[w] = {std::move(input), std::move(output), std::move(argmax)};
  }
  return features;
}

template <typename Scalar>
nn::RowVector<Scalar> BasicTSNet<Scalar>::features(const std::vector<nn::Index>& ids) const {
  std::vector<nn::Index> clipped(
      ids.begin(),
      ids.begin() + std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(ids.size()),
                                             static_cast<std::ptrdiff_t>(config_.max_words)));
  check_ids(clipped);
  return encode_features(clipped, nullptr);
}

template <typename Scalar>
std::vector<nn::Index> BasicTSNet<Scalar>::feature_map_rows(
    const std::vector<nn::Index>& ids) const {
  std::vector<nn::Index> clipped(
      ids.begin(),
      ids.begin() + std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(ids.size()),
                                             static_cast<std::ptrdiff_t>(config_.max_words)));
  check_ids(clipped);
  ExampleCache cache;
  encode_features(clipped, &cache);
  std::vector<nn::Index> rows;
  for (const auto& w : cache.windows) rows.push_back(w.output.rows());
  return rows;
}

template <typename Scalar>
nn::Vector<double> BasicTSNet<Scalar>::forward(const std::vector<nn::Index>& ids) const {
  const Matrix f = features(ids);
  const Matrix h = nn::dense_forward(f, params_[hidden_weight()], params_[hidden_weight() + 1],
                                     nn::Activation::relu);
  const Matrix p = nn::dense_forward(h, params_[output_weight()], params_[output_weight() + 1],
                                     nn::Activation::softmax);
  return p.row(0).transpose().template cast<double>();
}

template <typename Scalar>
nn::LossAndGradients<Scalar> BasicTSNet<Scalar>::loss_and_gradients(
    std::span<const std::vector<nn::Index>> inputs, std::span<const int> labels,
    nn::Rng* rng) const {
  if (inputs.empty()) throw Error(Errc::empty_input, "ts net: empty batch");
  if (inputs.size() != labels.size())
    throw Error(Errc::shape, "ts net: " + std::to_string(inputs.size()) + " inputs but " +
                                 std::to_string(labels.size()) + " labels");
  const auto batch = static_cast<nn::Index>(inputs.size());

  std::vector<ExampleCache> caches(inputs.size());
  Matrix features(batch, config_.feature_size());
  for (nn::Index b = 0; b < batch; ++b) {
    const auto ub = static_cast<std::size_t>(b);
    const int label = labels[ub];
    if (label < 0 || label >= config_.num_classes)
      throw Error(Errc::parameter, "ts net: label " + std::to_string(label) + " out of range");
    auto& cache = caches[ub];
    const auto& src = inputs[ub];
    cache.ids.assign(
        src.begin(),
        src.begin() + std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(src.size()),
                                               static_cast<std::ptrdiff_t>(config_.max_words)));
    check_ids(cache.ids);
    if (rng && config_.oov_rate > 0.0) {
      for (auto& id : cache.ids)
        if (nn::uniform01(*rng) < config_.oov_rate) id = WordVocab::kOov;
    }
    features.row(b) = encode_features(cache.ids, &cache);
  }

  Matrix concat_mask;
  Matrix hidden_mask;
  if (rng && config_.dropout_rate > 0.0) {
    concat_mask =
        nn::dropout_mask<Scalar>(batch, config_.feature_size(), config_.dropout_rate, *rng);
    hidden_mask = nn::dropout_mask<Scalar>(batch, config_.penultimate, config_.dropout_rate, *rng);
  }
  const Matrix dropped = concat_mask.size() ? Matrix(features.cwiseProduct(concat_mask)) : features;
  const nn::Index hw = hidden_weight();
  const nn::Index ow = output_weight();
  const Matrix hidden =
      nn::dense_forward(dropped, params_[hw], params_[hw + 1], nn::Activation::relu);
  const Matrix hidden_dropped =
      hidden_mask.size() ? Matrix(hidden.cwiseProduct(hidden_mask)) : hidden;
  const Matrix probs =
      nn::dense_forward(hidden_dropped, params_[ow], params_[ow + 1], nn::Activation::softmax);

  nn::LossAndGradients<Scalar> result{Scalar(0), params_.zeros_like()};
  auto& grads = result.grads;
  Matrix grad = probs;
  for (nn::Index b = 0; b < batch; ++b) {
    const int label = labels[static_cast<std::size_t>(b)];
    result.loss += nn::cross_entropy_loss(label, probs.row(b));
    grad(b, label) -= Scalar(1);
  }
  result.loss /= static_cast<Scalar>(batch);
  grad /= static_cast<Scalar>(batch);

  // Softmax is folded into the logit gradient (probs - onehot).
  Matrix grad_hidden;
  nn::dense_backward(hidden_dropped, params_[ow], probs, grad, nn::Activation::none, grads[ow],
                     grads[ow + 1], &grad_hidden);
  if (hidden_mask.size()) grad_hidden = grad_hidden.cwiseProduct(hidden_mask);
  Matrix grad_features;
  nn::dense_backward(dropped, params_[hw], hidden, grad_hidden, nn::Activation::relu, grads[hw],
                     grads[hw + 1], &grad_features);
  if (concat_mask.size()) grad_features = grad_features.cwiseProduct(concat_mask);

  auto& grad_embedding = grads[kEmbedding];
  for (nn::Index b = 0; b < batch; ++b) {
    const auto& cache = caches[static_cast<std::size_t>(b)];
    const auto n = static_cast<nn::Index>(cache.ids.size());
    for (std::size_t w = 0; w < config_.windows.size(); ++w) {
      const auto& wc = cache.windows[w];
      const nn::Index wt = conv_weight(w);
      const Matrix g = grad_features.row(b).segment(static_cast<nn::Index>(w) * config_.filters,
                                                    config_.filters);
      const Matrix grad_map = nn::maxpool1d_backward(g, wc.argmax, wc.output.rows());
      Matrix grad_input;
      nn::conv1d_backward(wc.input, params_[wt], wc.output, grad_map, nn::Activation::relu,
                          grads[wt], grads[wt + 1], &grad_input);
      for (nn::Index i = 0; i < n; ++i)
        grad_embedding.row(cache.ids[static_cast<std::size_t>(i)]) += grad_input.row(i);
    }
  }
  grad_embedding.row(WordVocab::kPad).setZero();
  return result;
}

template <typename Scalar>
nn::TrainReport train_ts(BasicTSNet<Scalar>& net, std::span<const LabeledTokens> examples,
                         const nn::TrainOptions& options) {
  std::vector<std::vector<nn::Index>> ids;
  std::vector<int> labels;
  std::set<int> classes;
  for (const auto& ex : examples) {
    if (ex.label < 0 || ex.label >= net.config().num_classes)
      throw Error(Errc::parameter, "train_ts: label " + std::to_string(ex.label) + " out of range");
    if (ex.tokens.empty()) continue;
    ids.push_back(net.vocab().encode(ex.tokens));
    labels.push_back(ex.label);
    classes.insert(ex.label);
  }
  if (ids.size() < examples.size())
    warn("train_ts: skipped " + std::to_string(examples.size() - ids.size()) +
         " examples without tokens");
  if (ids.empty()) throw Error(Errc::empty_input, "train_ts: empty dataset");
  if (classes.size() < 2) throw Error(Errc::parameter, "train_ts: dataset has a single class");

  return nn::train_minibatch(net.parameters(), ids.size(), options,
                             [&](const std::vector<std::size_t>& indices, nn::Rng& rng) {
                               std::vector<std::vector<nn::Index>> batch;
                               std::vector<int> targets;
                               batch.reserve(indices.size());
                               for (std::size_t i : indices) {
                                 batch.push_back(ids[i]);
                                 targets.push_back(labels[i]);
                               }
                               return net.loss_and_gradients(batch, targets, &rng);
                             });
}

}  // namespace ballot
