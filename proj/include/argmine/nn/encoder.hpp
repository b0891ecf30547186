#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "argmine/nn/autograd.hpp"

namespace argmine::nn {

/// Deterministic hashing tokenizer with a reserved separator token.
/// Lower-cases, splits on non-alphanumeric characters and maps tokens into a
/// fixed id space via FNV-1a.
class Tokenizer {
  public:
    explicit Tokenizer(int vocab_size = 1024);

    int vocab_size() const { return vocab_size_; }
    int sep_id() const { return kSepId; }

    std::vector<int> encode(const std::string& text) const;

    // tokens(argument) ++ [SEP] ++ tokens(topic), truncated to max_length.
    std::vector<int> encode_pair(const std::string& argument, const std::string& topic,
                                 int max_length) const;

    static std::vector<std::string> split_tokens(const std::string& text);

  private:
    static constexpr int kSepId = 0;
    static constexpr int kNumSpecial = 1;
    int vocab_size_;
};

enum class Pooling { FirstToken, Mean };

struct PairInput {
    std::string argument_text;
    std::string topic_text;
    int max_length = 128;
};

/// Pluggable text encoder. `encode_states` returns the per-layer hidden
/// states (each T x H); backends must expose at least four layers.
class EncoderBackend {
  public:
    virtual ~EncoderBackend() = default;

    virtual int hidden_size() const = 0;
    virtual int num_layers() const = 0;
    virtual const Tokenizer& tokenizer() const = 0;

    virtual std::vector<Var> encode_states(const PairInput& input, bool train_mode) = 0;

    // Trainable parameters, empty for frozen backends.
    virtual std::vector<std::pair<std::string, Var>> named_parameters() { return {}; }
};

struct TinyEncoderConfig {
    int hidden_size = 32;
    int num_layers = 4;
    int vocab_size = 1024;
    int max_positions = 128;
    int ffn_multiplier = 2;
    std::uint64_t seed = 7;
};

/// Small randomly initialized transformer used for desk-scale experiments and
/// deterministic tests. Single-head self-attention, pre-softmax 1/sqrt(H)
/// scaling, residual + layer norm, ReLU feed-forward.
class TinyTransformerEncoder : public EncoderBackend {
  public:
    explicit TinyTransformerEncoder(TinyEncoderConfig config = {});

    int hidden_size() const override { return config_.hidden_size; }
    int num_layers() const override { return config_.num_layers; }
    const Tokenizer& tokenizer() const override { return tokenizer_; }

    std::vector<Var> encode_states(const PairInput& input, bool train_mode) override;
    std::vector<Var> encode_ids(const std::vector<int>& ids);

    std::vector<std::pair<std::string, Var>> named_parameters() override;

    const TinyEncoderConfig& config() const { return config_; }

  private:
    struct Layer {
        Var wq, bq, wk, bk, wv, bv, wo, bo;
        Var ln1_gain, ln1_bias, ln2_gain, ln2_bias;
        Var w_ffn1, b_ffn1, w_ffn2, b_ffn2;
    };

    TinyEncoderConfig config_;
    Tokenizer tokenizer_;
    Var token_embedding_;
    Var position_embedding_;
    std::vector<Layer> layers_;
};

/// Frozen backend serving per-layer sentence vectors looked up by
/// (argument, topic) key, e.g. exported from a large pretrained model.
/// File format: one JSON object per line with fields
/// {"argument", "topic", "layers": [[...H floats...] x num_layers]}.
class PrecomputedEncoder : public EncoderBackend {
  public:
    PrecomputedEncoder(int hidden_size, int num_layers);

    static PrecomputedEncoder load(const std::string& path);

    void add(const std::string& argument, const std::string& topic,
             std::vector<std::vector<double>> layer_vectors);

    int hidden_size() const override { return hidden_size_; }
    int num_layers() const override { return num_layers_; }
    const Tokenizer& tokenizer() const override { return tokenizer_; }

    std::vector<Var> encode_states(const PairInput& input, bool train_mode) override;

  private:
    int hidden_size_;
    int num_layers_;
    Tokenizer tokenizer_;
    std::map<std::string, std::vector<Matrix>> table_;
};

// Concatenation of the last four layers' pooled sentence representations;
// result is 1 x 4H. Throws when the argument text is empty, the backend has
// fewer than four layers, or truncation leaves no tokens.
Var encode_pair(const PairInput& input, EncoderBackend& backend,
                Pooling pooling = Pooling::FirstToken, bool train_mode = false);

}  // namespace argmine::nn
