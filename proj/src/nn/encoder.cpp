#include "argmine/nn/encoder.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace argmine::nn {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, double stddev,
                     std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, stddev);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
    }
    return m;
}

std::string pair_key(const std::string& argument, const std::string& topic) {
    return argument + "\x1f" + topic;
}

}  // namespace

Tokenizer::Tokenizer(int vocab_size) : vocab_size_(vocab_size) {
    if (vocab_size <= kNumSpecial) throw std::invalid_argument("vocab size too small");
}

std::vector<std::string> Tokenizer::split_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<int> Tokenizer::encode(const std::string& text) const {
    std::vector<int> ids;
    for (const auto& token : split_tokens(text)) {
        const auto bucket = fnv1a(token) % static_cast<std::uint64_t>(vocab_size_ - kNumSpecial);
        ids.push_back(static_cast<int>(bucket) + kNumSpecial);
    }
    return ids;
}

std::vector<int> Tokenizer::encode_pair(const std::string& argument, const std::string& topic,
                                        int max_length) const {
    if (max_length < 1) throw std::invalid_argument("max_length must be >= 1");
    std::vector<int> ids = encode(argument);
    ids.push_back(kSepId);
    const std::vector<int> topic_ids = encode(topic);
    ids.insert(ids.end(), topic_ids.begin(), topic_ids.end());
    if (static_cast<int>(ids.size()) > max_length) ids.resize(max_length);
    return ids;
}

TinyTransformerEncoder::TinyTransformerEncoder(TinyEncoderConfig config)
    : config_(config), tokenizer_(config.vocab_size) {
    if (config_.hidden_size < 1 || config_.num_layers < 1) {
        throw std::invalid_argument("invalid tiny encoder config");
    }
    std::mt19937_64 rng(config_.seed);
    const int h = config_.hidden_size;
    const double init = 0.08;
    token_embedding_ = parameter(random_matrix(config_.vocab_size, h, init, rng));
    position_embedding_ = parameter(random_matrix(config_.max_positions, h, init, rng));
    const int f = h * config_.ffn_multiplier;
    layers_.resize(config_.num_layers);
    for (auto& l : layers_) {
        l.wq = parameter(random_matrix(h, h, init, rng));
        l.bq = parameter(Matrix::Zero(1, h));
        l.wk = parameter(random_matrix(h, h, init, rng));
        l.bk = parameter(Matrix::Zero(1, h));
        l.wv = parameter(random_matrix(h, h, init, rng));
        l.bv = parameter(Matrix::Zero(1, h));
        l.wo = parameter(random_matrix(h, h, init, rng));
        l.bo = parameter(Matrix::Zero(1, h));
        l.ln1_gain = parameter(Matrix::Ones(1, h));
        l.ln1_bias = parameter(Matrix::Zero(1, h));
        l.ln2_gain = parameter(Matrix::Ones(1, h));
        l.ln2_bias = parameter(Matrix::Zero(1, h));
        l.w_ffn1 = parameter(random_matrix(h, f, init, rng));
        l.b_ffn1 = parameter(Matrix::Zero(1, f));
        l.w_ffn2 = parameter(random_matrix(f, h, init, rng));
        l.b_ffn2 = parameter(Matrix::Zero(1, h));
    }
}

std::vector<Var> TinyTransformerEncoder::encode_ids(const std::vector<int>& ids) {
    if (ids.empty()) throw std::invalid_argument("empty token sequence");
    if (static_cast<int>(ids.size()) > config_.max_positions) {
        throw std::invalid_argument("sequence longer than max_positions");
    }
    std::vector<int> positions(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) positions[i] = static_cast<int>(i);

    Var x = add(gather_rows(token_embedding_, ids), gather_rows(position_embedding_, positions));
    std::vector<Var> states;
    states.push_back(x);
    const double scaling = 1.0 / std::sqrt(static_cast<double>(config_.hidden_size));
    for (const auto& l : layers_) {
        const Var q = add_rowwise(matmul(x, l.wq), l.bq);
        const Var k = add_rowwise(matmul(x, l.wk), l.bk);
        const Var v = add_rowwise(matmul(x, l.wv), l.bv);
        const Var attn = softmax_rows(scale(matmul(q, transpose(k)), scaling));
        const Var context = add_rowwise(matmul(matmul(attn, v), l.wo), l.bo);
        const Var x1 = layer_norm_rows(add(x, context), l.ln1_gain, l.ln1_bias);
        const Var hidden = relu(add_rowwise(matmul(x1, l.w_ffn1), l.b_ffn1));
        const Var ffn = add_rowwise(matmul(hidden, l.w_ffn2), l.b_ffn2);
        x = layer_norm_rows(add(x1, ffn), l.ln2_gain, l.ln2_bias);
        states.push_back(x);
    }
    return states;
}

std::vector<Var> TinyTransformerEncoder::encode_states(const PairInput& input, bool /*train_mode*/) {
    std::vector<int> ids = tokenizer_.encode_pair(input.argument_text, input.topic_text,
                                                  std::min(input.max_length, config_.max_positions));
    if (ids.empty()) throw std::invalid_argument("tokenization produced an empty sequence");
    return encode_ids(ids);
}

std::vector<std::pair<std::string, Var>> TinyTransformerEncoder::named_parameters() {
    std::vector<std::pair<std::string, Var>> params;
    params.emplace_back("encoder.token_embedding", token_embedding_);
    params.emplace_back("encoder.position_embedding", position_embedding_);
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const std::string p = "encoder.layer" + std::to_string(i) + ".";
        const auto& l = layers_[i];
        params.emplace_back(p + "wq", l.wq);
        params.emplace_back(p + "bq", l.bq);
        params.emplace_back(p + "wk", l.wk);
        params.emplace_back(p + "bk", l.bk);
        params.emplace_back(p + "wv", l.wv);
        params.emplace_back(p + "bv", l.bv);
        params.emplace_back(p + "wo", l.wo);
        params.emplace_back(p + "bo", l.bo);
        params.emplace_back(p + "ln1_gain", l.ln1_gain);
        params.emplace_back(p + "ln1_bias", l.ln1_bias);
        params.emplace_back(p + "ln2_gain", l.ln2_gain);
        params.emplace_back(p + "ln2_bias", l.ln2_bias);
        params.emplace_back(p + "w_ffn1", l.w_ffn1);
        params.emplace_back(p + "b_ffn1", l.b_ffn1);
        params.emplace_back(p + "w_ffn2", l.w_ffn2);
        params.emplace_back(p + "b_ffn2", l.b_ffn2);
    }
    return params;
}

PrecomputedEncoder::PrecomputedEncoder(int hidden_size, int num_layers)
    : hidden_size_(hidden_size), num_layers_(num_layers) {
    if (hidden_size < 1 || num_layers < 4) {
        throw std::invalid_argument("precomputed encoder needs H >= 1 and >= 4 layers");
    }
}

PrecomputedEncoder PrecomputedEncoder::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open precomputed encoder file: " + path);
    std::string line;
    int hidden = 0;
    int layers = 0;
    std::vector<std::tuple<std::string, std::string, std::vector<std::vector<double>>>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        auto vecs = j.at("layers").get<std::vector<std::vector<double>>>();
        if (vecs.empty() || vecs.front().empty()) {
            throw std::runtime_error(path + ": empty layer vectors");
        }
        if (hidden == 0) {
            layers = static_cast<int>(vecs.size());
            hidden = static_cast<int>(vecs.front().size());
        }
        rows.emplace_back(j.at("argument").get<std::string>(), j.at("topic").get<std::string>(),
                          std::move(vecs));
    }
    PrecomputedEncoder enc(hidden, layers);
    for (auto& [argument, topic, vecs] : rows) enc.add(argument, topic, std::move(vecs));
    return enc;
}

void PrecomputedEncoder::add(const std::string& argument, const std::string& topic,
                             std::vector<std::vector<double>> layer_vectors) {
    if (static_cast<int>(layer_vectors.size()) != num_layers_) {
        throw std::invalid_argument("wrong number of layer vectors");
    }
    std::vector<Matrix> mats;
    for (const auto& v : layer_vectors) {
        if (static_cast<int>(v.size()) != hidden_size_) {
            throw std::invalid_argument("layer vector has wrong width");
        }
        Matrix m(1, hidden_size_);
        for (int i = 0; i < hidden_size_; ++i) m(0, i) = v[i];
        mats.push_back(std::move(m));
    }
    table_[pair_key(argument, topic)] = std::move(mats);
}

std::vector<Var> PrecomputedEncoder::encode_states(const PairInput& input, bool /*train_mode*/) {
    const auto it = table_.find(pair_key(input.argument_text, input.topic_text));
    if (it == table_.end()) {
        throw std::runtime_error("no precomputed states for input pair");
    }
    std::vector<Var> states;
    for (const auto& m : it->second) states.push_back(constant(m));
    return states;
}

Var encode_pair(const PairInput& input, EncoderBackend& backend, Pooling pooling,
                bool train_mode) {
    if (input.argument_text.empty()) throw std::invalid_argument("empty argument text");
    const std::vector<Var> states = backend.encode_states(input, train_mode);
    if (states.size() < 4) {
        throw std::invalid_argument("encoder backend must expose at least 4 layers");
    }
    std::vector<Var> pooled;
    for (std::size_t i = states.size() - 4; i < states.size(); ++i) {
        pooled.push_back(pooling == Pooling::FirstToken ? row(states[i], 0)
                                                        : mean_rows(states[i]));
    }
    return concat_cols(pooled);
}

}  // namespace argmine::nn
