#include "argmine/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace argmine {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Task task) {
    switch (task) {
        case Task::ArgumentQuality: return "argument_quality";
        case Task::ArgumentIdentification: return "argument_identification";
        case Task::EvidenceDetection: return "evidence_detection";
        case Task::EmotionBinary: return "emotion_binary";
    }
    throw std::logic_error("unknown task");
}

Task task_from_string(const std::string& name) {
    if (name == "argument_quality") return Task::ArgumentQuality;
    if (name == "argument_identification") return Task::ArgumentIdentification;
    if (name == "evidence_detection") return Task::EvidenceDetection;
    if (name == "emotion_binary") return Task::EmotionBinary;
    throw std::invalid_argument("unknown task: " + name);
}

bool is_regression_task(Task task) {
    return task == Task::ArgumentQuality || task == Task::EvidenceDetection;
}

std::string to_string(ArgClass c) {
    return c == ArgClass::Argumentative ? "argumentative" : "non-argumentative";
}

std::string to_string(EmotionLabel c) {
    return c == EmotionLabel::Emotional ? "emotional" : "non-emotional";
}

EmotionLabel emotion_label_from_string(const std::string& name) {
    if (name == "emotional") return EmotionLabel::Emotional;
    if (name == "non-emotional") return EmotionLabel::NonEmotional;
    throw std::invalid_argument("unknown emotion label: " + name);
}

namespace {

Label parse_label(const json& j, Task task, const std::string& where) {
    switch (task) {
        case Task::ArgumentQuality:
        case Task::EvidenceDetection: {
            if (!j.is_number()) {
                throw std::invalid_argument(where + ": score label must be a number");
            }
            const double v = j.get<double>();
            if (v < 0.0 || v > 1.0) {
                throw std::invalid_argument(where + ": score label out of range [0, 1]");
            }
            return ScoreLabel{v};
        }
        case Task::ArgumentIdentification: {
            const std::string s = j.get<std::string>();
            if (s == "argumentative") return ArgClass::Argumentative;
            if (s == "non-argumentative") return ArgClass::NonArgumentative;
            throw std::invalid_argument(where + ": unknown class label: " + s);
        }
        case Task::EmotionBinary:
            return emotion_label_from_string(j.get<std::string>());
    }
    throw std::logic_error("unknown task");
}

json label_to_json(const Label& label) {
    if (const auto* s = std::get_if<ScoreLabel>(&label)) return s->value;
    if (const auto* c = std::get_if<ArgClass>(&label)) return to_string(*c);
    return to_string(std::get<EmotionLabel>(label));
}

void validate_record(const LabeledSentence& r, Task task) {
    if (r.text.empty()) throw std::invalid_argument("record " + r.id + ": empty text");
    if (r.topic.empty()) throw std::invalid_argument("record " + r.id + ": missing topic");
    const bool ok = [&] {
        switch (task) {
            case Task::ArgumentQuality:
            case Task::EvidenceDetection:
                return std::holds_alternative<ScoreLabel>(r.label);
            case Task::ArgumentIdentification:
                return std::holds_alternative<ArgClass>(r.label);
            case Task::EmotionBinary:
                return std::holds_alternative<EmotionLabel>(r.label);
        }
        return false;
    }();
    if (!ok) throw std::invalid_argument("record " + r.id + ": label variant does not match task");
    if (const auto* s = std::get_if<ScoreLabel>(&r.label)) {
        if (s->value < 0.0 || s->value > 1.0) {
            throw std::invalid_argument("record " + r.id + ": score out of range [0, 1]");
        }
    }
}

}  // namespace

Corpus make_corpus(Task task, std::vector<LabeledSentence> records) {
    Corpus corpus;
    corpus.task = task;
    std::set<std::string> ids;
    for (const auto& r : records) {
        validate_record(r, task);
        if (!ids.insert(r.id).second) {
            throw std::invalid_argument("duplicate record id: " + r.id);
        }
        corpus.topics.insert(r.topic);
    }
    corpus.records = std::move(records);
    return corpus;
}

Corpus load_corpus(const std::string& path, const DatasetManifest& manifest, Task task,
                   bool strict, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);

    std::vector<LabeledSentence> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::runtime_error(where + ": malformed JSON line: " + e.what());
        }
        LabeledSentence r;
        if (!j.contains("id") || !j.contains("text") || !j.contains("label")) {
            throw std::invalid_argument(where + ": missing required field (id/text/label)");
        }
        r.id = j.at("id").get<std::string>();
        r.text = j.at("text").get<std::string>();
        r.topic = j.value("topic", std::string{});
        if (r.topic.empty()) throw std::invalid_argument(where + ": missing topic");
        r.label = parse_label(j.at("label"), task, where);
        r.dataset = j.value("dataset", manifest.name);
        if (j.contains("annotations")) {
            for (const auto& a : j.at("annotations")) {
                r.annotations.push_back(emotion_label_from_string(a.get<std::string>()));
            }
        }
        records.push_back(std::move(r));
    }

    Corpus corpus = make_corpus(task, std::move(records));

    auto report = [&](const std::string& msg) {
        if (strict) throw std::runtime_error(path + ": " + msg);
        if (warnings) warnings->push_back(path + ": " + msg);
    };
    if (manifest.expected_sentence_count > 0 &&
        static_cast<int>(corpus.size()) != manifest.expected_sentence_count) {
        report("manifest mismatch: expected " + std::to_string(manifest.expected_sentence_count) +
               " sentences, found " + std::to_string(corpus.size()));
    }
    if (manifest.expected_topic_count > 0 &&
        static_cast<int>(corpus.topics.size()) != manifest.expected_topic_count) {
        report("manifest mismatch: expected " + std::to_string(manifest.expected_topic_count) +
               " topics, found " + std::to_string(corpus.topics.size()));
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    for (const auto& r : corpus.records) {
        json j{{"id", r.id}, {"text", r.text}, {"topic", r.topic},
               {"label", label_to_json(r.label)}, {"dataset", r.dataset}};
        if (!r.annotations.empty()) {
            json anns = json::array();
            for (EmotionLabel a : r.annotations) anns.push_back(to_string(a));
            j["annotations"] = anns;
        }
        out << j.dump() << '\n';
    }
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest file: " + path);
    DatasetManifest m;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "name") m.name = value;
        else if (key == "expected_sentence_count") m.expected_sentence_count = std::stoi(value);
        else if (key == "expected_topic_count") m.expected_topic_count = std::stoi(value);
        else if (key == "label_kind") m.label_kind = value;
        else if (key == "source_note") m.source_note = value;
    }
    if (m.name.empty()) throw std::runtime_error(path + ": manifest missing name");
    if (m.expected_sentence_count < 0 || m.expected_topic_count < 0) {
        throw std::runtime_error(path + ": manifest counts must be positive");
    }
    return m;
}

void LabelMapRegistry::register_map(const std::string& schema,
                                    std::map<std::string, EmotionLabel> classes) {
    if (classes.empty()) throw std::invalid_argument("empty label map for schema " + schema);
    maps_[schema] = std::move(classes);
}

void LabelMapRegistry::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open label map file: " + path);
    json j;
    in >> j;
    for (const auto& [schema, classes] : j.items()) {
        std::map<std::string, EmotionLabel> map;
        for (const auto& [cls, target] : classes.items()) {
            map[cls] = emotion_label_from_string(target.get<std::string>());
        }
        register_map(schema, std::move(map));
    }
}

void LabelMapRegistry::load_directory(const std::string& dir) {
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") load_file(entry.path().string());
    }
}

bool LabelMapRegistry::has_schema(const std::string& schema) const {
    return maps_.count(schema) > 0;
}

std::vector<std::string> LabelMapRegistry::schemas() const {
    std::vector<std::string> out;
    for (const auto& [schema, _] : maps_) out.push_back(schema);
    return out;
}

EmotionLabel LabelMapRegistry::unify(const std::string& raw_label,
                                     const std::string& schema) const {
    const auto it = maps_.find(schema);
    if (it == maps_.end()) {
        throw std::invalid_argument("no label map registered for schema: " + schema);
    }
    const auto cls = it->second.find(raw_label);
    if (cls == it->second.end()) {
        throw std::invalid_argument("schema " + schema + " has no mapping for class: " + raw_label);
    }
    return cls->second;
}

MajorityFilterResult majority_filter(const std::vector<LabeledSentence>& records) {
    MajorityFilterResult result;
    for (const auto& r : records) {
        if (r.annotations.empty()) {
            throw std::invalid_argument("record " + r.id + ": no annotations");
        }
        int emotional = 0;
        for (EmotionLabel a : r.annotations) {
            if (a == EmotionLabel::Emotional) ++emotional;
        }
        const int non_emotional = static_cast<int>(r.annotations.size()) - emotional;
        if (emotional == non_emotional) {
            result.dropped_ids.push_back(r.id);
            continue;
        }
        LabeledSentence kept = r;
        if (emotional > non_emotional) {
            kept.label = EmotionLabel::Emotional;
            ++result.kept_emotional;
        } else {
            kept.label = EmotionLabel::NonEmotional;
            ++result.kept_non_emotional;
        }
        result.kept.push_back(std::move(kept));
    }
    return result;
}

}  // namespace argmine
