#include "lossbal/network/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lossbal/error.hpp"

namespace lossbal::nn {

using nlohmann::json;

std::string checkpoint_to_json(const Checkpoint& checkpoint) {
    const auto& cfg = checkpoint.params.config;
    json doc;
    doc["format_version"] = kCheckpointFormatVersion;
    doc["config"] = {
        {"input_dim", cfg.input_dim},
        {"output_dim", cfg.output_dim},
        {"hidden_layers", cfg.hidden_layers},
        {"neurons", cfg.neurons},
        {"activation", std::string(to_string(cfg.activation))},
        {"gain", cfg.effective_gain()},
    };
    doc["seed"] = cfg.seed;
    doc["norm_stats"] = {{"mean", checkpoint.stats.mean}, {"stddev", checkpoint.stats.stddev}};
    doc["parameter_ordering"] = kParameterOrdering;
    doc["parameters"] = checkpoint.params.flatten();
    return doc.dump(1);
}

Checkpoint checkpoint_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("checkpoint: malformed JSON: ") + e.what());
    }
    try {
        if (doc.at("format_version").get<int>() != kCheckpointFormatVersion)
            throw Error("checkpoint: unsupported format_version");
        if (doc.at("parameter_ordering").get<std::string>() != kParameterOrdering)
            throw Error("checkpoint: unknown parameter ordering");
        const auto& c = doc.at("config");
        MlpConfig cfg;
        cfg.input_dim = c.at("input_dim").get<std::size_t>();
        cfg.output_dim = c.at("output_dim").get<std::size_t>();
        cfg.hidden_layers = c.at("hidden_layers").get<std::size_t>();
        cfg.neurons = c.at("neurons").get<std::size_t>();
        cfg.activation = parse_activation(c.at("activation").get<std::string>());
        cfg.gain = c.at("gain").get<double>();
        cfg.seed = doc.at("seed").get<std::uint64_t>();

        Checkpoint out;
        out.params = init_mlp(cfg);
        out.params.assign(doc.at("parameters").get<std::vector<double>>());
        out.stats.mean = doc.at("norm_stats").at("mean").get<std::vector<double>>();
        out.stats.stddev = doc.at("norm_stats").at("stddev").get<std::vector<double>>();
        if (out.stats.mean.size() != cfg.input_dim || out.stats.stddev.size() != cfg.input_dim)
            throw Error("checkpoint: norm stats dimension mismatch");
        return out;
    } catch (const json::exception& e) {
        throw Error(std::string("checkpoint: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw Error(std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write checkpoint " + path.string());
    out << checkpoint_to_json(checkpoint) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read checkpoint " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_json(ss.str());
}

}  // namespace lossbal::nn
