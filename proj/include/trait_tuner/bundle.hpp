#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "nn/tensor_io.hpp"

namespace trait_tuner {

inline constexpr int bundle_format_version = 1;

/// A loaded bundle: ready-to-use predictor plus the data transforms that
/// were in force when it was trained.
struct LoadedBundle {
    EnsembleModel model;
    NormalizationStats stats;
    BinarizationRule rule;
    nlohmann::json manifest;

    std::vector<TraitVector> predict(std::span<const std::string> texts, std::size_t batch_size = 16) const {
        return ensemble_predict(model, texts, batch_size);
    }
};

/// Writes manifest.json, member_<k>.bin, normalization.json, thresholds.json
/// (and vocab.txt for wordpiece encoders) into `dir`. Returns the manifest.
inline nlohmann::json save_bundle(std::span<const RegressionModel> members, std::span<const std::uint64_t> seeds,
                                  const NormalizationStats& stats, const BinarizationRule& rule,
                                  const std::filesystem::path& dir, const nlohmann::json& plan_snapshot = {}) {
    if (members.empty()) throw ArgumentError("save_bundle: no model");
    if (seeds.size() != members.size()) throw ArgumentError("save_bundle: one seed per member required");
    stats.validate();
    rule.validate();
    std::filesystem::create_directories(dir);

    const RegressionModel& first = members.front();
    nlohmann::json tokenizer = {{"kind", nn::tokenizer_kind_name(first.tokenizer().kind())},
                                {"lowercase", first.tokenizer().lowercase()}};
    if (first.tokenizer().kind() == nn::TokenizerKind::wordpiece) {
        std::string vocab;
        for (const auto& tok : first.tokenizer().vocabulary()) vocab += tok + "\n";
        io::write_text(dir / "vocab.txt", vocab);
        tokenizer["vocab"] = "vocab.txt";
    }
    nlohmann::json encoder = to_json(first.encoder_spec());
    encoder["architecture"] = nn::to_json(first.encoder_config());
    encoder["tokenizer"] = tokenizer;

    nlohmann::json member_list = nlohmann::json::array();
    for (std::size_t k = 0; k < members.size(); ++k) {
        const std::string file = "member_" + std::to_string(k) + ".bin";
        nn::save_tensors(dir / file, members[k].params());
        member_list.push_back({{"seed", seeds[k]}, {"weights", file}, {"checksum", to_hex(members[k].checksum())}});
    }
    save_stats(dir / "normalization.json", stats);
    io::write_json(dir / "thresholds.json", to_json(rule));

    nlohmann::json manifest = {{"format_version", bundle_format_version},
                               {"encoder", encoder},
                               {"pooling", "mean"},
                               {"head", to_json(first.head_spec())},
                               {"members", member_list},
                               {"seeds", std::vector<std::uint64_t>(seeds.begin(), seeds.end())},
                               {"normalization", to_json(stats)},
                               {"thresholds", to_json(rule)},
                               {"plan", plan_snapshot}};
    io::write_json(dir / "manifest.json", manifest);
    return manifest;
}

inline LoadedBundle load_bundle(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw LoadError("bundle directory not found: " + dir.string());
    for (const char* part : {"manifest.json", "normalization.json", "thresholds.json"})
        if (!std::filesystem::exists(dir / part))
            throw LoadError("incomplete bundle " + dir.string() + ": missing " + part);
    LoadedBundle bundle;
    bundle.manifest = io::read_json(dir / "manifest.json");
    bundle.stats = load_stats(dir / "normalization.json");
    bundle.rule = rule_from_json(io::read_json(dir / "thresholds.json"));
    try {
        const auto& m = bundle.manifest;
        if (m.at("format_version").get<int>() != bundle_format_version)
            throw LoadError("unsupported bundle format in " + dir.string());
        const EncoderSpec enc = encoder_spec_from_json(m.at("encoder"));
        const nn::EncoderConfig arch = nn::encoder_config_from_json(m.at("encoder").at("architecture"));
        const HeadSpec head = head_spec_from_json(m.at("head"));
        const auto& tok = m.at("encoder").at("tokenizer");
        const auto kind = nn::tokenizer_kind_from_name(tok.at("kind").get<std::string>());
        const nn::Tokenizer tokenizer =
            kind == nn::TokenizerKind::hashed
                ? nn::Tokenizer::hashed(arch.vocab_size)
                : nn::Tokenizer::wordpiece_from_file(dir / tok.at("vocab").get<std::string>(), tok.value("lowercase", true));
        if (m.at("members").empty()) throw LoadError("incomplete bundle " + dir.string() + ": no members");
        for (const auto& member : m.at("members")) {
            const auto file = dir / member.at("weights").get<std::string>();
            if (!std::filesystem::exists(file))
                throw LoadError("incomplete bundle " + dir.string() + ": missing weights " + file.filename().string());
            RegressionModel model = build_from_architecture(enc, head, arch, tokenizer);
            nn::assign_tensors(nn::load_tensors(file), model.params(), file.string());
            bundle.model.members.push_back(std::move(model));
        }
    } catch (const nlohmann::json::exception& e) {
        throw LoadError("malformed bundle manifest in " + dir.string() + ": " + e.what());
    }
    return bundle;
}

} // namespace trait_tuner
