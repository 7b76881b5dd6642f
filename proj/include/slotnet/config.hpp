#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "slotnet/experiments.hpp"
#include "slotnet/growth.hpp"
#include "slotnet/model.hpp"

namespace slotnet {

// Everything a CLI run needs besides the subcommand and file paths.
struct RunConfig {
    ModelParams params;
    GrowthConfig growth;
    GrowOptions grow;
    StdpOptions stdp;
    HebbOptions hebb;
    FrequencyOptions freq;
    ForgettingOptions forget;
    InterferenceOptions interfere;
    SavingsOptions savings;
    std::string logic_expr = "(x1 & !x2) | (!x1 & x2)";

    void validate() const;
};

struct ParamInfo {
    std::string key;
    std::string help;
};

// Every configuration key with a one-line description, in display order.
std::vector<ParamInfo> parameter_table();

// Nested JSON document holding every key, e.g. {"neuron": {"c0": 1, ...}, ...}.
nlohmann::json to_json(const RunConfig& config);

// Applies a nested document on top of `base`. Unknown keys are rejected.
// Top-level keys listed in `ignored` (such as a manifest's "artifact") are skipped.
RunConfig apply_json(RunConfig base, const nlohmann::json& doc, const std::vector<std::string>& ignored = {});

// Applies one dotted override "key=value"; the value is read as JSON when
// possible and as a bare string otherwise.
void apply_override(RunConfig& config, const std::string& assignment);

// File (optional) first, then overrides; the result is validated.
RunConfig load_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides);

// Model and layout keys only, as stored next to a saved network.
nlohmann::json model_to_json(const ModelParams& params, const GrowthConfig& growth);
void model_from_json(const nlohmann::json& doc, ModelParams& params, GrowthConfig& growth);

}  // namespace slotnet
