#include "slotnet/network_io.hpp"

#include <fstream>

#include "json.hpp"

#include "slotnet/config.hpp"

namespace slotnet {

using nlohmann::json;

namespace {

const char* status_name(NeuronStatus s)
{
    switch (s) {
    case NeuronStatus::Free: return "free";
    case NeuronStatus::Coding: return "coding";
    case NeuronStatus::Dead: return "dead";
    }
    return "free";
}

NeuronStatus status_from(const std::string& name)
{
    if (name == "free") return NeuronStatus::Free;
    if (name == "coding") return NeuronStatus::Coding;
    if (name == "dead") return NeuronStatus::Dead;
    throw FormatError("unknown neuron status '" + name + "'");
}

}  // namespace

void save_network(const Network& net, std::ostream& out)
{
    json doc;
    doc["format"] = kNetworkFormat;
    doc["schema_version"] = kNetworkSchemaVersion;
    doc["rng_seed"] = net.rng_seed;
    doc["model"] = model_to_json(net.params, net.config);
    json layers = json::array();
    for (const auto& layer : net.layers) {
        json neurons = json::array();
        for (const auto& n : layer) {
            json dendrites = json::array();
            for (const auto& d : n.dendrites) {
                const auto& s = d.synapse;
                dendrites.push_back({d.line, s.w, s.r, s.w_d, s.r_d, s.alive});
            }
            neurons.push_back({{"field", n.field}, {"status", status_name(n.status)}, {"bias", n.bias},
                               {"dendrites", std::move(dendrites)}});
        }
        layers.push_back(std::move(neurons));
    }
    doc["layers"] = std::move(layers);
    out << doc.dump(1) << '\n';
}

Network load_network(std::istream& in)
{
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("network file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != kNetworkFormat) {
        throw FormatError("not a slotnet network file");
    }
    if (doc.value("schema_version", -1) != kNetworkSchemaVersion) {
        throw FormatError("unsupported network schema version " + doc.value("schema_version", json(nullptr)).dump());
    }
    try {
        Network net;
        model_from_json(doc.at("model"), net.params, net.config);
        net.config.validate();
        net.params.validate();
        net.rng_seed = doc.at("rng_seed").get<std::uint64_t>();
        const auto& layers = doc.at("layers");
        if (layers.size() != net.config.layer_sizes.size()) {
            throw FormatError("layer count does not match the stored layout");
        }
        for (std::size_t l = 0; l < layers.size(); ++l) {
            if (layers[l].size() != net.config.layer_sizes[l]) {
                throw FormatError("layer " + std::to_string(l + 1) + " size does not match the stored layout");
            }
            std::vector<GrowthNeuron> neurons;
            for (const auto& jn : layers[l]) {
                GrowthNeuron n;
                n.field = jn.at("field").get<std::size_t>();
                n.status = status_from(jn.at("status").get<std::string>());
                n.bias = jn.at("bias").get<double>();
                for (const auto& jd : jn.at("dendrites")) {
                    Dendrite d;
                    d.line = jd.at(0).get<std::size_t>();
                    d.synapse = SynapseState{jd.at(1).get<double>(), jd.at(2).get<double>(), jd.at(3).get<double>(),
                                             jd.at(4).get<double>(), jd.at(5).get<bool>()};
                    n.dendrites.push_back(d);
                }
                neurons.push_back(std::move(n));
            }
            net.layers.push_back(std::move(neurons));
        }
        return net;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed network file: ") + e.what());
    } catch (const ConfigError& e) {
        throw FormatError(std::string("malformed network file: ") + e.what());
    }
}

void save_network_file(const Network& net, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write network file '" + path + "'");
    }
    save_network(net, out);
}

Network load_network_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open network file '" + path + "'");
    }
    return load_network(in);
}

}  // namespace slotnet
