#include "slotnet/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "slotnet/config.hpp"
#include "slotnet/csv.hpp"
#include "slotnet/experiments.hpp"
#include "slotnet/logic.hpp"
#include "slotnet/network_io.hpp"

namespace slotnet::cli {

namespace {

struct Options {
    std::optional<std::string> config;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> manifest;
    std::optional<std::string> save;
    std::optional<std::string> load;
    std::optional<std::string> expr;
    bool dump = false;
};

const std::vector<std::pair<std::string, std::string>>& commands()
{
    static const std::vector<std::pair<std::string, std::string>> list{
        {"stdp", "spike-timing window: weight change against pre/post interval"},
        {"hebb", "EPSP-driven LTP signal approaching the rate product"},
        {"freq", "net weight change against presynaptic frequency"},
        {"forget", "retention curves after k rehearsals"},
        {"interfere", "retrieval scores of two overlapping patterns"},
        {"savings", "epochs to learn, forget and relearn a pattern"},
        {"grow", "grow a layered network on a pattern set and test retrieval"},
        {"logic", "compile a boolean expression into a slot network"},
        {"xor", "truth table of the compiled XOR network"},
    };
    return list;
}

ProtocolResult truth_table(const logic::SlotNetwork& net, const logic::Dnf& dnf)
{
    ProtocolResult r;
    r.name = "logic";
    r.columns = net.atoms;
    r.columns.push_back("expected");
    r.columns.push_back("network");
    const std::size_t n = net.atoms.size();
    for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
        logic::Assignment a;
        std::vector<double> row;
        for (std::size_t i = 0; i < n; ++i) {
            const bool v = (bits >> (n - 1 - i)) & 1U;
            a[net.atoms[i]] = v;
            row.push_back(v ? 1.0 : 0.0);
        }
        row.push_back(logic::evaluate(dnf, a) ? 1.0 : 0.0);
        row.push_back(logic::eval_network(net, a) ? 1.0 : 0.0);
        r.rows.push_back(std::move(row));
    }
    return r;
}

void write_manifest(const std::string& path, const RunConfig& config, const std::string& command,
                    const Options& o)
{
    nlohmann::json doc = to_json(config);
    nlohmann::json artifact{{"name", kArtifactName}, {"version", kArtifactVersion}, {"command", command}};
    if (o.load) artifact["load"] = *o.load;
    doc["artifact"] = std::move(artifact);
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write manifest '" + path + "'");
    }
    out << doc.dump(2) << '\n';
}

int execute(const std::string& command, const Options& o, std::ostream& out)
{
    RunConfig config = load_config(o.config, o.sets);
    if (o.seed) {
        config.params.seed = *o.seed;
    }
    if (o.expr) {
        config.logic_expr = *o.expr;
    }

    ProtocolResult result;
    std::optional<std::string> text;
    if (command == "stdp") {
        result = stdp_protocol(config.stdp, config.params);
    } else if (command == "hebb") {
        result = hebb_protocol(config.hebb, config.params);
    } else if (command == "freq") {
        result = frequency_protocol(config.freq, config.params);
    } else if (command == "forget") {
        result = forgetting_protocol(config.forget, config.params);
    } else if (command == "interfere") {
        result = interference_protocol(config.interfere, config.params);
    } else if (command == "savings") {
        result = savings_protocol(config.savings, config.params);
    } else if (command == "grow") {
        Network net = o.load ? load_network_file(*o.load)
                             : init_network(config.growth, config.params, config.params.seed);
        result = grow_protocol(net, config.grow);
        if (o.save) save_network_file(net, *o.save);
    } else if (command == "logic") {
        const auto dnf = logic::to_dnf(logic::parse_expr(config.logic_expr));
        const auto net = logic::compile(dnf);
        if (o.dump) {
            text = logic::dump(net);
        } else {
            result = truth_table(net, dnf);
        }
    } else if (command == "xor") {
        const auto net = logic::xor_network();
        result = truth_table(net, logic::to_dnf(logic::parse_expr("(x1 & !x2) | (!x1 & x2)")));
        result.name = "xor";
        result.columns = {"x1", "x2", "out"};
        for (auto& row : result.rows) row.erase(row.begin() + 2);
    }

    if (o.out) {
        std::ofstream file(*o.out);
        if (!file) {
            throw std::runtime_error("cannot write output '" + *o.out + "'");
        }
        text ? void(file << *text) : write_csv(file, result);
    } else {
        text ? void(out << *text) : write_csv(out, result);
    }
    if (o.manifest || o.out) {
        write_manifest(o.manifest ? *o.manifest : *o.out + ".manifest.json", config, command, o);
    }
    return kOk;
}

}  // namespace

std::string parameter_help()
{
    std::ostringstream s;
    s << "Configuration keys (JSON file via --config, or --set key=value):\n";
    const RunConfig defaults;
    const auto doc = to_json(defaults);
    for (const auto& p : parameter_table()) {
        nlohmann::json::json_pointer ptr("/" + [&] {
            std::string k = p.key;
            std::replace(k.begin(), k.end(), '.', '/');
            return k;
        }());
        s << "  " << p.key << " - " << p.help << " (default " << doc.at(ptr).dump() << ")\n";
    }
    return s.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Simulation engine for slot-coded neural networks", "slotnet"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kArtifactVersion);
    const std::string footer = parameter_help();
    app.footer(footer);

    Options o;
    for (const auto& [name, description] : commands()) {
        auto* sub = app.add_subcommand(name, description);
        sub->add_option("--config", o.config, "JSON configuration file (a run manifest works too)");
        sub->add_option("--set", o.sets, "override one key, e.g. --set neuron.c7=2")->take_all();
        sub->add_option("--seed", o.seed, "random seed (overrides sim.seed)");
        sub->add_option("--out", o.out, "CSV output file (default stdout)");
        sub->add_option("--manifest", o.manifest, "run manifest path (default <out>.manifest.json)");
        if (name == "grow") {
            sub->add_option("--save", o.save, "write the trained network here");
            sub->add_option("--load", o.load, "start from a saved network");
        }
        if (name == "logic") {
            sub->add_option("--expr", o.expr, "expression, e.g. \"(a & !b) | c\"");
            sub->add_flag("--dump", o.dump, "print the compiled network instead of its truth table");
        }
        sub->footer(footer);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kArtifactVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::Normal);
        return kConfigError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return execute(command, o, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const logic::ParseError& e) {
        err << "expression error: " << e.what() << '\n';
        return kConfigError;
    } catch (const logic::LogicError& e) {
        err << "expression error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

}  // namespace slotnet::cli
