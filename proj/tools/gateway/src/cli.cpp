// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/gateway/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "tibsa/error.hpp"
#include "tibsa/gateway/http_service.hpp"
#include "tibsa/gateway/render.hpp"
#include "tibsa/gateway/workspace.hpp"

namespace tibsa::gateway {

using nlohmann::json;

int exit_code_for(const std::exception& e) {
    return dynamic_cast<const IoError*>(&e) != nullptr ? 2 : 1;
}

namespace {

const std::vector<std::pair<std::string, std::string>> kControlColumns = {
    {"rank", "rank"}, {"control_id", "control_id"}, {"benefit", "benefit"}, {"cost", "cost"}, {"ratio", "display_ratio"}};
const std::vector<std::pair<std::string, std::string>> kTtpColumns = {
    {"rank", "rank"}, {"ttp_id", "ttp_id"}, {"weighted_total", "weighted_total"}, {"divergence", "divergence_flags"}};
const std::vector<std::pair<std::string, std::string>> kClassColumns = {
    {"ttp_id", "ttp_id"}, {"class", "class"}, {"sphere", "sphere"}, {"rationale", "rationale"}};

std::vector<CatalogInput> read_catalogs(const std::vector<std::string>& specs, const std::string& kind,
                                        const std::vector<std::string>& files) {
    std::vector<CatalogInput> inputs;
    for (const auto& spec : specs) inputs.push_back(read_catalog(spec));
    if (!files.empty()) {
        if (kind.empty()) throw ParseError("--kind", "positional catalog files need --kind");
        for (const auto& f : files) inputs.push_back(read_catalog(kb::parse_catalog_kind(kind), f));
    }
    return inputs;
}

/// "CONTROL:TTP:DT.H"
json parse_set_level(const std::string& spec) {
    const auto a = spec.find(':');
    const auto b = a == std::string::npos ? a : spec.find(':', a + 1);
    const auto dot = spec.rfind('.');
    if (b == std::string::npos || dot == std::string::npos || dot < b) {
        throw ParseError("--set-level", "expected CONTROL:TTP:CODE.LEVEL, got '" + spec + "'");
    }
    return {{"kind", "change_level"},
            {"control_id", spec.substr(0, a)},
            {"ttp_id", spec.substr(a + 1, b - a - 1)},
            {"criterion", spec.substr(b + 1, dot - b - 1)},
            {"level", spec.substr(dot + 1)}};
}

std::string default_actor(const EnvLookup& env) {
    if (auto user = env("USER"); user && !user->empty()) return *user;
    return "cli";
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env,
            const registry::Clock& clock) {
    CLI::App app{"Threat-intelligence based security assessment engine", "tibsa"};
    app.require_subcommand(1);

    GatewayConfig config;
    try {
        config = apply_env(config, env);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    std::string format_text = "json";
    std::string mode_text = std::string(registry::to_string(config.mode));
    std::string actor = default_actor(env);

    app.add_option("--register", config.register_path, "Register file (empty: in-memory)");
    app.add_option("--format", format_text, "Output format")->check(CLI::IsMember({"json", "table", "csv"}));
    app.add_option("--probable-threshold", config.probable_threshold, "Evidence level counted as probable");
    app.add_option("--divergence-threshold", config.divergence_threshold, "Assessor range flagged as divergent");
    app.add_option("--max-depth", config.max_depth, "Longest attack path, in edges");
    app.add_option("--mode", mode_text, "Default assessment mode")->check(CLI::IsMember({"full", "rapid"}));
    app.add_option("--rubric", config.rubric_path, "Rubric file");
    app.add_option("--matrix-config", config.matrix_config_path, "Score matrix config file");
    app.add_option("--actor", actor, "Name recorded in the audit log");

    std::vector<std::string> catalogs;
    std::vector<std::string> files;
    std::string kind;
    std::string assessment;
    std::string cti_path;
    std::string landscape_path;
    std::string path_arg;
    std::string text_arg;
    std::string of = "controls";
    std::vector<std::string> set_levels;
    std::vector<std::string> removals;
    bool flag = false;

    auto* ingest = app.add_subcommand("ingest", "Parse and merge knowledge-base catalogs");
    ingest->add_option("--catalog", catalogs, "KIND=PATH, repeatable");
    ingest->add_option("--kind", kind, "Kind for positional files");
    ingest->add_option("files", files, "Catalog files");
    ingest->add_flag("--store", flag, "Keep the snapshot in the register");

    auto* graph_cmd = app.add_subcommand("graph", "Build or export causal graphs");
    graph_cmd->require_subcommand(1);
    auto* graph_build = graph_cmd->add_subcommand("build", "Build a graph from catalogs, CTI and landscape");
    graph_build->add_option("--catalog", catalogs, "KIND=PATH, repeatable")->required();
    graph_build->add_option("--cti", cti_path, "CTI report")->required();
    graph_build->add_option("--landscape", landscape_path, "Landscape inventory")->required();
    auto* graph_export = graph_cmd->add_subcommand("export", "Export an assessment's graph");
    graph_export->add_option("--assessment", assessment, "Assessment id")->required();

    auto* create = app.add_subcommand("create", "Create an assessment");
    create->add_option("--id", assessment, "Assessment id")->required();
    create->add_option("--catalog", catalogs, "KIND=PATH, repeatable");
    create->add_option("--kb-hash", text_arg, "Stored knowledge-base snapshot");
    create->add_option("--cti", cti_path, "CTI report")->required();
    create->add_option("--landscape", landscape_path, "Landscape inventory")->required();

    auto* classify = app.add_subcommand("classify", "Classify TTPs");
    classify->add_option("--assessment", assessment, "Assessment id");
    classify->add_option("--catalog", catalogs, "KIND=PATH, repeatable");
    classify->add_option("--cti", cti_path, "CTI report");
    classify->add_option("--landscape", landscape_path, "Landscape inventory");

    auto* score = app.add_subcommand("score", "Submit or aggregate assessor scores");
    score->require_subcommand(1);
    auto* score_submit = score->add_subcommand("submit", "Submit scores");
    score_submit->add_option("--assessment", assessment, "Assessment id")->required();
    score_submit->add_option("--scores", path_arg, "Scores file")->required();
    auto* score_aggregate = score->add_subcommand("aggregate", "Aggregate submitted scores");
    score_aggregate->add_option("--assessment", assessment, "Assessment id")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Run the pipeline and rank controls");
    evaluate->add_option("--assessment", assessment, "Assessment id")->required();
    evaluate->add_option("--controls", path_arg, "Control inventory file");

    auto* rank = app.add_subcommand("rank", "Show the TTP or control ranking");
    rank->add_option("--assessment", assessment, "Assessment id")->required();
    rank->add_option("--of", of, "ttps or controls")->check(CLI::IsMember({"ttps", "controls"}));

    auto* whatif = app.add_subcommand("whatif", "Evaluate control changes without applying them");
    whatif->add_option("--assessment", assessment, "Assessment id")->required();
    whatif->add_option("--changes", path_arg, "Changes file");
    whatif->add_option("--set-level", set_levels, "CONTROL:TTP:CODE.LEVEL, repeatable");
    whatif->add_option("--remove-control", removals, "Control id, repeatable");

    auto* report = app.add_subcommand("report", "Generate the assessment report");
    report->add_option("--assessment", assessment, "Assessment id")->required();
    report->add_option("--signoff", text_arg, "Stakeholder sign-off");
    report->add_option("--out", path_arg, "Also write the markup report here");

    auto* list = app.add_subcommand("list", "List assessments");

    auto* serve = app.add_subcommand("serve", "Serve the JSON API");
    serve->add_option("--host", config.host, "Listen address");
    serve->add_option("--port", config.port, "Listen port");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << app.help();
        return 1;
    }

    try {
        config.mode = registry::parse_mode(mode_text);
        const Format format = parse_format(format_text);
        auto emit = [&](const json& doc, const std::optional<Table>& table = std::nullopt) {
            out << render(doc, table, format);
        };

        if (ingest->parsed()) {
            Workspace ws(config, clock);
            const auto doc = ws.ingest(read_catalogs(catalogs, kind, files), flag);
            Table t{{"kind", "count"},
                    {{"techniques", cell_text(doc["techniques"])},
                     {"attack_patterns", cell_text(doc["attack_patterns"])},
                     {"weaknesses", cell_text(doc["weaknesses"])},
                     {"vulnerabilities", cell_text(doc["vulnerabilities"])}}};
            emit(doc, t);
            return 0;
        }
        if (graph_build->parsed()) {
            Workspace ws(config, clock);
            const auto doc = ws.build_graph(read_catalogs(catalogs, "", {}), read_json_file(cti_path),
                                            read_json_file(landscape_path));
            emit(doc, table_from(doc["edges"], {{"from", "from"}, {"relation", "relation"}, {"to", "to"},
                                                {"confidence", "confidence"}}));
            return 0;
        }
        if (graph_export->parsed()) {
            Workspace ws(config, clock);
            const auto doc = ws.graph(assessment);
            emit(doc, table_from(doc["edges"], {{"from", "from"}, {"relation", "relation"}, {"to", "to"},
                                                {"confidence", "confidence"}}));
            return 0;
        }
        if (create->parsed()) {
            Workspace ws(config, clock);
            json request = {{"id", assessment},
                            {"mode", mode_text},
                            {"cti", read_json_file(cti_path)},
                            {"landscape", read_json_file(landscape_path)}};
            if (!text_arg.empty()) request["kb_hash"] = text_arg;
            emit(ws.create(request, read_catalogs(catalogs, "", {}), actor));
            return 0;
        }
        if (classify->parsed()) {
            Workspace ws(config, clock);
            json doc;
            if (!assessment.empty()) {
                doc = ws.classifications(assessment);
            } else {
                if (cti_path.empty() || landscape_path.empty() || catalogs.empty()) {
                    throw ValidationError("classify needs --assessment or --catalog, --cti and --landscape");
                }
                doc = ws.classify(read_catalogs(catalogs, "", {}), read_json_file(cti_path),
                                  read_json_file(landscape_path));
            }
            emit(doc, table_from(doc["classifications"], kClassColumns));
            return 0;
        }
        if (score_submit->parsed()) {
            Workspace ws(config, clock);
            emit(ws.submit_scores(assessment, read_json_file(path_arg), actor));
            return 0;
        }
        if (score_aggregate->parsed()) {
            Workspace ws(config, clock);
            const auto doc = ws.aggregate(assessment);
            emit(doc, table_from(doc["ranking"], kTtpColumns));
            return 0;
        }
        if (evaluate->parsed()) {
            Workspace ws(config, clock);
            std::optional<json> inventory;
            if (!path_arg.empty()) inventory = read_json_file(path_arg);
            const auto doc = ws.evaluate(assessment, inventory, actor);
            emit(doc, table_from(doc["ranking"], kControlColumns));
            return 0;
        }
        if (rank->parsed()) {
            Workspace ws(config, clock);
            if (of == "ttps") {
                const auto doc = ws.ttp_ranking(assessment);
                emit(doc, table_from(doc["ranking"], kTtpColumns));
            } else {
                const auto doc = ws.control_ranking(assessment);
                emit(doc, table_from(doc["ranking"], kControlColumns));
            }
            return 0;
        }
        if (whatif->parsed()) {
            Workspace ws(config, clock);
            json changes = json::array();
            if (!path_arg.empty()) {
                const auto file = read_json_file(path_arg);
                const auto& list_doc = file.is_array() ? file : file.at("changes");
                for (const auto& c : list_doc) changes.push_back(c);
            }
            for (const auto& s : set_levels) changes.push_back(parse_set_level(s));
            for (const auto& id : removals) changes.push_back({{"kind", "remove_control"}, {"control_id", id}});
            auto doc = ws.whatif(assessment, changes);
            json rows = doc["evaluations"];
            for (auto& row : rows) {
                const std::string id = row["control_id"].get<std::string>();
                row["benefit_delta"] = doc["benefit_deltas"].value(id, json(nullptr));
                row["ratio_delta"] = doc["ratio_deltas"].value(id, json(nullptr));
            }
            emit(doc, table_from(rows, {{"rank", "rank"},
                                        {"control_id", "control_id"},
                                        {"benefit", "benefit"},
                                        {"cost", "cost"},
                                        {"ratio", "display_ratio"},
                                        {"benefit_delta", "benefit_delta"},
                                        {"ratio_delta", "ratio_delta"}}));
            return 0;
        }
        if (report->parsed()) {
            Workspace ws(config, clock);
            json body = json::object();
            if (!text_arg.empty()) body["signoff"] = text_arg;
            const auto doc = ws.report(assessment, body, actor);
            if (!path_arg.empty()) {
                std::ofstream file(path_arg, std::ios::binary | std::ios::trunc);
                if (!file) throw IoError("cannot write " + path_arg);
                file << doc["markup"].get<std::string>();
            }
            if (format == Format::Json) {
                emit(doc);
            } else {
                out << doc["markup"].get<std::string>();
            }
            return 0;
        }
        if (list->parsed()) {
            Workspace ws(config, clock);
            const auto doc = ws.list();
            emit(doc, table_from(doc["assessments"],
                                 {{"id", "id"}, {"mode", "mode"}, {"status", "status"}, {"content_hash", "content_hash"}}));
            return 0;
        }
        if (serve->parsed()) {
            Workspace ws(config, clock);
            HttpService service(ws);
            const int port = service.bind(config.host, config.port);
            if (port < 0) throw IoError("cannot listen on " + config.host + ":" + std::to_string(config.port));
            err << "listening on " << config.host << ":" << port << "\n";
            return service.listen() ? 0 : 2;
        }
        err << app.help();
        return 1;
    } catch (const std::exception& e) {
        json body = error_body(e);
        err << body.dump(2) << "\n";
        return exit_code_for(e);
    }
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace tibsa::gateway
