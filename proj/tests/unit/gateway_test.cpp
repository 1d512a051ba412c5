// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include <doctest.h>

#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "tibsa/error.hpp"
#include "tibsa/gateway/cli.hpp"
#include "tibsa/gateway/config.hpp"
#include "tibsa/gateway/http_service.hpp"
#include "tibsa/gateway/render.hpp"
#include "tibsa/gateway/workspace.hpp"

using namespace tibsa;
using namespace tibsa::gateway;
using nlohmann::json;

namespace {

EnvLookup env_of(std::map<std::string, std::string> vars) {
    return [vars = std::move(vars)](const char* name) -> std::optional<std::string> {
        auto it = vars.find(name);
        if (it == vars.end()) return std::nullopt;
        return it->second;
    };
}

struct Cli {
    std::filesystem::path dir;
    std::string register_path;

    explicit Cli(const std::string& name)
        : dir(std::filesystem::temp_directory_path() / ("tibsa-cli-test-" + name)) {
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
        register_path = (dir / "register.json").string();
    }
    ~Cli() { std::filesystem::remove_all(dir); }

    struct Result {
        int code;
        std::string out;
        std::string err;
    };

    Result run(std::vector<std::string> args) const {
        args.insert(args.begin(), {"--register", register_path});
        std::ostringstream out, err;
        const int code = run_cli(args, out, err, env_of({}), testing::fixed_clock());
        return {code, out.str(), err.str()};
    }

    std::string write(const std::string& name, const std::string& text) const {
        const auto path = dir / name;
        std::ofstream(path, std::ios::binary) << text;
        return path.string();
    }
};

std::string fx(const std::string& name, const std::string& file) { return testing::fixture_path(name, file).string(); }

/// create + score + evaluate through the CLI.
Cli::Result evaluate_ranking(const Cli& cli, const std::string& format = "json") {
    const auto created = cli.run({"create", "--id", "t3", "--catalog", "techniques=" + fx("ranking", "techniques.json"),
                                  "--cti", fx("ranking", "cti.json"), "--landscape", fx("ranking", "landscape.json")});
    REQUIRE_MESSAGE(created.code == 0, created.err);
    const auto scored = cli.run({"score", "submit", "--assessment", "t3", "--scores", fx("ranking", "scores.json")});
    REQUIRE_MESSAGE(scored.code == 0, scored.err);
    return cli.run({"--format", format, "evaluate", "--assessment", "t3", "--controls", fx("ranking", "controls.json")});
}

std::vector<std::vector<std::string>> parse_csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

struct Server {
    Workspace workspace;
    HttpService service;
    int port = -1;
    std::thread thread;

    Server() : workspace(GatewayConfig{}, testing::fixed_clock()), service(workspace) {
        port = service.bind("127.0.0.1", 0);
        REQUIRE(port > 0);
        thread = std::thread([this] { service.listen(); });
        service.server().wait_until_ready();
    }
    ~Server() {
        service.stop();
        thread.join();
    }
    httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

json create_body(const std::string& fixture, const std::string& id) {
    return {{"id", id},
            {"catalogs", json::array({{{"kind", "techniques"},
                                       {"document", testing::read_text(testing::fixture_path(fixture, "techniques.json"))}}})},
            {"cti", testing::read_json(fixture, "cti.json")},
            {"landscape", testing::read_json(fixture, "landscape.json")}};
}

httplib::Result post(httplib::Client& c, const std::string& path, const json& body, const httplib::Headers& headers = {}) {
    return c.Post(path, headers, body.dump(), "application/json");
}

} // namespace

TEST_CASE("config from environment") {
    const auto c = apply_env({}, env_of({{"TIBSA_PORT", "9090"},
                                         {"TIBSA_MODE", "rapid"},
                                         {"TIBSA_PROBABLE_THRESHOLD", "4"},
                                         {"TIBSA_REGISTER_PATH", "/tmp/r.json"}}));
    CHECK(c.port == 9090);
    CHECK(c.mode == registry::Mode::Rapid);
    CHECK(c.probable_threshold == 4);
    CHECK(c.register_path == "/tmp/r.json");
    CHECK(c.host == "127.0.0.1");
    CHECK_NOTHROW(c.validate());

    CHECK_THROWS_AS(apply_env({}, env_of({{"TIBSA_PORT", "eighty"}})), ParseError);
    CHECK_THROWS_AS(apply_env({}, env_of({{"TIBSA_MODE", "leisurely"}})), ParseError);

    GatewayConfig bad;
    bad.port = 70000;
    bad.probable_threshold = 0;
    bad.rubric_path = "/nonexistent/rubric.json";
    try {
        bad.validate();
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.findings().size() == 3);
    }
}

TEST_CASE("error mapping") {
    CHECK(exit_code_for(IoError("disk")) == 2);
    CHECK(exit_code_for(ValidationError("bad")) == 1);
    CHECK(http_status_for(ValidationError("bad")) == 400);
    CHECK(http_status_for(ParseError("x", "bad")) == 400);
    CHECK(http_status_for(ConflictError("A", "dup")) == 400);
    CHECK(http_status_for(NotFoundError("A")) == 404);
    CHECK(http_status_for(StatusError("late")) == 409);
    CHECK(http_status_for(VersionError("v0")) == 422);
    CHECK(http_status_for(std::runtime_error("boom")) == 500);
    const auto body = error_body(ValidationError(std::vector<std::string>{"one", "two"}));
    CHECK(body.at("findings").size() == 2);
}

TEST_CASE("render helpers") {
    const json rows = json::array({{{"a", 1}, {"b", "x"}}, {{"a", 2.5}, {"b", json::array({"p", "q"})}}});
    const auto t = table_from(rows, {{"A", "a"}, {"B", "b"}});
    CHECK(render_csv(t) == "A,B\n1,x\n2.5,p q\n");
    CHECK(render(json{{"k", 1}}, std::nullopt, Format::Csv) == render(json{{"k", 1}}, std::nullopt, Format::Json));
    CHECK_THROWS(parse_format("yaml"));
}

TEST_CASE("cli exit codes") {
    Cli cli("exit-codes");
    const auto empty = cli.write("empty.json", R"({"schema_version":"1","kind":"techniques","records":[]})");
    const auto ok = cli.run({"ingest", "--kind", "techniques", empty});
    CHECK(ok.code == 0);
    CHECK(json::parse(ok.out).at("techniques") == 0);

    CHECK(cli.run({"frobnicate"}).code == 1);
    CHECK(cli.run({"ingest", "--kind", "techniques", (cli.dir / "missing.json").string()}).code == 2);
    const auto broken = cli.write("broken.json", "{\n\"schema_version\": \"1\",\n");
    const auto parse = cli.run({"ingest", "--kind", "techniques", broken});
    CHECK(parse.code == 1);
    CHECK(parse.err.find("line") != std::string::npos);
    CHECK(cli.run({"rank", "--assessment", "nope"}).code == 1);
    CHECK(cli.run({"--help"}).code == 0);
}

TEST_CASE("cli evaluate prints the constructed ranking as csv") {
    Cli cli("evaluate");
    const auto r = evaluate_ranking(cli, "csv");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto rows = parse_csv_rows(r.out);
    REQUIRE(rows.size() == 8);
    CHECK(rows[0] == std::vector<std::string>{"rank", "control_id", "benefit", "cost", "ratio"});
    std::vector<std::string> ratios;
    for (std::size_t i = 1; i < rows.size(); ++i) ratios.push_back(rows[i][4]);
    CHECK(ratios == std::vector<std::string>{"12", "11", "9", "8", "5.3", "2.5", "2.3"});

    const auto listed = cli.run({"list"});
    CHECK(json::parse(listed.out).at("assessments")[0].at("status") == "evaluated");

    const auto rank = cli.run({"rank", "--assessment", "t3"});
    CHECK(json::parse(rank.out).at("ranking").size() == 7);
    const auto ttps = cli.run({"rank", "--assessment", "t3", "--of", "ttps"});
    CHECK(json::parse(ttps.out).at("ranking").size() == 7);

    const auto report = cli.run({"--format", "table", "report", "--assessment", "t3", "--signoff", "CISO"});
    CHECK(report.code == 0);
    CHECK(report.out.find("== 3. Recommendations ==") != std::string::npos);
    CHECK(cli.run({"evaluate", "--assessment", "t3"}).code == 1);
}

TEST_CASE("cli whatif reports the upgrade delta without persisting") {
    Cli cli("whatif");
    REQUIRE(cli.run({"create", "--id", "p", "--catalog", "techniques=" + fx("paradox", "techniques.json"), "--cti",
                     fx("paradox", "cti.json"), "--landscape", fx("paradox", "landscape.json")})
                .code == 0);
    REQUIRE(cli.run({"score", "submit", "--assessment", "p", "--scores", fx("paradox", "scores.json")}).code == 0);
    REQUIRE(cli.run({"evaluate", "--assessment", "p", "--controls", fx("paradox", "controls.json")}).code == 0);
    const auto before = testing::read_text(cli.register_path);

    const auto r = cli.run({"whatif", "--assessment", "p", "--set-level", "C-WAF:T1190:DT.H"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto doc = json::parse(r.out);
    CHECK(doc.at("benefit_deltas").at("C-WAF") == 4);
    CHECK(doc.at("ratio_deltas").at("C-WAF").get<double>() == doctest::Approx(2.0));
    CHECK(testing::read_text(cli.register_path) == before);

    CHECK(cli.run({"whatif", "--assessment", "p", "--set-level", "garbage"}).code == 1);
    CHECK(cli.run({"whatif", "--assessment", "p", "--remove-control", "C-NOPE"}).code == 1);
}

TEST_CASE("http: scoring validation, status codes and what-if purity") {
    Server server;
    auto c = server.client();
    const auto health = c.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);

    auto created = post(c, "/assessments", create_body("paradox", "P"));
    REQUIRE(created);
    REQUIRE_MESSAGE(created->status == 201, created->body);
    CHECK(json::parse(created->body).at("status") == "draft");
    CHECK(post(c, "/assessments", create_body("paradox", "P"))->status == 400);

    const auto scores = testing::read_json("paradox", "scores.json");
    json bad = scores;
    bad["scores"][0]["values"]["detectability"] = 6;
    const auto rejected = post(c, "/assessments/P/scores", bad);
    CHECK(rejected->status == 400);
    CHECK(rejected->body.find("detectability") != std::string::npos);

    CHECK(c.Get("/assessments/missing")->status == 404);
    CHECK(post(c, "/assessments/missing/scores", scores)->status == 404);
    CHECK(post(c, "/assessments/P/whatif", json::object())->status == 409);
    CHECK(c.Get("/assessments/P/controls/ranking")->status == 409);

    REQUIRE(post(c, "/assessments/P/scores", scores)->status == 200);
    const auto evaluated = post(c, "/assessments/P/evaluate", {{"controls", testing::read_json("paradox", "controls.json")}});
    REQUIRE_MESSAGE(evaluated->status == 200, evaluated->body);
    const std::string hash = json::parse(evaluated->body).at("content_hash");

    const auto whatif = post(c, "/assessments/P/whatif", {{"changes", json::array()}});
    REQUIRE(whatif->status == 200);
    CHECK(json::parse(whatif->body).at("content_hash") == hash);
    CHECK(json::parse(c.Get("/assessments/P")->body).at("content_hash") == hash);

    const json paradox_change = {{"changes",
                                  json::array({{{"kind", "add_control"},
                                                {"control",
                                                 {{"id", "C-BLOCK"},
                                                  {"name", "block"},
                                                  {"cost", {{"develop", 1}, {"implement", 0}, {"maintain", 0}}},
                                                  {"mitigations", json::array({{{"ttp_id", "T1566.001"},
                                                                                {"criterion", "PR"},
                                                                                {"level", "H"}}})}}}}})}};
    const auto paradox = post(c, "/assessments/P/whatif", paradox_change);
    REQUIRE_MESSAGE(paradox->status == 200, paradox->body);
    CHECK(json::parse(paradox->body).at("replan").at("paradox") == true);
    CHECK(json::parse(c.Get("/assessments/P")->body).at("content_hash") == hash);

    CHECK(post(c, "/assessments/P/scores", scores)->status == 409);
    const auto report = post(c, "/assessments/P/report", {{"signoff", "CISO"}});
    CHECK(report->status == 200);
    CHECK(post(c, "/assessments/P/controls", testing::read_json("paradox", "controls.json"))->status == 409);
    CHECK(c.Get("/graph/P")->status == 200);
    CHECK(c.Get("/assessments/P/classifications")->status == 200);
}

TEST_CASE("http: idempotency keys replay or reject") {
    Server server;
    auto c = server.client();
    const httplib::Headers key{{"Idempotency-Key", "create-1"}};
    const auto first = post(c, "/assessments", create_body("modes", "M"), key);
    REQUIRE(first->status == 201);
    const auto replay = post(c, "/assessments", create_body("modes", "M"), key);
    CHECK(replay->status == 201);
    CHECK(replay->body == first->body);
    CHECK(replay->get_header_value("Idempotent-Replay") == "true");

    const auto other = post(c, "/assessments", create_body("modes", "M2"), key);
    CHECK(other->status == 400);
    CHECK(json::parse(c.Get("/assessments")->body).at("assessments").size() == 1);
    CHECK(post(c, "/kb", {{"catalogs", json::array()}})->status == 200);
}

TEST_CASE("http ranking agrees with the cli for the constructed inventory") {
    Cli cli("consistency");
    const auto r = evaluate_ranking(cli);
    REQUIRE(r.code == 0);
    const auto cli_ranking = json::parse(r.out).at("ranking");

    Server server;
    auto c = server.client();
    REQUIRE(post(c, "/assessments", create_body("ranking", "t3"))->status == 201);
    REQUIRE(post(c, "/assessments/t3/scores", testing::read_json("ranking", "scores.json"))->status == 200);
    REQUIRE(post(c, "/assessments/t3/evaluate", {{"controls", testing::read_json("ranking", "controls.json")}})->status ==
            200);
    const auto http_ranking = json::parse(c.Get("/assessments/t3/controls/ranking")->body).at("ranking");
    CHECK(http_ranking == cli_ranking);
    CHECK(server.workspace.content_hash("t3") == json::parse(r.out).at("content_hash"));
}
