// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/gateway/http_service.hpp"

#include <httplib.h>

#include <functional>
#include <optional>

#include "tibsa/error.hpp"
#include "tibsa/hash.hpp"

namespace tibsa::gateway {

using nlohmann::json;

int http_status_for(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
        dynamic_cast<const ConflictError*>(&e) || dynamic_cast<const json::exception*>(&e)) {
        return 400;
    }
    if (dynamic_cast<const NotFoundError*>(&e)) return 404;
    if (dynamic_cast<const StatusError*>(&e)) return 409;
    if (dynamic_cast<const VersionError*>(&e)) return 422;
    return 500;
}

json error_body(const std::exception& e) {
    json findings = json::array();
    if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
        for (const auto& f : v->findings()) findings.push_back(f);
    } else {
        findings.push_back(e.what());
    }
    return {{"error", e.what()}, {"findings", findings}};
}

namespace {

using Handler = std::function<std::pair<int, json>(const httplib::Request&, const json& body)>;

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw ParseError("body", e.what());
    }
}

std::string actor_of(const httplib::Request& req) {
    const auto actor = req.get_header_value("X-Actor");
    return actor.empty() ? "http" : actor;
}

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

} // namespace

HttpService::HttpService(Workspace& workspace) : workspace_(workspace), server_(std::make_unique<httplib::Server>()) {
    routes();
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpService::listen() { return server_->listen_after_bind(); }

void HttpService::stop() {
    if (server_ && server_->is_running()) server_->stop();
}

void HttpService::routes() {
    auto& s = *server_;

    auto run = [](const Handler& handler) {
        return [handler](const httplib::Request& req, httplib::Response& res) {
            try {
                auto [status, body] = handler(req, parse_body(req));
                send(res, status, body);
            } catch (const std::exception& e) {
                send(res, http_status_for(e), error_body(e));
            }
        };
    };

    // Mutations go through the idempotency cache when the header is present.
    auto mutate = [this, run](const Handler& handler) {
        return [this, run, handler](const httplib::Request& req, httplib::Response& res) {
            const auto key = req.get_header_value("Idempotency-Key");
            if (key.empty()) return run(handler)(req, res);
            const std::string slot = req.method + " " + req.path + " " + key;
            const std::string body_hash = sha256_hex(req.body);
            std::shared_ptr<Cached> entry;
            {
                std::scoped_lock lock(idempotency_mutex_);
                auto& ptr = idempotency_[slot];
                if (!ptr) ptr = std::make_shared<Cached>();
                entry = ptr;
            }
            std::scoped_lock lock(entry->mutex);
            if (entry->done) {
                if (entry->body_hash != body_hash) {
                    send(res, 400, {{"error", "idempotency key reused with a different body"},
                                    {"findings", json::array({"Idempotency-Key " + key})}});
                    return;
                }
                res.status = entry->status;
                res.set_content(entry->body, "application/json");
                res.set_header("Idempotent-Replay", "true");
                return;
            }
            run(handler)(req, res);
            entry->done = true;
            entry->body_hash = body_hash;
            entry->status = res.status;
            entry->body = res.body;
        };
    };

    s.Get("/health", run([](const auto&, const json&) { return std::pair{200, json{{"status", "ok"}}}; }));

    s.Post("/kb", mutate([this](const httplib::Request&, const json& body) {
        std::vector<CatalogInput> inputs;
        const auto& list = body.at("catalogs");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& c = list[i];
            inputs.push_back({kb::parse_catalog_kind(c.at("kind").get<std::string>()),
                              c.at("document").is_string() ? c["document"].get<std::string>() : c["document"].dump(),
                              "catalogs[" + std::to_string(i) + "]"});
        }
        return std::pair{200, workspace_.ingest(inputs, true)};
    }));

    s.Get("/assessments", run([this](const auto&, const json&) { return std::pair{200, workspace_.list()}; }));
    s.Post("/assessments", mutate([this](const httplib::Request& req, const json& body) {
        return std::pair{201, workspace_.create(body, {}, actor_of(req))};
    }));
    s.Get(R"(/assessments/([^/]+))", run([this](const httplib::Request& req, const json&) {
        return std::pair{200, workspace_.get(req.matches[1].str())};
    }));
    s.Post(R"(/assessments/([^/]+)/scores)", mutate([this](const httplib::Request& req, const json& body) {
        return std::pair{200, workspace_.submit_scores(req.matches[1].str(), body, actor_of(req))};
    }));
    s.Get(R"(/assessments/([^/]+)/classifications)", run([this](const httplib::Request& req, const json&) {
        return std::pair{200, workspace_.classifications(req.matches[1].str())};
    }));
    s.Get(R"(/assessments/([^/]+)/aggregate)", run([this](const httplib::Request& req, const json&) {
        return std::pair{200, workspace_.aggregate(req.matches[1].str())};
    }));
    s.Get(R"(/assessments/([^/]+)/ranking)", run([this](const httplib::Request& req, const json&) {
        return std::pair{200, workspace_.ttp_ranking(req.matches[1].str())};
    }));
    s.Get(R"(/assessments/([^/]+)/controls/ranking)", run([this](const httplib::Request& req, const json&) {
        return std::pair{200, workspace_.control_ranking(req.matches[1].str())};
    }));
    s.Post(R"(/assessments/([^/]+)/controls)", mutate([this](const httplib::Request& req, const json& body) {
        return std::pair{200, workspace_.set_controls(req.matches[1].str(), body, actor_of(req))};
    }));
    s.Post(R"(/assessments/([^/]+)/evaluate)", mutate([this](const httplib::Request& req, const json& body) {
        std::optional<json> inventory;
        if (body.is_object() && body.contains("controls") && body["controls"].is_object()) inventory = body["controls"];
        return std::pair{200, workspace_.evaluate(req.matches[1].str(), inventory, actor_of(req))};
    }));
    s.Post(R"(/assessments/([^/]+)/whatif)", run([this](const httplib::Request& req, const json& body) {
        const json changes = body.is_object() && !body.contains("changes") ? json::array() : body;
        return std::pair{200, workspace_.whatif(req.matches[1].str(), changes)};
    }));
    s.Post(R"(/assessments/([^/]+)/report)", mutate([this](const httplib::Request& req, const json& body) {
        return std::pair{200, workspace_.report(req.matches[1].str(), body, actor_of(req))};
    }));
    s.Get(R"(/graph/([^/]+))", run([this](const httplib::Request& req, const json&) {
        return std::pair{200, workspace_.graph(req.matches[1].str())};
    }));
}

} // namespace tibsa::gateway
