// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "tibsa/gateway/workspace.hpp"

namespace httplib {
class Server;
}

namespace tibsa::gateway {

/// HTTP status for an engine exception: 400 parse/validation/conflict, 404
/// unknown id, 409 status transition, 422 version mismatch, 500 otherwise.
int http_status_for(const std::exception& e);

/// Error body {"error": message, "findings": [...]}.
nlohmann::json error_body(const std::exception& e);

/// JSON-over-HTTP front end of a Workspace.
///
/// Mutating requests honour an Idempotency-Key header: a retry with the same
/// key, route and body replays the first response; the same key with a
/// different body is rejected with 400.
class HttpService {
public:
    explicit HttpService(Workspace& workspace);
    ~HttpService();
    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Binds host:port (port 0 picks a free one) and returns the bound port,
    /// or -1 on failure.
    int bind(const std::string& host, int port);
    /// Serves until stop(). Call after bind().
    bool listen();
    void stop();

    httplib::Server& server() { return *server_; }

private:
    struct Cached {
        std::mutex mutex; // held while the first request for the key runs
        bool done = false;
        std::string body_hash;
        int status = 200;
        std::string body;
    };

    void routes();

    Workspace& workspace_;
    std::unique_ptr<httplib::Server> server_;
    std::mutex idempotency_mutex_;
    std::map<std::string, std::shared_ptr<Cached>> idempotency_;
};

} // namespace tibsa::gateway
