// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tibsa {

/// Base of every error the engine raises. The gateway maps the concrete
/// subclasses onto exit codes and HTTP statuses.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed document. `where` names the line or the field path.
class ParseError : public Error {
public:
    ParseError(std::string where, const std::string& what)
        : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

/// Duplicate id, or two records sharing an id with different content.
class ConflictError : public Error {
public:
    explicit ConflictError(std::string id, const std::string& what)
        : Error(what), id_(std::move(id)) {}

    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

/// Input violates a contract. Carries every finding, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> findings)
        : Error(join(findings)), findings_(std::move(findings)) {}
    explicit ValidationError(const std::string& finding)
        : ValidationError(std::vector<std::string>{finding}) {}

    const std::vector<std::string>& findings() const noexcept { return findings_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out;
        for (const auto& item : items) {
            if (!out.empty()) out += "; ";
            out += item;
        }
        return out;
    }

    std::vector<std::string> findings_;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Requested operation would move an assessment's status backward or skip
/// a required stage.
class StatusError : public Error {
public:
    using Error::Error;
};

class VersionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace tibsa
