// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/effectiveness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <tuple>
#include <utility>

#include "tibsa/error.hpp"

namespace tibsa::effectiveness {

using nlohmann::json;

namespace {

std::string upper(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
    return out;
}

constexpr std::size_t index_of(Level level) { return static_cast<std::size_t>(level); }

} // namespace

char level_letter(Level level) {
    switch (level) {
    case Level::Low: return 'L';
    case Level::Medium: return 'M';
    case Level::High: return 'H';
    }
    return '?';
}

std::string_view to_string(Level level) {
    switch (level) {
    case Level::Low: return "LOW";
    case Level::Medium: return "MEDIUM";
    case Level::High: return "HIGH";
    }
    return "UNKNOWN";
}

Level parse_level(std::string_view text) {
    const std::string u = upper(text);
    if (u == "L" || u == "LOW") return Level::Low;
    if (u == "M" || u == "MEDIUM") return Level::Medium;
    if (u == "H" || u == "HIGH") return Level::High;
    throw ValidationError("unknown effectiveness level '" + std::string(text) + "'");
}

// --- ScoreMatrix -------------------------------------------------------------

const ScoreMatrix& ScoreMatrix::defaults() {
    static const ScoreMatrix matrix = [] {
        ScoreMatrix m;
        m.rows_ = {
            {Criterion::prevent(), "PREVENT", {8, 10, 12}},
            {Criterion::detect(), "DETECT", {4, 6, 8}},
            {Criterion::constrain(), "CONSTRAIN", {3, 5, 7}},
            {Criterion::recover(), "RECOVER", {1, 3, 5}},
        };
        return m;
    }();
    return matrix;
}

const ScoreMatrix::Row* ScoreMatrix::find(const Criterion& criterion) const {
    auto it = std::find_if(rows_.begin(), rows_.end(), [&](const Row& r) { return r.criterion == criterion; });
    return it == rows_.end() ? nullptr : &*it;
}

int ScoreMatrix::score(const Criterion& criterion, Level level) const {
    const Row* row = find(criterion);
    if (row == nullptr) throw ValidationError("unknown mitigation criterion '" + criterion.code() + "'");
    return row->scores[index_of(level)];
}

Criterion ScoreMatrix::parse_criterion(std::string_view text) const {
    const std::string u = upper(text);
    for (const auto& row : rows_) {
        if (u == upper(row.criterion.code()) || u == upper(row.name)) return row.criterion;
    }
    throw ValidationError("unknown mitigation criterion '" + std::string(text) + "'");
}

std::vector<std::string> ScoreMatrix::check_invariants() const {
    std::vector<std::string> findings;
    for (const auto& row : rows_) {
        const auto& s = row.scores;
        if (!(s[2] > s[1] && s[1] > s[0])) {
            findings.push_back("criterion " + row.criterion.code() + " violates level monotonicity (H > M > L)");
        }
        if (s[0] < 0) findings.push_back("criterion " + row.criterion.code() + " has a negative score");
    }
    const std::array<Criterion, 4> chain{Criterion::prevent(), Criterion::detect(), Criterion::constrain(),
                                         Criterion::recover()};
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const Row* hi = find(chain[i]);
        const Row* lo = find(chain[i + 1]);
        if (hi == nullptr || lo == nullptr) {
            findings.push_back("foundation criteria PR, DT, CS and RE must all be present");
            break;
        }
        for (Level level : {Level::Low, Level::Medium, Level::High}) {
            if (hi->scores[index_of(level)] < lo->scores[index_of(level)]) {
                findings.push_back("dominance violated at level " + std::string(to_string(level)) + ": " +
                                   hi->criterion.code() + " < " + lo->criterion.code());
            }
        }
    }
    return findings;
}

ScoreMatrix ScoreMatrix::from_config(const json& config) {
    if (!config.is_object()) throw ParseError("matrix", "expected a JSON object");
    if (config.value("schema_version", std::string{}) != "1") {
        throw VersionError("unsupported matrix config schema_version");
    }
    ScoreMatrix m = defaults();
    const auto criteria = config.value("criteria", json::array());
    if (!criteria.is_array()) throw ParseError("criteria", "expected an array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        const std::string where = "criteria[" + std::to_string(i) + "]";
        if (!c.is_object() || !c.contains("code") || !c["code"].is_string()) {
            throw ParseError(where + ".code", "missing or not a string");
        }
        const std::string code = upper(c["code"].get<std::string>());
        if (code.empty() || code.find('.') != std::string::npos || code.find(' ') != std::string::npos) {
            throw ParseError(where + ".code", "code must be non-empty without '.' or spaces");
        }
        if (!seen.insert(code).second) throw ConflictError(code, "criterion '" + code + "' listed twice");
        const auto scores = c.value("scores", json::object());
        Row row{Criterion(code), upper(c.value("name", code)), {0, 0, 0}};
        for (Level level : {Level::Low, Level::Medium, Level::High}) {
            const std::string key(1, level_letter(level));
            if (!scores.contains(key) || !scores[key].is_number_integer()) {
                throw ParseError(where + ".scores." + key, "expected an integer score");
            }
            row.scores[index_of(level)] = scores[key].get<int>();
        }
        auto existing = std::find_if(m.rows_.begin(), m.rows_.end(),
                                     [&](const Row& r) { return r.criterion == row.criterion; });
        if (existing != m.rows_.end()) {
            *existing = std::move(row);
        } else {
            m.rows_.push_back(std::move(row));
        }
    }
    if (auto findings = m.check_invariants(); !findings.empty()) throw ValidationError(std::move(findings));
    return m;
}

json ScoreMatrix::to_json() const {
    json criteria = json::array();
    for (const auto& row : rows_) {
        criteria.push_back({{"code", row.criterion.code()},
                            {"name", row.name},
                            {"scores", {{"H", row.scores[2]}, {"M", row.scores[1]}, {"L", row.scores[0]}}}});
    }
    return {{"schema_version", "1"}, {"criteria", criteria}};
}

int mitigation_score(const Criterion& criterion, Level level) {
    return ScoreMatrix::defaults().score(criterion, level);
}

std::string MitigationEntry::code() const {
    return criterion.code() + "." + level_letter(level);
}

// --- benefit / cost / ratio ---------------------------------------------------

int control_benefit(std::span<const MitigationEntry> entries, const ScoreMatrix& matrix) {
    std::set<std::pair<std::string, Criterion>> seen;
    int benefit = 0;
    for (const auto& e : entries) {
        if (e.control_id != entries.front().control_id) {
            throw ValidationError("entries for several controls passed to control_benefit ('" +
                                  entries.front().control_id + "', '" + e.control_id + "')");
        }
        if (!seen.emplace(e.ttp_id, e.criterion).second) {
            throw ValidationError("duplicate entry " + e.code() + " for control '" + e.control_id + "' on '" +
                                  e.ttp_id + "'");
        }
        benefit += matrix.score(e.criterion, e.level);
    }
    return benefit;
}

double control_cost(const ControlRecord& control) {
    const auto& c = control.cost;
    if (c.develop < 0 || c.implement < 0 || c.maintain < 0) {
        throw ValidationError("control '" + control.id + "' has a negative cost component");
    }
    const double total = c.develop + c.implement + c.maintain;
    if (!(total > 0)) throw ValidationError("control '" + control.id + "' total cost must be > 0");
    return total;
}

double bc_ratio(int benefit, double cost) {
    if (!(cost > 0)) throw ValidationError("cost must be > 0 to compute a benefit/cost ratio");
    return static_cast<double>(benefit) / cost;
}

std::string format_ratio(double ratio) {
    // Half-up at one decimal; the epsilon keeps 2.25-style ties from
    // falling through binary representation error.
    const double tenths = std::floor(ratio * 10.0 + 0.5 + 1e-9);
    char buf[64];
    if (std::fmod(tenths, 10.0) == 0.0) {
        std::snprintf(buf, sizeof buf, "%.0f", tenths / 10.0);
    } else {
        std::snprintf(buf, sizeof buf, "%.1f", tenths / 10.0);
    }
    std::string out = buf;
    if (out == "-0") out = "0";
    return out;
}

std::string ControlEvaluation::display_ratio() const { return format_ratio(ratio); }

std::vector<ControlEvaluation> rank_controls(std::vector<ControlEvaluation> evaluations) {
    std::sort(evaluations.begin(), evaluations.end(), [](const ControlEvaluation& a, const ControlEvaluation& b) {
        if (a.ratio != b.ratio) return a.ratio > b.ratio;
        if (a.benefit != b.benefit) return a.benefit > b.benefit;
        return a.control_id < b.control_id;
    });
    return evaluations;
}

std::vector<ControlEvaluation> evaluate_controls(std::span<const ControlRecord> controls,
                                                 std::span<const MitigationEntry> entries,
                                                 const ScoreMatrix& matrix) {
    std::vector<ControlEvaluation> out;
    out.reserve(controls.size());
    for (const auto& control : controls) {
        std::vector<MitigationEntry> own;
        std::copy_if(entries.begin(), entries.end(), std::back_inserter(own),
                     [&](const MitigationEntry& e) { return e.control_id == control.id; });
        const int benefit = control_benefit(own, matrix);
        const double cost = control_cost(control);
        out.push_back({control.id, benefit, cost, bc_ratio(benefit, cost)});
    }
    return rank_controls(std::move(out));
}

UpgradeEffect upgrade_effect(std::span<const MitigationEntry> entries, const ControlRecord& control,
                             std::string_view ttp_id, const Criterion& criterion, Level new_level,
                             const ScoreMatrix& matrix) {
    std::vector<MitigationEntry> own;
    std::copy_if(entries.begin(), entries.end(), std::back_inserter(own),
                 [&](const MitigationEntry& e) { return e.control_id == control.id; });
    auto target = std::find_if(own.begin(), own.end(), [&](const MitigationEntry& e) {
        return e.ttp_id == ttp_id && e.criterion == criterion;
    });
    if (target == own.end()) {
        throw NotFoundError("control '" + control.id + "' has no " + criterion.code() + " entry on '" +
                            std::string(ttp_id) + "'");
    }
    const double cost = control_cost(control);
    const int old_benefit = control_benefit(own, matrix);

    UpgradeEffect effect;
    effect.control_id = control.id;
    effect.ttp_id = std::string(ttp_id);
    effect.criterion = criterion;
    effect.old_level = target->level;
    effect.new_level = new_level;
    effect.benefit_delta = matrix.score(criterion, new_level) - matrix.score(criterion, target->level);
    effect.old_ratio = bc_ratio(old_benefit, cost);
    effect.new_ratio = bc_ratio(old_benefit + effect.benefit_delta, cost);
    return effect;
}

// --- inventory ---------------------------------------------------------------

namespace {

double cost_component(const json& cost, std::string_view key, const std::string& where) {
    auto it = cost.find(key);
    if (it == cost.end() || it->is_null()) return 0.0;
    if (!it->is_number()) throw ParseError(where + "." + std::string(key), "expected a number");
    return it->get<double>();
}

} // namespace

ControlInventory parse_inventory(const json& doc, const ScoreMatrix& matrix) {
    if (!doc.is_object()) throw ParseError("document", "expected a JSON object");
    if (!doc.contains("schema_version") || !doc["schema_version"].is_string()) {
        throw ParseError("schema_version", "missing or not a string");
    }
    if (doc["schema_version"] != "1") throw VersionError("unsupported control inventory schema_version");
    if (!doc.contains("controls") || !doc["controls"].is_array()) {
        throw ParseError("controls", "missing or not an array");
    }

    ControlInventory inv;
    std::set<std::string> ids;
    std::set<std::tuple<std::string, std::string, Criterion>> keys;
    std::vector<std::string> findings;
    const auto& controls = doc["controls"];
    for (std::size_t i = 0; i < controls.size(); ++i) {
        const auto& c = controls[i];
        const std::string where = "controls[" + std::to_string(i) + "]";
        if (!c.is_object() || !c.contains("id") || !c["id"].is_string() || c["id"].get_ref<const std::string&>().empty()) {
            throw ParseError(where + ".id", "missing or empty control id");
        }
        ControlRecord record;
        record.id = c["id"].get<std::string>();
        record.name = c.value("name", "");
        const auto cost = c.value("cost", json::object());
        if (!cost.is_object()) throw ParseError(where + ".cost", "expected an object");
        record.cost = {cost_component(cost, "develop", where + ".cost"), cost_component(cost, "implement", where + ".cost"),
                       cost_component(cost, "maintain", where + ".cost")};
        if (!ids.insert(record.id).second) throw ConflictError(record.id, "duplicate control id '" + record.id + "'");
        try {
            control_cost(record);
        } catch (const ValidationError& e) {
            findings.insert(findings.end(), e.findings().begin(), e.findings().end());
        }

        const auto mitigations = c.value("mitigations", json::array());
        for (std::size_t j = 0; j < mitigations.size(); ++j) {
            const auto& m = mitigations[j];
            const std::string mwhere = where + ".mitigations[" + std::to_string(j) + "]";
            if (!m.is_object()) throw ParseError(mwhere, "expected an object");
            for (const char* key : {"ttp_id", "criterion", "level"}) {
                if (!m.contains(key) || !m[key].is_string()) throw ParseError(mwhere + "." + key, "missing or not a string");
            }
            MitigationEntry entry{record.id, m["ttp_id"].get<std::string>(),
                                  matrix.parse_criterion(m["criterion"].get<std::string>()),
                                  parse_level(m["level"].get<std::string>())};
            if (!keys.emplace(entry.control_id, entry.ttp_id, entry.criterion).second) {
                findings.push_back("duplicate entry (" + entry.control_id + ", " + entry.ttp_id + ", " +
                                   entry.criterion.code() + ")");
                continue;
            }
            inv.entries.push_back(std::move(entry));
        }
        inv.controls.push_back(std::move(record));
    }
    if (!findings.empty()) throw ValidationError(std::move(findings));
    return inv;
}

json to_json(const ControlInventory& inventory, const ScoreMatrix& matrix) {
    json controls = json::array();
    for (const auto& control : inventory.controls) {
        json mitigations = json::array();
        for (const auto& e : inventory.entries) {
            if (e.control_id != control.id) continue;
            const auto* row = matrix.find(e.criterion);
            mitigations.push_back({{"ttp_id", e.ttp_id},
                                   {"criterion", row ? row->name : e.criterion.code()},
                                   {"level", to_string(e.level)}});
        }
        controls.push_back({{"id", control.id},
                            {"name", control.name},
                            {"cost",
                             {{"develop", control.cost.develop},
                              {"implement", control.cost.implement},
                              {"maintain", control.cost.maintain}}},
                            {"mitigations", mitigations}});
    }
    return {{"schema_version", "1"}, {"controls", controls}};
}

} // namespace tibsa::effectiveness
