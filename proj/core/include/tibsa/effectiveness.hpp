// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <array>
#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tibsa::effectiveness {

enum class Level { Low = 0, Medium = 1, High = 2 };

/// "L", "M" or "H".
char level_letter(Level level);
std::string_view to_string(Level level); // "LOW" / "MEDIUM" / "HIGH"
/// Accepts L/M/H and LOW/MEDIUM/HIGH in any case.
Level parse_level(std::string_view text);

/// Mitigating criterion, identified by its two-letter code ("PR", "DT",
/// "CS", "RE" for the four foundation criteria). Custom criteria come from a
/// matrix config and use their own codes.
class Criterion {
public:
    Criterion() = default;
    explicit Criterion(std::string code) : code_(std::move(code)) {}

    static Criterion prevent() { return Criterion("PR"); }
    static Criterion detect() { return Criterion("DT"); }
    static Criterion constrain() { return Criterion("CS"); }
    static Criterion recover() { return Criterion("RE"); }

    const std::string& code() const noexcept { return code_; }

    auto operator<=>(const Criterion&) const = default;

private:
    std::string code_;
};

/// (criterion, level) -> score table. Defaults to the foundation four-by-three
/// grid; a config file may override those rows or add criteria.
class ScoreMatrix {
public:
    struct Row {
        Criterion criterion;
        std::string name;          // "PREVENT", ...
        std::array<int, 3> scores; // indexed by Level

        bool operator==(const Row&) const = default;
    };

    /// PREVENT 12/10/8, DETECT 8/6/4, CONSTRAIN 7/5/3, RECOVER 5/3/1 (H/M/L).
    static const ScoreMatrix& defaults();

    /// Load {"schema_version":"1","criteria":[{"code","name","scores":{"H","M","L"}}]}
    /// over the defaults. Throws ValidationError when the result breaks
    /// level monotonicity or the PREVENT >= DETECT >= CONSTRAIN >= RECOVER order.
    static ScoreMatrix from_config(const nlohmann::json& config);

    int score(const Criterion& criterion, Level level) const;
    bool contains(const Criterion& criterion) const { return find(criterion) != nullptr; }
    const Row* find(const Criterion& criterion) const;
    const std::vector<Row>& rows() const { return rows_; }

    /// Resolve a criterion by code ("PR") or name ("PREVENT"), case-insensitive.
    Criterion parse_criterion(std::string_view text) const;

    /// Findings for monotonicity and dominance violations; empty when valid.
    std::vector<std::string> check_invariants() const;

    nlohmann::json to_json() const;

    bool operator==(const ScoreMatrix&) const = default;

private:
    std::vector<Row> rows_;
};

/// Score from the default matrix.
int mitigation_score(const Criterion& criterion, Level level);

struct MitigationEntry {
    std::string control_id;
    std::string ttp_id;
    Criterion criterion;
    Level level = Level::Low;

    /// "PR.H"
    std::string code() const;
    bool operator==(const MitigationEntry&) const = default;
};

struct CostComponents {
    double develop = 0;
    double implement = 0;
    double maintain = 0;

    bool operator==(const CostComponents&) const = default;
};

struct ControlRecord {
    std::string id;
    std::string name;
    CostComponents cost;

    bool operator==(const ControlRecord&) const = default;
};

struct ControlEvaluation {
    std::string control_id;
    int benefit = 0;
    double cost = 0;
    double ratio = 0;

    std::string display_ratio() const;
    bool operator==(const ControlEvaluation&) const = default;
};

/// Sum of matrix scores over one control's entries. Throws ValidationError
/// when entries span several controls or repeat a (ttp, criterion) pair.
int control_benefit(std::span<const MitigationEntry> entries,
                    const ScoreMatrix& matrix = ScoreMatrix::defaults());

/// develop + implement + maintain; ValidationError unless the total is > 0
/// and every component is >= 0.
double control_cost(const ControlRecord& control);

/// benefit / cost; ValidationError when cost <= 0.
double bc_ratio(int benefit, double cost);

/// One decimal, rounded half-up, trailing ".0" dropped: 5.333 -> "5.3", 12 -> "12".
std::string format_ratio(double ratio);

/// Descending ratio, then higher benefit, then control id.
std::vector<ControlEvaluation> rank_controls(std::vector<ControlEvaluation> evaluations);

/// Evaluate every control against the entries that name it, ranked.
std::vector<ControlEvaluation> evaluate_controls(std::span<const ControlRecord> controls,
                                                 std::span<const MitigationEntry> entries,
                                                 const ScoreMatrix& matrix = ScoreMatrix::defaults());

struct UpgradeEffect {
    std::string control_id;
    std::string ttp_id;
    Criterion criterion;
    Level old_level = Level::Low;
    Level new_level = Level::Low;
    int benefit_delta = 0;
    double old_ratio = 0;
    double new_ratio = 0;

    double ratio_delta() const { return new_ratio - old_ratio; }
    bool operator==(const UpgradeEffect&) const = default;
};

/// Effect of moving one existing entry to `new_level`. Pure. Throws
/// NotFoundError when the control has no such entry.
UpgradeEffect upgrade_effect(std::span<const MitigationEntry> entries, const ControlRecord& control,
                             std::string_view ttp_id, const Criterion& criterion, Level new_level,
                             const ScoreMatrix& matrix = ScoreMatrix::defaults());

// --- coverage matrix ---------------------------------------------------------

struct CellEntry {
    Criterion criterion;
    Level level = Level::Low;
    bool operator==(const CellEntry&) const = default;
};
using Cell = std::vector<CellEntry>;

/// Rows are controls, columns TTPs; each cell lists that control's entries for
/// the TTP in input order, rendered in two-letter+level notation ("PR.H DT.H").
struct CoverageMatrix {
    std::vector<std::string> control_ids;
    std::vector<std::string> ttp_ids;
    std::vector<std::vector<Cell>> cells; // [row][column]

    const Cell& at(std::size_t row, std::size_t column) const { return cells.at(row).at(column); }
    bool operator==(const CoverageMatrix&) const = default;
};

CoverageMatrix coverage_matrix(std::span<const ControlRecord> controls, std::span<const MitigationEntry> entries,
                               std::span<const std::string> ttps);

std::string render_cell(const Cell& cell);
Cell parse_cell(std::string_view text);

/// CSV with header "control_id,<ttp>..." and one row per control.
std::string render_csv(const CoverageMatrix& matrix);
CoverageMatrix parse_csv(std::string_view text);

// --- control inventory file ---------------------------------------------------

struct ControlInventory {
    std::vector<ControlRecord> controls;
    std::vector<MitigationEntry> entries;

    bool operator==(const ControlInventory&) const = default;
};

/// {"schema_version":"1","controls":[{id,name,cost:{develop,implement,maintain},
/// mitigations:[{ttp_id,criterion,level}]}]}
ControlInventory parse_inventory(const nlohmann::json& doc, const ScoreMatrix& matrix = ScoreMatrix::defaults());
nlohmann::json to_json(const ControlInventory& inventory, const ScoreMatrix& matrix = ScoreMatrix::defaults());

} // namespace tibsa::effectiveness
