#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "dkt/error.hpp"
#include "dkt/types.hpp"

namespace dkt {

// Interaction log plus the tag dictionary mapping dense exercise indices
// back to their source names.
struct Dataset {
    std::vector<InteractionSequence> sequences;
    std::vector<std::string> tag_names;
    std::vector<int> skill_of_exercise;  // empty when the source had no skill column
    std::string source;
    std::vector<std::string> skill_names;
    std::size_t dropped_students = 0;  // students with < 2 interactions
    std::size_t dropped_duplicates = 0;

    std::size_t exercise_count() const { return tag_names.size(); }
    std::size_t total_answers() const {
        std::size_t n = 0;
        for (const auto& s : sequences) n += s.size();
        return n;
    }
};

// Column mapping for interaction CSVs. `order_col`, when set, sorts rows
// globally by its numeric value before grouping; duplicate (student,
// order) rows are then dropped (keep-first) or all kept (explode).
struct CsvSchema {
    std::string student_col = "student_id";
    std::string exercise_col = "exercise_tag";
    std::string correct_col = "correct";
    std::string skill_col;  // optional
    std::string order_col;  // optional
    enum class DupPolicy { KeepFirst, Explode };
    DupPolicy duplicates = DupPolicy::KeepFirst;

    // Assistments 2009-2010 skill-builder export: one row per problem,
    // ordered by order_id, skill name as the exercise tag.
    static CsvSchema assistments() {
        CsvSchema s;
        s.student_col = "user_id";
        s.exercise_col = "skill_name";
        s.correct_col = "correct";
        s.order_col = "order_id";
        return s;
    }
};

namespace detail {

// One CSV record, handling quoted fields and embedded commas/quotes.
inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace detail

inline Dataset load_csv(const std::string& path, const CsvSchema& schema = CsvSchema()) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::EmptyInput, "'" + path + "' is empty");
    const auto header = detail::split_csv_row(line);
    auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    };
    auto require_col = [&](const std::string& name) {
        const auto idx = find_col(name);
        if (!idx) fail(ErrorCode::MissingColumn, "'" + path + "': missing column '" + name + "'");
        return *idx;
    };
    const std::size_t student_idx = require_col(schema.student_col);
    const std::size_t exercise_idx = require_col(schema.exercise_col);
    const std::size_t correct_idx = require_col(schema.correct_col);
    const std::optional<std::size_t> skill_idx =
        schema.skill_col.empty() ? std::nullopt : std::optional(require_col(schema.skill_col));
    const std::optional<std::size_t> order_idx =
        schema.order_col.empty() ? std::nullopt : std::optional(require_col(schema.order_col));

    struct Row {
        std::string student, exercise, skill;
        int correct = 0;
        double order = 0.0;
        std::size_t line_no = 0;
    };
    std::size_t need = std::max({student_idx, exercise_idx, correct_idx});
    if (skill_idx) need = std::max(need, *skill_idx);
    if (order_idx) need = std::max(need, *order_idx);

    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_row(line);
        if (fields.size() <= need) {
            fail(ErrorCode::ParseError,
                 path + ":" + std::to_string(line_no) + ": expected at least " + std::to_string(need + 1) +
                     " fields, got " + std::to_string(fields.size()));
        }
        Row r;
        r.student = fields[student_idx];
        r.exercise = fields[exercise_idx];
        r.line_no = line_no;
        const std::string& c = fields[correct_idx];
        if (c == "0") {
            r.correct = 0;
        } else if (c == "1") {
            r.correct = 1;
        } else {
            fail(ErrorCode::ParseError, path + ":" + std::to_string(line_no) +
                                            ": correctness value '" + c + "' is not 0 or 1");
        }
        if (skill_idx) r.skill = fields[*skill_idx];
        if (order_idx) {
            try {
                r.order = std::stod(fields[*order_idx]);
            } catch (const std::exception&) {
                fail(ErrorCode::ParseError, path + ":" + std::to_string(line_no) +
                                                ": order value '" + fields[*order_idx] + "' is not numeric");
            }
        }
        rows.push_back(std::move(r));
    }
    if (rows.empty()) fail(ErrorCode::EmptyInput, "'" + path + "' has a header but no data rows");

    Dataset ds;
    ds.source = path;

    if (order_idx) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return a.order < b.order; });
        if (schema.duplicates == CsvSchema::DupPolicy::KeepFirst) {
            std::vector<Row> kept;
            kept.reserve(rows.size());
            std::map<std::pair<std::string, double>, bool> seen;
            for (auto& r : rows) {
                if (seen.emplace(std::make_pair(r.student, r.order), true).second) {
                    kept.push_back(std::move(r));
                } else {
                    ++ds.dropped_duplicates;
                }
            }
            rows = std::move(kept);
        }
    }

    // dense tag indices in first-appearance order of the final row stream
    std::unordered_map<std::string, int> tag_index, skill_index;
    std::unordered_map<std::string, std::size_t> student_slot;
    std::vector<std::vector<Interaction>> per_student;
    std::vector<std::string> student_order;
    for (const auto& r : rows) {
        auto [it, fresh] = tag_index.emplace(r.exercise, static_cast<int>(ds.tag_names.size()));
        if (fresh) {
            ds.tag_names.push_back(r.exercise);
            if (skill_idx) ds.skill_of_exercise.push_back(-1);
        }
        const int q = it->second;
        if (skill_idx) {
            auto [sit, sfresh] = skill_index.emplace(r.skill, static_cast<int>(ds.skill_names.size()));
            if (sfresh) ds.skill_names.push_back(r.skill);
            if (ds.skill_of_exercise[static_cast<std::size_t>(q)] < 0)
                ds.skill_of_exercise[static_cast<std::size_t>(q)] = sit->second;
        }
        auto [stu, new_student] = student_slot.emplace(r.student, per_student.size());
        if (new_student) {
            per_student.emplace_back();
            student_order.push_back(r.student);
        }
        per_student[stu->second].push_back({q, r.correct});
    }

    for (std::size_t s = 0; s < per_student.size(); ++s) {
        if (per_student[s].size() < 2) {
            ++ds.dropped_students;
            continue;
        }
        InteractionSequence seq;
        seq.student_id = student_order[s];
        seq.steps = std::move(per_student[s]);
        ds.sequences.push_back(std::move(seq));
    }
    return ds;
}

inline void save_interactions_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    const bool skills = !ds.skill_of_exercise.empty();
    out << "student_id,exercise_tag,correct";
    if (skills) out << ",skill_tag";
    out << "\n";
    for (const auto& seq : ds.sequences) {
        for (const auto& it : seq.steps) {
            out << detail::csv_quote(seq.student_id) << ","
                << detail::csv_quote(ds.tag_names[static_cast<std::size_t>(it.exercise)]) << ","
                << it.correct;
            if (skills) {
                const int sk = ds.skill_of_exercise[static_cast<std::size_t>(it.exercise)];
                out << "," << detail::csv_quote(sk >= 0 ? ds.skill_names[static_cast<std::size_t>(sk)] : "");
            }
            out << "\n";
        }
    }
}

// ---- label / group files: "index,name" or "index,group" per line ----

inline void write_labels(const std::string& path, const std::vector<std::string>& names) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    for (std::size_t i = 0; i < names.size(); ++i) out << i << "," << detail::csv_quote(names[i]) << "\n";
}

inline std::vector<std::string> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::vector<std::string> names;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_row(line);
        if (fields.size() < 2)
            fail(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": expected 'index,name'");
        std::size_t idx = 0;
        try {
            idx = static_cast<std::size_t>(std::stoul(fields[0]));
        } catch (const std::exception&) {
            fail(ErrorCode::ParseError,
                 path + ":" + std::to_string(line_no) + ": index '" + fields[0] + "' is not numeric");
        }
        if (idx >= names.size()) names.resize(idx + 1);
        names[idx] = fields[1];
    }
    return names;
}

inline void write_groups(const std::string& path, const std::vector<int>& group_of) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    for (std::size_t i = 0; i < group_of.size(); ++i) out << i << "," << group_of[i] << "\n";
}

inline std::vector<int> read_groups(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::vector<int> groups;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_row(line);
        if (fields.size() < 2)
            fail(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": expected 'index,group'");
        try {
            const auto idx = static_cast<std::size_t>(std::stoul(fields[0]));
            if (idx >= groups.size()) groups.resize(idx + 1, 0);
            groups[idx] = std::stoi(fields[1]);
        } catch (const std::exception&) {
            fail(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": bad group line");
        }
    }
    return groups;
}

}  // namespace dkt
