#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dkt/error.hpp"
#include "dkt/matrix.hpp"
#include "dkt/rng.hpp"
#include "dkt/types.hpp"

namespace dkt {

// Item-response probability with a guess floor:
//   p = c + (1 - c) / (1 + exp(-alpha * beta))
inline double irt_prob(double alpha, double beta, double guess_floor) {
    if (guess_floor < 0.0 || guess_floor >= 1.0)
        fail(ErrorCode::InvalidArgument, "guess floor must be in [0, 1)");
    return guess_floor + (1.0 - guess_floor) * sigmoid(alpha * beta);
}

// Latent world behind a synthetic dataset: each exercise has one concept
// and a difficulty, every student answers the same fixed shuffled order
// of exercises once, and answering an exercise raises the corresponding
// concept skill by `learn_increment`.
struct SyntheticWorld {
    std::size_t concept_count = 5;
    std::size_t exercise_count = 50;
    std::vector<int> concept_of;            // exercise -> concept (round-robin)
    std::vector<double> difficulty;         // beta per exercise
    std::vector<std::size_t> presentation_order;
    double guess_floor = 0.25;
    double learn_increment = 0.3;           // lambda
    double skill_std = 2.0;                 // initial alpha ~ N(0, skill_std^2)

    std::string tag_name(std::size_t exercise) const {
        std::string idx = std::to_string(exercise);
        if (idx.size() < 2) idx = "0" + idx;
        return "c" + std::to_string(concept_of[exercise]) + "_e" + idx;
    }
};

struct WorldConfig {
    std::size_t concept_count = 5;
    std::size_t exercise_count = 50;
    double guess_floor = 0.25;
    double learn_increment = 0.3;
    double skill_std = 2.0;
    double difficulty_mean = 2.0;
    double difficulty_std = 0.7;
};

inline SyntheticWorld make_world(const WorldConfig& cfg, Rng& rng) {
    if (cfg.concept_count < 1 || cfg.exercise_count < 1)
        fail(ErrorCode::InvalidArgument, "world needs at least one concept and one exercise");
    SyntheticWorld w;
    w.concept_count = cfg.concept_count;
    w.exercise_count = cfg.exercise_count;
    w.guess_floor = cfg.guess_floor;
    w.learn_increment = cfg.learn_increment;
    w.skill_std = cfg.skill_std;
    w.concept_of.resize(cfg.exercise_count);
    for (std::size_t e = 0; e < cfg.exercise_count; ++e)
        w.concept_of[e] = static_cast<int>(e % cfg.concept_count);
    w.difficulty.resize(cfg.exercise_count);
    for (auto& b : w.difficulty) b = cfg.difficulty_mean + cfg.difficulty_std * rng.normal();
    w.presentation_order.resize(cfg.exercise_count);
    for (std::size_t e = 0; e < cfg.exercise_count; ++e) w.presentation_order[e] = e;
    rng.shuffle(w.presentation_order);
    return w;
}

// Hidden ground truth kept alongside a generated dataset; alpha[s][t] is
// student s's full skill vector at the moment step t was answered.
struct TruthRecord {
    std::vector<std::string> student_ids;
    std::vector<std::vector<std::vector<double>>> alpha;  // [student][step][concept]
    std::vector<std::vector<int>> exercise;               // [student][step]
    std::vector<std::vector<int>> answer;                 // [student][step]
};

struct SimResult {
    std::vector<InteractionSequence> sequences;
    std::vector<std::string> tag_names;
    TruthRecord truth;
};

// Simulate `student_count` students. Student s draws from the substream
// rng.derive(s), so the dataset is reproducible independent of iteration
// or parallelisation order.
inline SimResult generate_dataset(const SyntheticWorld& world, std::size_t student_count, const Rng& rng) {
    if (student_count < 1) fail(ErrorCode::InvalidArgument, "student_count must be >= 1");
    SimResult out;
    out.sequences.resize(student_count);
    out.truth.student_ids.resize(student_count);
    out.truth.alpha.resize(student_count);
    out.truth.exercise.resize(student_count);
    out.truth.answer.resize(student_count);
    out.tag_names.resize(world.exercise_count);
    for (std::size_t e = 0; e < world.exercise_count; ++e) out.tag_names[e] = world.tag_name(e);

    for (std::size_t s = 0; s < student_count; ++s) {
        Rng srng = rng.derive(s);
        std::vector<double> alpha(world.concept_count);
        for (auto& a : alpha) a = world.skill_std * srng.normal();

        auto& seq = out.sequences[s];
        seq.student_id = "s" + std::to_string(s);
        seq.steps.reserve(world.exercise_count);
        out.truth.student_ids[s] = seq.student_id;
        auto& tr_alpha = out.truth.alpha[s];
        auto& tr_ex = out.truth.exercise[s];
        auto& tr_ans = out.truth.answer[s];

        for (std::size_t pos = 0; pos < world.exercise_count; ++pos) {
            const std::size_t e = world.presentation_order[pos];
            const int concept_idx = world.concept_of[e];
            const double p = irt_prob(alpha[static_cast<std::size_t>(concept_idx)], world.difficulty[e],
                                      world.guess_floor);
            const int a = srng.bernoulli(p) ? 1 : 0;
            tr_alpha.push_back(alpha);
            tr_ex.push_back(static_cast<int>(e));
            tr_ans.push_back(a);
            seq.steps.push_back({static_cast<int>(e), a});
            alpha[static_cast<std::size_t>(concept_idx)] += world.learn_increment;
        }
    }
    return out;
}

// True response probability at a recorded step; the oracle predictor of
// the evaluation harness.
inline double oracle_predict(const SyntheticWorld& world, const TruthRecord& truth, std::size_t student,
                             std::size_t step) {
    if (student >= truth.alpha.size() || step >= truth.alpha[student].size())
        fail(ErrorCode::IndexOutOfRange, "oracle_predict: no truth for requested step");
    const int e = truth.exercise[student][step];
    const int concept_idx = world.concept_of[static_cast<std::size_t>(e)];
    return irt_prob(truth.alpha[student][step][static_cast<std::size_t>(concept_idx)],
                    world.difficulty[static_cast<std::size_t>(e)], world.guess_floor);
}

// Truth-record CSV: one row per (student, step) with the full skill
// snapshot joined by ';'.
inline void write_truth(const std::string& path, const SyntheticWorld& world, const TruthRecord& truth) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    std::fprintf(f, "student_id,step,exercise,beta,correct,skills\n");
    for (std::size_t s = 0; s < truth.student_ids.size(); ++s) {
        for (std::size_t t = 0; t < truth.exercise[s].size(); ++t) {
            const int e = truth.exercise[s][t];
            std::fprintf(f, "%s,%zu,%d,%.17g,%d,", truth.student_ids[s].c_str(), t, e,
                         world.difficulty[static_cast<std::size_t>(e)], truth.answer[s][t]);
            const auto& alpha = truth.alpha[s][t];
            for (std::size_t c = 0; c < alpha.size(); ++c)
                std::fprintf(f, c ? ";%.17g" : "%.17g", alpha[c]);
            std::fputc('\n', f);
        }
    }
    if (std::fclose(f) != 0) fail(ErrorCode::IoError, "error closing '" + path + "'");
}

inline TruthRecord read_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    TruthRecord truth;
    std::map<std::string, std::size_t> index;
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::EmptyInput, "'" + path + "' is empty");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::istringstream row(line);
        std::string student, step_s, ex_s, beta_s, ans_s, skills_s;
        if (!std::getline(row, student, ',') || !std::getline(row, step_s, ',') ||
            !std::getline(row, ex_s, ',') || !std::getline(row, beta_s, ',') ||
            !std::getline(row, ans_s, ',') || !std::getline(row, skills_s)) {
            fail(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": malformed truth row");
        }
        auto [it, fresh] = index.emplace(student, truth.student_ids.size());
        if (fresh) {
            truth.student_ids.push_back(student);
            truth.alpha.emplace_back();
            truth.exercise.emplace_back();
            truth.answer.emplace_back();
        }
        const std::size_t s = it->second;
        truth.exercise[s].push_back(std::atoi(ex_s.c_str()));
        truth.answer[s].push_back(std::atoi(ans_s.c_str()));
        std::vector<double> alpha;
        std::istringstream sk(skills_s);
        std::string part;
        while (std::getline(sk, part, ';')) alpha.push_back(std::strtod(part.c_str(), nullptr));
        truth.alpha[s].push_back(std::move(alpha));
    }
    return truth;
}

}  // namespace dkt
