#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "dkt/error.hpp"
#include "dkt/types.hpp"

namespace dkt {

// ---- marginal baseline ----

// Per-exercise empirical correct rate, with the overall rate as fallback
// for exercises unseen in training.
struct MarginalModel {
    std::vector<double> rate;       // per exercise
    std::vector<long long> seen;    // attempt counts
    double fallback = 0.5;

    double predict(int exercise) const {
        const auto q = static_cast<std::size_t>(exercise);
        if (exercise < 0 || q >= rate.size() || seen[q] == 0) return fallback;
        return rate[q];
    }
};

inline MarginalModel fit_marginal(const std::vector<InteractionSequence>& sequences,
                                  std::size_t exercise_count) {
    if (sequences.empty()) fail(ErrorCode::EmptyInput, "fit_marginal: no training sequences");
    MarginalModel m;
    m.rate.assign(exercise_count, 0.0);
    m.seen.assign(exercise_count, 0);
    std::vector<long long> correct(exercise_count, 0);
    long long total = 0, total_correct = 0;
    for (const auto& seq : sequences) {
        for (const auto& it : seq.steps) {
            const auto q = static_cast<std::size_t>(it.exercise);
            ++m.seen[q];
            correct[q] += it.correct;
            ++total;
            total_correct += it.correct;
        }
    }
    if (total == 0) fail(ErrorCode::EmptyInput, "fit_marginal: sequences contain no interactions");
    m.fallback = static_cast<double>(total_correct) / static_cast<double>(total);
    for (std::size_t q = 0; q < exercise_count; ++q)
        if (m.seen[q] > 0) m.rate[q] = static_cast<double>(correct[q]) / static_cast<double>(m.seen[q]);
    return m;
}

// ---- Bayesian Knowledge Tracing ----

// Two-state HMM per skill: latent mastery flips from unlearned to learned
// with probability p_learn after each observation and is never forgotten.
// Observation model: correct with probability 1-p_slip when learned,
// p_guess when not.
struct BktParams {
    double p_init = 0.5;   // P(L_0)
    double p_learn = 0.1;  // T
    double p_guess = 0.2;  // G
    double p_slip = 0.1;   // S
};

struct BktPrediction {
    double next_correct = 0.0;
    // Mastery P(L) before each observation, plus the final value used for
    // the next-step prediction; length = history + 1.
    std::vector<double> mastery;
};

// Predicted probability of a correct answer given current mastery.
inline double bkt_emission(const BktParams& p, double mastery) {
    return mastery * (1.0 - p.p_slip) + (1.0 - mastery) * p.p_guess;
}

// Mastery after observing one answer: Bayes update on the emission, then
// the learning transition.
inline double bkt_update(const BktParams& p, double mastery, int answer) {
    double post;
    if (answer) {
        const double denom = mastery * (1.0 - p.p_slip) + (1.0 - mastery) * p.p_guess;
        post = denom > 0.0 ? mastery * (1.0 - p.p_slip) / denom : mastery;
    } else {
        const double denom = mastery * p.p_slip + (1.0 - mastery) * (1.0 - p.p_guess);
        post = denom > 0.0 ? mastery * p.p_slip / denom : mastery;
    }
    return post + (1.0 - post) * p.p_learn;
}

inline BktPrediction bkt_predict(const BktParams& p, const std::vector<int>& answers) {
    BktPrediction out;
    double mastery = p.p_init;
    out.mastery.reserve(answers.size() + 1);
    out.mastery.push_back(mastery);
    for (int a : answers) {
        mastery = bkt_update(p, mastery, a);
        out.mastery.push_back(mastery);
    }
    out.next_correct = bkt_emission(p, mastery);
    return out;
}

// Total log likelihood of per-student answer histories under `p`, using
// the one-step-ahead predictive probabilities.
inline double bkt_log_likelihood(const BktParams& p,
                                 const std::vector<std::pair<std::vector<int>, long long>>& histories) {
    double ll = 0.0;
    for (const auto& [answers, count] : histories) {
        double mastery = p.p_init;
        double seq_ll = 0.0;
        for (int a : answers) {
            const double pc = bkt_emission(p, mastery);
            seq_ll += a ? std::log(pc) : std::log(1.0 - pc);
            mastery = bkt_update(p, mastery, a);
        }
        ll += seq_ll * static_cast<double>(count);
    }
    return ll;
}

struct BktModel {
    std::vector<BktParams> per_skill;
    std::vector<int> skill_of_exercise;  // length M
    std::size_t empty_skills = 0;        // skills fitted from zero observations
};

namespace detail {

// Guess/slip stay below 0.3 to rule out the degenerate mirrored solution.
inline constexpr double kBktGuessSlipMax = 0.3;

inline double clamp01(double x, double hi) { return x < 0.0 ? 0.0 : (x > hi ? hi : x); }

inline BktParams bkt_fit_one(const std::vector<std::pair<std::vector<int>, long long>>& histories) {
    if (histories.empty()) return BktParams{0.5, 0.1, 0.2, 0.1};

    BktParams best;
    double best_ll = -1e300;
    for (int li = 0; li <= 20; ++li) {
        for (int ti = 0; ti <= 20; ++ti) {
            for (int gi = 0; gi <= 6; ++gi) {
                for (int si = 0; si <= 6; ++si) {
                    const BktParams cand{li * 0.05, ti * 0.05, gi * 0.05, si * 0.05};
                    const double ll = bkt_log_likelihood(cand, histories);
                    if (ll > best_ll) {
                        best_ll = ll;
                        best = cand;
                    }
                }
            }
        }
    }

    // local refinement: coordinate pattern search with shrinking step
    double step = 0.025;
    while (step > 5e-4) {
        bool improved = false;
        for (int dim = 0; dim < 4; ++dim) {
            for (double dir : {+1.0, -1.0}) {
                BktParams cand = best;
                double* field = dim == 0   ? &cand.p_init
                                : dim == 1 ? &cand.p_learn
                                : dim == 2 ? &cand.p_guess
                                           : &cand.p_slip;
                const double hi = dim < 2 ? 1.0 : kBktGuessSlipMax;
                *field = clamp01(*field + dir * step, hi);
                const double ll = bkt_log_likelihood(cand, histories);
                if (ll > best_ll + 1e-12) {
                    best_ll = ll;
                    best = cand;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

}  // namespace detail

// Fit one BKT parameter set per skill by grid search plus local
// refinement of the training likelihood. Identical per-skill histories
// are collapsed to (history, count) before scoring.
inline BktModel fit_bkt(const std::vector<InteractionSequence>& sequences,
                        const std::vector<int>& skill_of_exercise, std::size_t skill_count) {
    BktModel model;
    model.skill_of_exercise = skill_of_exercise;
    model.per_skill.resize(skill_count);

    // per skill: collapsed map history -> student count
    std::vector<std::map<std::vector<int>, long long>> collapsed(skill_count);
    for (const auto& seq : sequences) {
        std::map<int, std::vector<int>> by_skill;
        for (const auto& it : seq.steps) {
            const int skill = skill_of_exercise[static_cast<std::size_t>(it.exercise)];
            by_skill[skill].push_back(it.correct);
        }
        for (auto& [skill, answers] : by_skill) ++collapsed[static_cast<std::size_t>(skill)][answers];
    }

    for (std::size_t skill = 0; skill < skill_count; ++skill) {
        std::vector<std::pair<std::vector<int>, long long>> histories(collapsed[skill].begin(),
                                                                      collapsed[skill].end());
        if (histories.empty()) {
            model.per_skill[skill] = BktParams{0.5, 0.1, 0.2, 0.1};
            ++model.empty_skills;
        } else {
            model.per_skill[skill] = detail::bkt_fit_one(histories);
        }
    }
    return model;
}

// Exercise-as-own-skill map, used when a dataset carries no skill labels.
inline std::vector<int> identity_skill_map(std::size_t exercise_count) {
    std::vector<int> m(exercise_count);
    for (std::size_t i = 0; i < exercise_count; ++i) m[i] = static_cast<int>(i);
    return m;
}

}  // namespace dkt
