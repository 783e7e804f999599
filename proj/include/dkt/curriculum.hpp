#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "dkt/error.hpp"
#include "dkt/model.hpp"
#include "dkt/rng.hpp"

namespace dkt {

enum class PolicyKind { Blocking, Mixing, Expectimax };

struct CurriculumPolicy {
    PolicyKind kind = PolicyKind::Blocking;
    int depth = 1;              // expectimax lookahead, >= 1
    int rollout_particles = 24; // Monte-Carlo rollouts per candidate at depth > 1
};

// One simulated student inside the evaluation particle filter.
struct RolloutState {
    ModelState state;
    std::vector<Interaction> history;
    Rng rng;  // private answer stream
};

// Predicted knowledge: mean predicted correctness over the exercise pool
// at the current state.
inline double knowledge_score(const Model& model, const ModelState& state, const std::vector<int>& pool) {
    if (pool.empty()) fail(ErrorCode::EmptyInput, "knowledge_score: empty exercise pool");
    double sum = 0.0;
    for (int e : pool) sum += readout_prob(model, state, e);
    return sum / static_cast<double>(pool.size());
}

// Exact one-step expectimax value of assigning `exercise`: the expectation
// of the post-answer knowledge score over both answer outcomes, weighted
// by the model's own predicted probability.
inline double expectimax_value_exact1(const Model& model, const ModelState& state, int exercise,
                                      const std::vector<int>& pool) {
    const double p = readout_prob(model, state, exercise);
    ModelState correct = state;
    advance_state(model, correct, model.scheme.encode({exercise, 1}));
    ModelState incorrect = state;
    advance_state(model, incorrect, model.scheme.encode({exercise, 0}));
    return p * knowledge_score(model, correct, pool) + (1.0 - p) * knowledge_score(model, incorrect, pool);
}

// Highest exact one-step value in the pool; ties break to the lowest
// exercise index.
inline int greedy_next(const Model& model, const ModelState& state, const std::vector<int>& pool) {
    int best = pool.front();
    double best_v = expectimax_value_exact1(model, state, best, pool);
    for (std::size_t i = 1; i < pool.size(); ++i) {
        const double v = expectimax_value_exact1(model, state, pool[i], pool);
        if (v > best_v || (v == best_v && pool[i] < best)) {
            best_v = v;
            best = pool[i];
        }
    }
    return best;
}

// Monte-Carlo estimate of the depth-d value of starting with `exercise`:
// each rollout samples the student's answers from the model's predictions
// and continues greedily (exact one-step choice) for the remaining depth.
inline double expectimax_value_mc(const Model& model, const ModelState& state, int exercise,
                                  const std::vector<int>& pool, int depth, int particles, Rng rng) {
    if (depth < 1) fail(ErrorCode::InvalidArgument, "expectimax depth must be >= 1");
    if (particles < 1) fail(ErrorCode::InvalidArgument, "expectimax particles must be >= 1");
    double sum = 0.0;
    for (int r = 0; r < particles; ++r) {
        Rng rr = rng.derive(static_cast<std::uint64_t>(r));
        ModelState st = state;
        int next = exercise;
        for (int step = 0; step < depth; ++step) {
            const double p = readout_prob(model, st, next);
            const int a = rr.bernoulli(p) ? 1 : 0;
            advance_state(model, st, model.scheme.encode({next, a}));
            if (step + 1 < depth) next = greedy_next(model, st, pool);
        }
        sum += knowledge_score(model, st, pool);
    }
    return sum / static_cast<double>(particles);
}

// Expectimax move selection from a single state. Depth 1 is evaluated
// exactly (no sampling, particle count ignored); deeper lookahead uses
// `particles` rollouts per candidate. Ties break to the lowest index.
inline int choose_next_expectimax(const Model& model, const ModelState& state, const std::vector<int>& pool,
                                  int depth, int particles, Rng& rng) {
    if (pool.empty()) fail(ErrorCode::EmptyInput, "choose_next_expectimax: empty exercise pool");
    if (depth == 1) return greedy_next(model, state, pool);
    const Rng base = rng.derive(rng.next_u64());
    int best = pool.front();
    double best_v = -1.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double v = expectimax_value_mc(model, state, pool[i], pool, depth, particles,
                                             base.derive(static_cast<std::uint64_t>(pool[i])));
        if (v > best_v || (v == best_v && pool[i] < best)) {
            best_v = v;
            best = pool[i];
        }
    }
    return best;
}

struct CurriculumCurve {
    std::vector<double> mean_knowledge;    // per step, after the step's answer
    std::vector<double> stderr_knowledge;  // standard error of the mean over particles
    std::vector<int> exercises;            // the planned exercise at each step
};

namespace detail {

// Blocking: all of a concept's exercises consecutively, concepts in index
// order. Mixing: round-robin across concepts. Both cycle past one pass.
inline std::vector<int> open_loop_schedule(PolicyKind kind, const std::vector<int>& pool,
                                           const std::vector<int>& concept_of, int horizon) {
    std::vector<std::vector<int>> groups;
    for (int e : pool) {
        const int c = concept_of.empty() ? 0 : concept_of[static_cast<std::size_t>(e)];
        if (static_cast<std::size_t>(c) >= groups.size()) groups.resize(static_cast<std::size_t>(c) + 1);
        groups[static_cast<std::size_t>(c)].push_back(e);
    }
    std::vector<int> pass;
    if (kind == PolicyKind::Blocking) {
        for (const auto& g : groups)
            for (int e : g) pass.push_back(e);
    } else {
        std::size_t longest = 0;
        for (const auto& g : groups) longest = std::max(longest, g.size());
        for (std::size_t r = 0; r < longest; ++r)
            for (const auto& g : groups)
                if (r < g.size()) pass.push_back(g[r]);
    }
    std::vector<int> schedule(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) schedule[static_cast<std::size_t>(t)] = pass[static_cast<std::size_t>(t) % pass.size()];
    return schedule;
}

}  // namespace detail

// Evaluate a curriculum with a particle filter: `particles` independent
// simulated students follow one planned exercise sequence; answers are
// sampled per particle from the model's predictions. Expectimax policies
// pick each step's exercise from the ensemble (depth 1: exact two-outcome
// expectation averaged over every particle; deeper: rollouts from an
// evenly spaced particle subsample). Reported per step: mean knowledge
// score over particles and its standard error. Deterministic for a fixed
// rng, independent of `threads`.
inline CurriculumCurve run_curriculum(const Model& model, const CurriculumPolicy& policy,
                                      const std::vector<int>& pool, const std::vector<int>& concept_of,
                                      int horizon, int particles, Rng& rng, int threads = 1) {
    if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be >= 1");
    if (particles < 1) fail(ErrorCode::InvalidArgument, "particles must be >= 1");
    if (pool.empty()) fail(ErrorCode::EmptyInput, "run_curriculum: empty exercise pool");
    for (int e : pool)
        if (e < 0 || static_cast<std::size_t>(e) >= model.output_dim())
            fail(ErrorCode::IndexOutOfRange, "pool exercise " + std::to_string(e));

    const std::size_t n = static_cast<std::size_t>(particles);
    std::vector<RolloutState> swarm;
    swarm.reserve(n);
    for (std::size_t p = 0; p < n; ++p) swarm.push_back({initial_state(model), {}, rng.derive2(0xA05, p)});

    std::vector<int> schedule;
    if (policy.kind != PolicyKind::Expectimax)
        schedule = detail::open_loop_schedule(policy.kind, pool, concept_of, horizon);

    CurriculumCurve curve;
    curve.mean_knowledge.reserve(static_cast<std::size_t>(horizon));
    curve.stderr_knowledge.reserve(static_cast<std::size_t>(horizon));
    curve.exercises.reserve(static_cast<std::size_t>(horizon));

    for (int step = 0; step < horizon; ++step) {
        int chosen;
        if (policy.kind != PolicyKind::Expectimax) {
            chosen = schedule[static_cast<std::size_t>(step)];
        } else if (policy.depth == 1) {
            // exact ensemble expectation per candidate
            std::vector<double> values(pool.size(), 0.0);
            auto eval_range = [&](std::size_t lo, std::size_t hi) {
                for (std::size_t c = lo; c < hi; ++c) {
                    double v = 0.0;
                    for (const auto& p : swarm) v += expectimax_value_exact1(model, p.state, pool[c], pool);
                    values[c] = v / static_cast<double>(n);
                }
            };
            if (threads <= 1) {
                eval_range(0, pool.size());
            } else {
                std::vector<std::thread> workers;
                const std::size_t chunk = (pool.size() + static_cast<std::size_t>(threads) - 1) /
                                          static_cast<std::size_t>(threads);
                for (int w = 0; w < threads; ++w) {
                    const std::size_t lo = static_cast<std::size_t>(w) * chunk;
                    if (lo >= pool.size()) break;
                    workers.emplace_back(eval_range, lo, std::min(pool.size(), lo + chunk));
                }
                for (auto& t : workers) t.join();
            }
            std::size_t best = 0;
            for (std::size_t c = 1; c < pool.size(); ++c)
                if (values[c] > values[best] || (values[c] == values[best] && pool[c] < pool[best]))
                    best = c;
            chosen = pool[best];
        } else {
            // deeper lookahead: rollouts from an evenly spaced subsample
            const std::size_t want = std::min<std::size_t>(
                n, static_cast<std::size_t>(std::max(policy.rollout_particles, 1)));
            std::vector<std::size_t> sample_idx;
            sample_idx.reserve(want);
            for (std::size_t i = 0; i < want; ++i) sample_idx.push_back(i * n / want);
            const Rng decision_rng = rng.derive2(0xDEC, static_cast<std::uint64_t>(step));

            std::vector<double> values(pool.size(), 0.0);
            auto eval_range = [&](std::size_t lo, std::size_t hi) {
                for (std::size_t c = lo; c < hi; ++c) {
                    double v = 0.0;
                    for (std::size_t i = 0; i < sample_idx.size(); ++i) {
                        v += expectimax_value_mc(model, swarm[sample_idx[i]].state, pool[c], pool,
                                                 policy.depth, 1,
                                                 decision_rng.derive2(static_cast<std::uint64_t>(pool[c]), i));
                    }
                    values[c] = v / static_cast<double>(sample_idx.size());
                }
            };
            if (threads <= 1) {
                eval_range(0, pool.size());
            } else {
                std::vector<std::thread> workers;
                const std::size_t chunk = (pool.size() + static_cast<std::size_t>(threads) - 1) /
                                          static_cast<std::size_t>(threads);
                for (int w = 0; w < threads; ++w) {
                    const std::size_t lo = static_cast<std::size_t>(w) * chunk;
                    if (lo >= pool.size()) break;
                    workers.emplace_back(eval_range, lo, std::min(pool.size(), lo + chunk));
                }
                for (auto& t : workers) t.join();
            }
            std::size_t best = 0;
            for (std::size_t c = 1; c < pool.size(); ++c)
                if (values[c] > values[best] || (values[c] == values[best] && pool[c] < pool[best]))
                    best = c;
            chosen = pool[best];
        }

        // every particle answers the chosen exercise
        double mean = 0.0, m2 = 0.0;
        std::vector<double> ks(n);
        for (std::size_t p = 0; p < n; ++p) {
            const double prob = readout_prob(model, swarm[p].state, chosen);
            const int a = swarm[p].rng.bernoulli(prob) ? 1 : 0;
            swarm[p].history.push_back({chosen, a});
            advance_state(model, swarm[p].state, model.scheme.encode({chosen, a}));
            ks[p] = knowledge_score(model, swarm[p].state, pool);
            mean += ks[p];
        }
        mean /= static_cast<double>(n);
        for (std::size_t p = 0; p < n; ++p) m2 += (ks[p] - mean) * (ks[p] - mean);
        const double stderr_v = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) /
                                            std::sqrt(static_cast<double>(n))
                                      : 0.0;
        curve.mean_knowledge.push_back(mean);
        curve.stderr_knowledge.push_back(stderr_v);
        curve.exercises.push_back(chosen);
    }
    return curve;
}

}  // namespace dkt
