#pragma once

#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dkt/matrix.hpp"
#include "dkt/model.hpp"
#include "dkt/types.hpp"

namespace dkt {

// Directed exercise-influence matrix: j_mat(i, j) is the normalized
// influence of answering i correctly on the predicted success of j.
// Columns sum to one by construction.
struct InfluenceGraph {
    Matrix j_mat;  // M x M
    std::vector<std::string> labels;
    double threshold = 0.1;
};

struct InfluenceEdge {
    int from = 0;
    int to = 0;
    double weight = 0.0;
};

// y(j|i): the model's full output vector after exactly one interaction
// (exercise i answered correctly) from the learned initial state; the
// influence of i on j is y(j|i) normalized over all conditioning
// exercises i.
inline InfluenceGraph influence_matrix(const Model& model) {
    const std::size_t m = model.output_dim();
    Matrix cond(m, m);  // cond(i, j) = y(j | i)
    for (std::size_t i = 0; i < m; ++i) {
        ModelState state = initial_state(model);
        advance_state(model, state, model.scheme.encode({static_cast<int>(i), 1}));
        const auto y = readout_probs(model, state);
        for (std::size_t j = 0; j < m; ++j) cond(i, j) = y[j];
    }
    InfluenceGraph g;
    g.j_mat = Matrix(m, m);
    g.labels = model.tags;
    if (g.labels.size() != m) {
        g.labels.resize(m);
        for (std::size_t i = 0; i < m; ++i)
            if (g.labels[i].empty()) g.labels[i] = "e" + std::to_string(i);
    }
    for (std::size_t j = 0; j < m; ++j) {
        double denom = 0.0;
        for (std::size_t i = 0; i < m; ++i) denom += cond(i, j);
        for (std::size_t i = 0; i < m; ++i) g.j_mat(i, j) = cond(i, j) / denom;
    }
    return g;
}

// Off-diagonal edges with weight >= tau, ordered by (from, to).
inline std::vector<InfluenceEdge> threshold_graph(const InfluenceGraph& g, double tau) {
    if (tau < 0.0) fail(ErrorCode::InvalidArgument, "threshold must be >= 0");
    std::vector<InfluenceEdge> edges;
    for (std::size_t i = 0; i < g.j_mat.rows(); ++i)
        for (std::size_t j = 0; j < g.j_mat.cols(); ++j)
            if (i != j && g.j_mat(i, j) >= tau)
                edges.push_back({static_cast<int>(i), static_cast<int>(j), g.j_mat(i, j)});
    return edges;
}

// Ordered pairs (a, b) such that, among students who answered a, more
// than `min_follow_rate` have b somewhere after a's first occurrence.
inline std::set<std::pair<int, int>> cooccurrence_filter(const std::vector<InteractionSequence>& sequences,
                                                         std::size_t exercise_count,
                                                         double min_follow_rate = 0.01) {
    if (sequences.empty()) fail(ErrorCode::EmptyInput, "cooccurrence_filter: no sequences");
    const std::size_t m = exercise_count;
    std::vector<long long> answered(m, 0);            // students who saw a
    Matrix followed(m, m);                            // students where b after a
    std::vector<std::ptrdiff_t> first_pos(m);
    std::vector<std::ptrdiff_t> last_pos(m);
    for (const auto& seq : sequences) {
        std::fill(first_pos.begin(), first_pos.end(), -1);
        std::fill(last_pos.begin(), last_pos.end(), -1);
        for (std::size_t t = 0; t < seq.size(); ++t) {
            const auto q = static_cast<std::size_t>(seq.steps[t].exercise);
            if (first_pos[q] < 0) first_pos[q] = static_cast<std::ptrdiff_t>(t);
            last_pos[q] = static_cast<std::ptrdiff_t>(t);
        }
        for (std::size_t a = 0; a < m; ++a) {
            if (first_pos[a] < 0) continue;
            ++answered[a];
            for (std::size_t b = 0; b < m; ++b)
                if (last_pos[b] > first_pos[a]) followed(a, b) += 1.0;
        }
    }
    std::set<std::pair<int, int>> allowed;
    for (std::size_t a = 0; a < m; ++a) {
        if (answered[a] == 0) continue;
        for (std::size_t b = 0; b < m; ++b) {
            if (a == b) continue;
            if (followed(a, b) / static_cast<double>(answered[a]) > min_follow_rate)
                allowed.insert({static_cast<int>(a), static_cast<int>(b)});
        }
    }
    return allowed;
}

// Empirical next-exercise transition probabilities: row a holds the
// distribution of the exercise immediately following a.
inline Matrix transition_graph(const std::vector<InteractionSequence>& sequences,
                               std::size_t exercise_count) {
    Matrix counts(exercise_count, exercise_count);
    std::vector<double> from_total(exercise_count, 0.0);
    for (const auto& seq : sequences) {
        for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
            const auto a = static_cast<std::size_t>(seq.steps[t].exercise);
            const auto b = static_cast<std::size_t>(seq.steps[t + 1].exercise);
            counts(a, b) += 1.0;
            from_total[a] += 1.0;
        }
    }
    for (std::size_t a = 0; a < exercise_count; ++a) {
        if (from_total[a] == 0.0) continue;
        for (std::size_t b = 0; b < exercise_count; ++b) counts(a, b) /= from_total[a];
    }
    return counts;
}

// Conditional accuracy baseline: y(i, j) is the fraction of attempts on j
// that are correct, among students who answered i correctly at an earlier
// step; normalized is the same matrix put through the influence
// normalization over supported entries.
struct ConditionalAccuracy {
    Matrix y;
    Matrix normalized;
    std::vector<std::vector<bool>> supported;  // pairs with at least one observation
};

inline ConditionalAccuracy conditional_accuracy_graph(const std::vector<InteractionSequence>& sequences,
                                                      std::size_t exercise_count) {
    const std::size_t m = exercise_count;
    Matrix num(m, m), den(m, m);
    std::vector<std::size_t> correct_before;
    std::vector<char> seen(m, 0);
    for (const auto& seq : sequences) {
        correct_before.clear();
        std::fill(seen.begin(), seen.end(), 0);
        for (const auto& step : seq.steps) {
            const auto j = static_cast<std::size_t>(step.exercise);
            for (std::size_t i : correct_before) {
                den(i, j) += 1.0;
                if (step.correct) num(i, j) += 1.0;
            }
            if (step.correct && !seen[j]) {
                seen[j] = 1;
                correct_before.push_back(j);
            }
        }
    }
    ConditionalAccuracy out;
    out.y = Matrix(m, m);
    out.normalized = Matrix(m, m);
    out.supported.assign(m, std::vector<bool>(m, false));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (den(i, j) > 0.0) {
                out.supported[i][j] = true;
                out.y(i, j) = num(i, j) / den(i, j);
            }
    for (std::size_t j = 0; j < m; ++j) {
        double denom = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (out.supported[i][j]) denom += out.y(i, j);
        if (denom <= 0.0) continue;
        for (std::size_t i = 0; i < m; ++i)
            if (out.supported[i][j]) out.normalized(i, j) = out.y(i, j) / denom;
    }
    return out;
}

// Pearson correlation between the sigmoid of the readout bias and the
// empirical per-exercise correct rate. Degenerate when either side has no
// variance (e.g. an untrained model).
struct BiasMarginalResult {
    double correlation = 0.0;
    bool degenerate = false;
    std::size_t exercises_used = 0;
};

inline BiasMarginalResult bias_marginal_check(const Model& model,
                                              const std::vector<InteractionSequence>& sequences) {
    const std::size_t m = model.output_dim();
    std::vector<double> attempts(m, 0.0), correct(m, 0.0);
    for (const auto& seq : sequences)
        for (const auto& step : seq.steps) {
            attempts[static_cast<std::size_t>(step.exercise)] += 1.0;
            correct[static_cast<std::size_t>(step.exercise)] += step.correct;
        }
    std::vector<double> xs, ys;
    const auto& bias = model.readout_bias();
    for (std::size_t q = 0; q < m; ++q) {
        if (attempts[q] == 0.0) continue;
        xs.push_back(sigmoid(bias[q]));
        ys.push_back(correct[q] / attempts[q]);
    }
    BiasMarginalResult r;
    r.exercises_used = xs.size();
    if (xs.size() < 2) {
        r.degenerate = true;
        return r;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx < 1e-24 || syy < 1e-24) {
        r.degenerate = true;
        return r;
    }
    r.correlation = sxy / std::sqrt(sxx * syy);
    return r;
}

// ---- exports ----

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

// Weighted digraph in Graphviz DOT form; only edges >= tau (off-diagonal)
// appear, pen width scales with weight, and `allowed` (when given)
// restricts the pairs drawn.
inline void write_dot(std::ostream& os, const Matrix& weights, const std::vector<std::string>& labels,
                      double tau, const std::set<std::pair<int, int>>* allowed = nullptr) {
    os << "digraph influence {\n";
    os << "  rankdir=LR;\n  node [shape=ellipse, fontsize=10];\n";
    std::vector<char> used(weights.rows(), 0);
    std::vector<InfluenceEdge> edges;
    double max_w = tau;
    for (std::size_t i = 0; i < weights.rows(); ++i)
        for (std::size_t j = 0; j < weights.cols(); ++j) {
            if (i == j || weights(i, j) < tau) continue;
            if (allowed && !allowed->count({static_cast<int>(i), static_cast<int>(j)})) continue;
            edges.push_back({static_cast<int>(i), static_cast<int>(j), weights(i, j)});
            used[i] = used[j] = 1;
            if (weights(i, j) > max_w) max_w = weights(i, j);
        }
    for (std::size_t i = 0; i < weights.rows(); ++i) {
        if (!used[i]) continue;
        const std::string label = i < labels.size() && !labels[i].empty() ? labels[i] : "e" + std::to_string(i);
        os << "  n" << i << " [label=\"" << dot_escape(label) << "\"];\n";
    }
    os << std::setprecision(6);
    for (const auto& e : edges) {
        const double width = max_w > tau ? 1.0 + 5.0 * (e.weight - tau) / (max_w - tau) : 1.0;
        os << "  n" << e.from << " -> n" << e.to << " [penwidth=" << width << ", weight=" << e.weight
           << ", label=\"" << std::setprecision(3) << e.weight << std::setprecision(6) << "\"];\n";
    }
    os << "}\n";
}

// Matrix dump with labeled header row/column.
inline void write_matrix_csv(std::ostream& os, const Matrix& m, const std::vector<std::string>& labels) {
    os << std::setprecision(17);
    os << "from\\to";
    for (std::size_t j = 0; j < m.cols(); ++j)
        os << "," << (j < labels.size() ? labels[j] : "e" + std::to_string(j));
    os << "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        os << (i < labels.size() ? labels[i] : "e" + std::to_string(i));
        for (std::size_t j = 0; j < m.cols(); ++j) os << "," << m(i, j);
        os << "\n";
    }
}

}  // namespace dkt
