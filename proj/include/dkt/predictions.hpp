#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dkt/error.hpp"
#include "dkt/types.hpp"

namespace dkt {

// Per-timestep model outputs: y[t] has one predicted correctness
// probability per exercise, every entry strictly inside (0, 1).
struct PredictionSeries {
    std::vector<std::vector<double>> y;

    std::size_t steps() const { return y.size(); }
};

// Links one output step to the interaction it must predict: the output at
// `step` is scored on entry `exercise` against `answer`.
struct LossTarget {
    std::size_t step = 0;
    int exercise = 0;
    int answer = 0;
};

// Binary cross entropy for a single prediction.
inline double bce(double p, int answer) {
    return answer ? -std::log(p) : -std::log(1.0 - p);
}

// Training/evaluation pairing: the output after consuming interaction t
// predicts interaction t+1, so a length-T sequence yields T-1 targets; the
// first interaction is input only and the last is target only.
inline std::vector<LossTarget> targets_from_sequence(const InteractionSequence& seq) {
    if (seq.size() < 2) {
        fail(ErrorCode::SequenceTooShort,
             "sequence '" + seq.student_id + "' has " + std::to_string(seq.size()) +
                 " interactions; need at least 2");
    }
    std::vector<LossTarget> targets;
    targets.reserve(seq.size() - 1);
    for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
        targets.push_back({t, seq.steps[t + 1].exercise, seq.steps[t + 1].correct});
    }
    return targets;
}

// Summed next-step log loss of a prediction series against a sequence.
inline double sequence_loss(const PredictionSeries& series, const InteractionSequence& seq) {
    const auto targets = targets_from_sequence(seq);
    if (series.steps() < targets.size()) {
        fail(ErrorCode::DimensionMismatch,
             "prediction series has " + std::to_string(series.steps()) + " steps; sequence needs " +
                 std::to_string(targets.size()));
    }
    double loss = 0.0;
    for (const auto& t : targets) loss += bce(series.y[t.step][static_cast<std::size_t>(t.exercise)], t.answer);
    return loss;
}

}  // namespace dkt
