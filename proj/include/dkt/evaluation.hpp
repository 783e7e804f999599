#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "dkt/error.hpp"
#include "dkt/rng.hpp"
#include "dkt/types.hpp"

namespace dkt {

// One scored next-step prediction with provenance.
struct PredictionRecord {
    int label = 0;       // actual correctness
    double score = 0.0;  // predicted probability
    std::string student;
    std::size_t step = 0;
    int exercise = 0;
};

struct AucResult {
    double auc = 0.0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

// A scorer maps a student's sequence to scores for its T-1 prediction
// targets: entry t is the predicted probability that interaction t+1 is
// answered correctly given interactions 0..t.
using SequenceScorer = std::function<std::vector<double>(const InteractionSequence&)>;

inline std::vector<PredictionRecord> collect_predictions(
    const SequenceScorer& scorer, const std::vector<InteractionSequence>& sequences) {
    std::vector<PredictionRecord> records;
    for (const auto& seq : sequences) {
        if (seq.size() < 2) continue;
        const auto scores = scorer(seq);
        if (scores.size() != seq.size() - 1)
            fail(ErrorCode::DimensionMismatch,
                 "scorer returned " + std::to_string(scores.size()) + " scores for a sequence with " +
                     std::to_string(seq.size() - 1) + " targets");
        for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
            records.push_back({seq.steps[t + 1].correct, scores[t], seq.student_id, t + 1,
                               seq.steps[t + 1].exercise});
        }
    }
    return records;
}

// Rank-based AUC (Mann-Whitney), ties counted half. Equals the
// probability that a uniformly random positive outranks a uniformly
// random negative.
inline AucResult auc(const std::vector<PredictionRecord>& records) {
    AucResult r;
    for (const auto& rec : records) (rec.label ? r.positives : r.negatives)++;
    if (r.positives == 0 || r.negatives == 0)
        fail(ErrorCode::SingleClass, "auc needs at least one positive and one negative record");

    std::vector<std::size_t> idx(records.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return records[a].score < records[b].score; });

    // average ranks within tie groups; ranks are 1-based
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j < idx.size() && records[idx[j]].score == records[idx[i]].score) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (records[idx[k]].label) pos_rank_sum += avg_rank;
        i = j;
    }
    const double p = static_cast<double>(r.positives);
    const double n = static_cast<double>(r.negatives);
    r.auc = (pos_rank_sum - p * (p + 1.0) * 0.5) / (p * n);
    return r;
}

// ---- cross validation ----

struct CrossValidationResult {
    std::vector<AucResult> fold_auc;
    double mean_auc = 0.0;
    std::vector<std::vector<std::size_t>> fold_members;  // student indices per fold
};

// Trainer factory: builds a scorer from a training split.
using TrainerFactory = std::function<SequenceScorer(const std::vector<InteractionSequence>&)>;

// Deterministic student-level k-fold split: students are shuffled once
// with `rng` and cut into contiguous folds whose sizes differ by at most
// one.
inline std::vector<std::vector<std::size_t>> make_folds(std::size_t count, std::size_t folds, Rng rng) {
    if (count < folds)
        fail(ErrorCode::InvalidArgument,
             "cross validation needs at least " + std::to_string(folds) + " students, got " +
                 std::to_string(count));
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<std::vector<std::size_t>> out(folds);
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t lo = f * count / folds;
        const std::size_t hi = (f + 1) * count / folds;
        out[f].assign(order.begin() + static_cast<std::ptrdiff_t>(lo),
                      order.begin() + static_cast<std::ptrdiff_t>(hi));
    }
    return out;
}

inline CrossValidationResult cross_validate(const std::vector<InteractionSequence>& sequences,
                                            const TrainerFactory& trainer, std::size_t folds, Rng rng) {
    CrossValidationResult result;
    result.fold_members = make_folds(sequences.size(), folds, rng);

    double sum = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<char> in_fold(sequences.size(), 0);
        for (std::size_t s : result.fold_members[f]) in_fold[s] = 1;
        std::vector<InteractionSequence> train_set, test_set;
        for (std::size_t s = 0; s < sequences.size(); ++s)
            (in_fold[s] ? test_set : train_set).push_back(sequences[s]);
        const SequenceScorer scorer = trainer(train_set);
        const auto records = collect_predictions(scorer, test_set);
        result.fold_auc.push_back(auc(records));
        sum += result.fold_auc.back().auc;
    }
    result.mean_auc = sum / static_cast<double>(folds);
    return result;
}

}  // namespace dkt
