#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dkt/baselines.hpp"
#include "dkt/evaluation.hpp"
#include "dkt/model.hpp"
#include "dkt/simulator.hpp"

namespace dkt {

// Scores all T-1 targets of a sequence in one forward pass.
inline SequenceScorer make_dkt_scorer(std::shared_ptr<const Model> model) {
    return [model](const InteractionSequence& seq) {
        std::vector<double> scores;
        scores.reserve(seq.size() - 1);
        ModelState state = initial_state(*model);
        for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
            advance_state(*model, state, model->scheme.encode(seq.steps[t]));
            scores.push_back(readout_prob(*model, state, seq.steps[t + 1].exercise));
        }
        return scores;
    };
}

inline SequenceScorer make_marginal_scorer(std::shared_ptr<const MarginalModel> model) {
    return [model](const InteractionSequence& seq) {
        std::vector<double> scores;
        scores.reserve(seq.size() - 1);
        for (std::size_t t = 1; t < seq.size(); ++t) scores.push_back(model->predict(seq.steps[t].exercise));
        return scores;
    };
}

inline SequenceScorer make_bkt_scorer(std::shared_ptr<const BktModel> model) {
    return [model](const InteractionSequence& seq) {
        std::vector<double> scores;
        scores.reserve(seq.size() - 1);
        // mastery evolves incrementally per skill as the history unfolds
        std::map<int, double> mastery;
        auto mastery_of = [&](int skill) {
            auto it = mastery.find(skill);
            if (it == mastery.end())
                it = mastery.emplace(skill, model->per_skill[static_cast<std::size_t>(skill)].p_init).first;
            return it;
        };
        for (std::size_t t = 0; t < seq.size(); ++t) {
            const int q = seq.steps[t].exercise;
            const int skill = model->skill_of_exercise[static_cast<std::size_t>(q)];
            auto it = mastery_of(skill);
            if (t > 0) scores.push_back(bkt_emission(model->per_skill[static_cast<std::size_t>(skill)], it->second));
            it->second = bkt_update(model->per_skill[static_cast<std::size_t>(skill)], it->second,
                                    seq.steps[t].correct);
        }
        return scores;
    };
}

// True-model scorer; usable only on sequences generated with the given
// world/truth pair. Matches students by id.
inline SequenceScorer make_oracle_scorer(std::shared_ptr<const SyntheticWorld> world,
                                         std::shared_ptr<const TruthRecord> truth) {
    auto index = std::make_shared<std::map<std::string, std::size_t>>();
    for (std::size_t s = 0; s < truth->student_ids.size(); ++s) (*index)[truth->student_ids[s]] = s;
    return [world, truth, index](const InteractionSequence& seq) {
        const auto it = index->find(seq.student_id);
        if (it == index->end())
            fail(ErrorCode::InvalidArgument, "oracle has no truth for student '" + seq.student_id + "'");
        const std::size_t s = it->second;
        std::vector<double> scores;
        scores.reserve(seq.size() - 1);
        for (std::size_t t = 1; t < seq.size(); ++t) scores.push_back(oracle_predict(*world, *truth, s, t));
        return scores;
    };
}

}  // namespace dkt
