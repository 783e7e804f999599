#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dkt/baselines.hpp"
#include "dkt/evaluation.hpp"
#include "dkt/rng.hpp"
#include "dkt/scorers.hpp"

using namespace dkt;

namespace {

// O(P*N) pair enumeration with half credit for ties.
double brute_force_auc(const std::vector<PredictionRecord>& records) {
    double wins = 0.0;
    long long pairs = 0;
    for (const auto& p : records) {
        if (!p.label) continue;
        for (const auto& n : records) {
            if (n.label) continue;
            ++pairs;
            if (p.score > n.score) wins += 1.0;
            else if (p.score == n.score) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

std::vector<PredictionRecord> make_records(const std::vector<std::pair<double, int>>& rows) {
    std::vector<PredictionRecord> out;
    for (const auto& [score, label] : rows) {
        PredictionRecord r;
        r.score = score;
        r.label = label;
        out.push_back(r);
    }
    return out;
}

}  // namespace

TEST_CASE("collect_predictions yields one record per target") {
    InteractionSequence seq;
    seq.student_id = "s0";
    seq.steps = {{0, 1}, {1, 0}, {2, 1}, {0, 0}, {1, 1}};
    InteractionSequence seq2;
    seq2.student_id = "s1";
    seq2.steps = {{1, 1}, {2, 0}};

    const SequenceScorer constant = [](const InteractionSequence& s) {
        return std::vector<double>(s.size() - 1, 0.5);
    };
    const auto records = collect_predictions(constant, {seq, seq2});
    REQUIRE(records.size() == 5);  // (5-1) + (2-1)
    CHECK(records[0].student == "s0");
    CHECK(records[0].step == 1);
    CHECK(records[0].exercise == 1);
    CHECK(records[0].label == 0);
    CHECK(records[4].student == "s1");
}

TEST_CASE("marginal scorer emits exactly its fitted rates") {
    std::vector<InteractionSequence> train(1);
    train[0].student_id = "t";
    train[0].steps = {{0, 1}, {0, 1}, {0, 0}, {1, 1}};
    const auto model = std::make_shared<MarginalModel>(fit_marginal(train, 2));

    InteractionSequence probe;
    probe.student_id = "p";
    probe.steps = {{1, 0}, {0, 1}, {1, 1}};
    const auto records = collect_predictions(make_marginal_scorer(model), {probe});
    REQUIRE(records.size() == 2);
    CHECK(records[0].score == model->predict(0));
    CHECK(records[1].score == model->predict(1));
}

TEST_CASE("auc on separable and degenerate score sets") {
    const auto perfect = make_records({{0.9, 1}, {0.8, 1}, {0.2, 0}, {0.1, 0}});
    CHECK(auc(perfect).auc == 1.0);

    const auto flat = make_records({{0.4, 1}, {0.4, 0}, {0.4, 1}, {0.4, 0}});
    CHECK(auc(flat).auc == 0.5);

    const auto inverted = make_records({{0.1, 1}, {0.9, 0}});
    CHECK(auc(inverted).auc == 0.0);

    CHECK_THROWS_AS(auc(make_records({{0.5, 1}, {0.6, 1}})), Error);
    CHECK_THROWS_AS(auc({}), Error);
}

TEST_CASE("auc hand case matches pair enumeration") {
    const auto records =
        make_records({{0.8, 1}, {0.7, 0}, {0.7, 1}, {0.5, 0}, {0.3, 1}, {0.2, 0}});
    const auto r = auc(records);
    CHECK(r.positives == 3);
    CHECK(r.negatives == 3);
    CHECK(r.auc == brute_force_auc(records));
    // by hand: pairs won = (0.8 beats .7,.5,.2)=3, (0.7 beats .5,.2)=2 + tie .7 = 0.5, (0.3 beats .2)=1
    CHECK_THAT(r.auc, Catch::Matchers::WithinAbs(6.5 / 9.0, 1e-15));
}

TEST_CASE("rank auc equals brute force exactly on 200 random instances") {
    Rng rng(101);
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t n = 2 + rng.below(49);
        std::vector<PredictionRecord> records;
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            PredictionRecord r;
            // coarse score grid makes ties frequent
            r.score = static_cast<double>(rng.below(16)) / 16.0;
            r.label = rng.bernoulli(0.5) ? 1 : 0;
            (r.label ? has_pos : has_neg) = true;
            records.push_back(r);
        }
        if (!has_pos) records[0].label = 1;
        if (!has_neg) records[records.size() > 1 ? 1 : 0].label = 0;
        if (records.size() == 1) continue;
        CHECK(auc(records).auc == brute_force_auc(records));
    }
}

TEST_CASE("auc is invariant under monotone score transforms") {
    Rng rng(103);
    std::vector<PredictionRecord> records;
    for (int i = 0; i < 60; ++i) {
        PredictionRecord r;
        r.score = static_cast<double>(rng.below(32)) / 32.0;
        r.label = rng.bernoulli(0.4) ? 1 : 0;
        records.push_back(r);
    }
    records[0].label = 1;
    records[1].label = 0;
    const double base = auc(records).auc;

    auto transformed = records;
    for (auto& r : transformed) r.score = 2.0 * r.score + 1.0;  // exact affine map
    CHECK(auc(transformed).auc == base);

    for (auto& r : transformed) r.score = std::sqrt(r.score);  // still monotone
    CHECK_THAT(auc(transformed).auc, Catch::Matchers::WithinAbs(base, 1e-12));
}

TEST_CASE("swapping labels flips auc") {
    Rng rng(104);
    std::vector<PredictionRecord> records;
    for (int i = 0; i < 40; ++i) {
        PredictionRecord r;
        r.score = rng.uniform();
        r.label = rng.bernoulli(0.5) ? 1 : 0;
        records.push_back(r);
    }
    records[0].label = 1;
    records[1].label = 0;
    const double base = auc(records).auc;
    auto flipped = records;
    for (auto& r : flipped) r.label = 1 - r.label;
    CHECK_THAT(auc(flipped).auc, Catch::Matchers::WithinAbs(1.0 - base, 1e-12));
}

TEST_CASE("folds partition students evenly and deterministically") {
    const auto folds = make_folds(23, 5, Rng(7));
    const auto folds2 = make_folds(23, 5, Rng(7));
    CHECK(folds == folds2);

    std::vector<char> seen(23, 0);
    for (const auto& f : folds) {
        CHECK(f.size() >= 4);
        CHECK(f.size() <= 5);
        for (std::size_t s : f) {
            CHECK(!seen[s]);
            seen[s] = 1;
        }
    }
    for (char c : seen) CHECK(c == 1);

    CHECK_THROWS_AS(make_folds(3, 5, Rng(1)), Error);
}

TEST_CASE("cross validation runs a trainer per fold") {
    Rng rng(9);
    std::vector<InteractionSequence> data(25);
    for (std::size_t s = 0; s < data.size(); ++s) {
        data[s].student_id = "s" + std::to_string(s);
        for (int t = 0; t < 8; ++t)
            data[s].steps.push_back({static_cast<int>(rng.below(3)), rng.bernoulli(0.7) ? 1 : 0});
    }
    int trainer_calls = 0;
    const TrainerFactory factory = [&](const std::vector<InteractionSequence>& train_split) {
        ++trainer_calls;
        CHECK(train_split.size() == 20);
        auto m = std::make_shared<MarginalModel>(fit_marginal(train_split, 3));
        return make_marginal_scorer(m);
    };
    const auto result = cross_validate(data, factory, 5, Rng(11));
    CHECK(trainer_calls == 5);
    REQUIRE(result.fold_auc.size() == 5);
    double mean = 0.0;
    for (const auto& f : result.fold_auc) mean += f.auc;
    CHECK_THAT(result.mean_auc, Catch::Matchers::WithinAbs(mean / 5.0, 1e-15));
}
