#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "dkt/baselines.hpp"
#include "dkt/evaluation.hpp"
#include "dkt/scorers.hpp"
#include "dkt/simulator.hpp"

using namespace dkt;

TEST_CASE("irt probability formula") {
    CHECK_THAT(irt_prob(0.0, 1.7, 0.25), Catch::Matchers::WithinAbs(0.625, 1e-15));
    CHECK_THAT(irt_prob(0.0, -3.0, 0.25), Catch::Matchers::WithinAbs(0.625, 1e-15));
    // alpha=1, beta=1, c=0.25, reference at 40 decimal digits
    CHECK_THAT(irt_prob(1.0, 1.0, 0.25), Catch::Matchers::WithinAbs(0.7982939339725037, 1e-15));
    CHECK(irt_prob(500.0, 500.0, 0.25) > 1.0 - 1e-12);
    CHECK(irt_prob(500.0, 500.0, 0.25) < 1.0);
    CHECK_THROWS_AS(irt_prob(0.0, 0.0, 1.0), Error);
}

TEST_CASE("irt is monotone in skill for positive difficulty") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const double beta = 0.1 + rng.uniform() * 3.0;
        const double a1 = rng.normal(), d = rng.uniform();
        CHECK(irt_prob(a1, beta, 0.25) <= irt_prob(a1 + d, beta, 0.25));
    }
}

TEST_CASE("frozen-skill students produce rates matching the formula") {
    WorldConfig wc;
    wc.concept_count = 3;
    wc.exercise_count = 12;
    wc.learn_increment = 0.0;
    wc.skill_std = 0.0;  // every student sits exactly at alpha = 0
    Rng wrng(71);
    const auto world = make_world(wc, wrng);
    Rng grng(72);
    const auto sim = generate_dataset(world, 5000, grng);

    std::vector<double> correct(12, 0.0), seen(12, 0.0);
    for (const auto& seq : sim.sequences)
        for (const auto& it : seq.steps) {
            seen[static_cast<std::size_t>(it.exercise)] += 1.0;
            correct[static_cast<std::size_t>(it.exercise)] += it.correct;
        }
    for (std::size_t e = 0; e < 12; ++e) {
        const double expected = irt_prob(0.0, world.difficulty[e], world.guess_floor);
        CHECK_THAT(correct[e] / seen[e], Catch::Matchers::WithinAbs(expected, 0.03));
    }
}

TEST_CASE("simulated-5 shape matches the headline counts") {
    WorldConfig wc;
    Rng wrng(80);
    const auto world = make_world(wc, wrng);
    Rng grng(81);
    const auto sim = generate_dataset(world, 4000, grng);
    REQUIRE(sim.sequences.size() == 4000);
    std::size_t answers = 0;
    for (const auto& s : sim.sequences) answers += s.size();
    CHECK(answers == 200000);
    CHECK(sim.tag_names.size() == 50);
}

TEST_CASE("dataset regeneration is byte-identical for a fixed seed") {
    WorldConfig wc;
    wc.concept_count = 4;
    wc.exercise_count = 20;
    Rng w1(5), w2(5);
    const auto world1 = make_world(wc, w1);
    const auto world2 = make_world(wc, w2);
    CHECK(world1.difficulty == world2.difficulty);
    CHECK(world1.presentation_order == world2.presentation_order);

    Rng g1(6), g2(6);
    const auto a = generate_dataset(world1, 50, g1);
    const auto b = generate_dataset(world2, 50, g2);
    REQUIRE(a.sequences.size() == b.sequences.size());
    for (std::size_t s = 0; s < a.sequences.size(); ++s) {
        REQUIRE(a.sequences[s].size() == b.sequences[s].size());
        for (std::size_t t = 0; t < a.sequences[s].size(); ++t) {
            CHECK(a.sequences[s].steps[t].exercise == b.sequences[s].steps[t].exercise);
            CHECK(a.sequences[s].steps[t].correct == b.sequences[s].steps[t].correct);
        }
    }
    CHECK(a.truth.alpha == b.truth.alpha);

    Rng g3(7);
    const auto c = generate_dataset(world1, 50, g3);
    bool differs = false;
    for (std::size_t s = 0; s < a.sequences.size() && !differs; ++s)
        for (std::size_t t = 0; t < a.sequences[s].size() && !differs; ++t)
            differs = a.sequences[s].steps[t].correct != c.sequences[s].steps[t].correct;
    CHECK(differs);
}

TEST_CASE("every simulated response probability lies in (c, 1)") {
    WorldConfig wc;
    wc.concept_count = 2;
    wc.exercise_count = 10;
    Rng wrng(9);
    const auto world = make_world(wc, wrng);
    Rng grng(10);
    const auto sim = generate_dataset(world, 200, grng);
    for (std::size_t s = 0; s < sim.sequences.size(); ++s) {
        for (std::size_t t = 0; t < sim.sequences[s].size(); ++t) {
            const double p = oracle_predict(world, sim.truth, s, t);
            CHECK(p > world.guess_floor);
            CHECK(p < 1.0);
        }
    }
}

TEST_CASE("per-concept skills never decrease while learning") {
    WorldConfig wc;
    wc.concept_count = 5;
    Rng wrng(11);
    const auto world = make_world(wc, wrng);
    Rng grng(12);
    const auto sim = generate_dataset(world, 20, grng);
    for (const auto& student_alpha : sim.truth.alpha) {
        for (std::size_t t = 1; t < student_alpha.size(); ++t)
            for (std::size_t c = 0; c < wc.concept_count; ++c)
                CHECK(student_alpha[t][c] >= student_alpha[t - 1][c]);
    }
}

TEST_CASE("oracle predictions equal the recorded-state formula") {
    WorldConfig wc;
    wc.concept_count = 3;
    wc.exercise_count = 9;
    Rng wrng(13);
    const auto world = make_world(wc, wrng);
    Rng grng(14);
    const auto sim = generate_dataset(world, 5, grng);
    for (std::size_t t = 0; t < sim.sequences[2].size(); ++t) {
        const int e = sim.truth.exercise[2][t];
        const double expected =
            irt_prob(sim.truth.alpha[2][t][static_cast<std::size_t>(world.concept_of[static_cast<std::size_t>(e)])],
                     world.difficulty[static_cast<std::size_t>(e)], world.guess_floor);
        CHECK(oracle_predict(world, sim.truth, 2, t) == expected);
    }
}

TEST_CASE("oracle outranks the marginal baseline on a five-concept world") {
    WorldConfig wc;  // defaults: k=5, M=50
    Rng wrng(15);
    const auto world = make_world(wc, wrng);
    Rng train_rng(16), test_rng(17);
    const auto train_set = generate_dataset(world, 400, train_rng);
    const auto test_set = generate_dataset(world, 400, test_rng);

    const auto marginal =
        std::make_shared<MarginalModel>(fit_marginal(train_set.sequences, wc.exercise_count));
    const auto world_ptr = std::make_shared<SyntheticWorld>(world);
    const auto truth_ptr = std::make_shared<TruthRecord>(test_set.truth);

    const auto marg_auc = auc(collect_predictions(make_marginal_scorer(marginal), test_set.sequences));
    const auto oracle_auc =
        auc(collect_predictions(make_oracle_scorer(world_ptr, truth_ptr), test_set.sequences));
    CHECK(oracle_auc.auc > marg_auc.auc);
}

TEST_CASE("truth records survive a file round trip") {
    WorldConfig wc;
    wc.concept_count = 2;
    wc.exercise_count = 6;
    Rng wrng(18);
    const auto world = make_world(wc, wrng);
    Rng grng(19);
    const auto sim = generate_dataset(world, 7, grng);

    const std::string path = "/tmp/dkt_test_truth.csv";
    write_truth(path, world, sim.truth);
    const auto loaded = read_truth(path);
    REQUIRE(loaded.student_ids == sim.truth.student_ids);
    REQUIRE(loaded.exercise == sim.truth.exercise);
    REQUIRE(loaded.answer == sim.truth.answer);
    REQUIRE(loaded.alpha.size() == sim.truth.alpha.size());
    for (std::size_t s = 0; s < loaded.alpha.size(); ++s)
        CHECK(loaded.alpha[s] == sim.truth.alpha[s]);  // %.17g round trip is bit exact
}
