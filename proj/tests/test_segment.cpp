#include "doctest.h"

#include "symr/segment.hpp"
#include "symr/synth.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace symr;

namespace {

PieceDoc perf_of_length(double seconds) {
    PieceDoc d;
    NoteEvent n;
    n.pitch = 60;
    n.onset = 0.0;
    n.duration = seconds;
    n.velocity = 80;
    d.notes = {n};
    return d;
}

std::vector<PieceLabel> labeled(int n, int classes) {
    std::vector<PieceLabel> out;
    for (int i = 0; i < n; ++i)
        out.push_back({"p" + std::to_string(i),
                       "class" + std::to_string(i % classes)});
    return out;
}

}  // namespace

TEST_CASE("150 s performance tiles into 3 windows") {
    auto w = segment(perf_of_length(150.0));
    REQUIRE(w.size() == 3);
    CHECK(w[0].start == 0.0);
    CHECK(w[0].length == 60.0);
    CHECK(w[1].start == 60.0);
    CHECK(w[2].start == 120.0);
    CHECK(w[2].length == doctest::Approx(30.0));
}

TEST_CASE("short trailing remainder merges into the previous window") {
    // 125 s leaves a 5 s tail, under 25% of 60 s -> merged.
    auto w = segment(perf_of_length(125.0));
    REQUIRE(w.size() == 2);
    CHECK(w[1].length == doctest::Approx(65.0));
}

TEST_CASE("exactly one window when the piece fits") {
    auto w = segment(perf_of_length(60.0));
    REQUIRE(w.size() == 1);
    CHECK(w[0].length == doctest::Approx(60.0));

    auto shorter = segment(perf_of_length(10.0));
    REQUIRE(shorter.size() == 1);
    CHECK(shorter[0].length == doctest::Approx(10.0));
}

TEST_CASE("score windows default to 120 beats") {
    PieceDoc d = perf_of_length(240.0);
    d.modality = Modality::score;
    d.notes[0].velocity.reset();
    d.notes[0].voice = 1;
    auto w = segment(d);
    REQUIRE(w.size() == 2);
    CHECK(w[1].start == 120.0);
}

TEST_CASE("windows tile the piece with no gaps or overlap") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 50; ++trial) {
        PieceDoc d = random_performance(rng, 100, 40.0 + (rng() % 200));
        auto ws = segment(d);
        REQUIRE(!ws.empty());
        CHECK(ws.front().start == 0.0);
        double end = 0.0;
        for (std::size_t i = 0; i < ws.size(); ++i) {
            CHECK(ws[i].index == static_cast<int>(i));
            CHECK(ws[i].start == doctest::Approx(end));
            CHECK(ws[i].length > 0.0);
            end = ws[i].start + ws[i].length;
        }
        CHECK(end >= d.length() - 1e-9);
        // No stranded short tail.
        if (ws.size() > 1) CHECK(ws.back().length >= 0.25 * 60.0 - 1e-9);
    }
}

TEST_CASE("folds are deterministic in the seed") {
    auto pieces = labeled(40, 3);
    auto a = make_folds(pieces, 8, 0.15, 1234);
    auto b = make_folds(pieces, 8, 0.15, 1234);
    auto c = make_folds(pieces, 8, 0.15, 999);
    REQUIRE(a.folds.size() == 8);
    bool all_same = true, any_diff = false;
    for (int f = 0; f < 8; ++f) {
        if (a.folds[f].test != b.folds[f].test) all_same = false;
        if (a.folds[f].test != c.folds[f].test) any_diff = true;
    }
    CHECK(all_same);
    CHECK(any_diff);  // different seed moves at least one fold
}

TEST_CASE("test sizes honor the fraction within one piece") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 20 + static_cast<int>(rng() % 200);
        auto pieces = labeled(n, 2 + static_cast<int>(rng() % 4));
        auto plan = make_folds(pieces, 8, 0.15, rng());
        const long expect = std::lround(0.15 * n);
        for (const auto& f : plan.folds) {
            CHECK(std::llabs(static_cast<long>(f.test.size()) - expect) <= 1);
            CHECK(f.train.size() + f.test.size() == static_cast<std::size_t>(n));
        }
    }
}

TEST_CASE("train and test never share a piece") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 10 + static_cast<int>(rng() % 100);
        auto pieces = labeled(n, 3);
        auto plan = make_folds(pieces, 8, 0.15, rng());
        std::vector<std::string> corpus;
        for (const auto& p : pieces) corpus.push_back(p.piece_id);
        auto report = leakage_audit(plan, corpus);
        CHECK(report.clean());
        CHECK(report.unassigned.empty());
    }
}

TEST_CASE("duplicate piece ids collapse before splitting") {
    std::vector<PieceLabel> pieces = labeled(20, 2);
    pieces.push_back({"p0", "class0"});  // duplicate window-level row
    auto plan = make_folds(pieces, 8, 0.15, 7);
    for (const auto& f : plan.folds)
        CHECK(f.train.size() + f.test.size() == 20);
}

TEST_CASE("a hand-built leaky plan is detected") {
    auto pieces = labeled(10, 2);
    auto plan = make_folds(pieces, 2, 0.2, 5);
    plan.folds[0].train.insert(*plan.folds[0].test.begin());  // leak it
    std::vector<std::string> corpus;
    for (const auto& p : pieces) corpus.push_back(p.piece_id);
    auto report = leakage_audit(plan, corpus);
    CHECK(!report.clean());
    REQUIRE(!report.leaks.empty());
    CHECK(report.leaks[0].first == 0);
}

TEST_CASE("corpus pieces missing from the plan are flagged") {
    auto pieces = labeled(10, 2);
    auto plan = make_folds(pieces, 2, 0.2, 5);
    auto report = leakage_audit(plan, {"p0", "p1", "stranger"});
    CHECK(report.unassigned == std::vector<std::string>{"stranger"});
}

TEST_CASE("too few pieces for a split is an error") {
    CHECK_THROWS_AS(make_folds(labeled(1, 1), 8, 0.15, 0), Error);
}

TEST_CASE("split plan JSON round trip") {
    auto plan = make_folds(labeled(30, 3), 8, 0.15, 11);
    auto back = split_plan_from_json(to_json(plan));
    CHECK(back.num_folds == plan.num_folds);
    CHECK(back.seed == plan.seed);
    REQUIRE(back.folds.size() == plan.folds.size());
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        CHECK(back.folds[f].train == plan.folds[f].train);
        CHECK(back.folds[f].test == plan.folds[f].test);
    }
}
