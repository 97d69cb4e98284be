#include "doctest.h"

#include "symr/pianoroll.hpp"
#include "symr/synth.hpp"

#include <cstdint>
#include <random>
#include <set>
#include <utility>

using namespace symr;

namespace {

NoteEvent perf_note(int pitch, double onset, double dur, int vel) {
    NoteEvent n;
    n.pitch = pitch;
    n.onset = onset;
    n.duration = dur;
    n.velocity = vel;
    return n;
}

}  // namespace

TEST_CASE("default payload is 2 x 128 x 800 u32 = 819200 bytes") {
    PieceDoc d;
    d.notes = {perf_note(60, 0.0, 1.0, 80)};
    MatrixConfig cfg;
    auto roll = build_roll(d, 0.0, cfg);
    CHECK(roll.channels == 2);
    CHECK(roll.rows == 128);
    CHECK(roll.cols == 800);
    CHECK(roll.payload_bytes() == 819200);
    auto bytes = roll_to_bytes(roll);
    CHECK(bytes.size() == 18 + 819200);
}

TEST_CASE("hand-filled note at resolution 600") {
    // 60 s window, 600 cols -> 0.1 s per step. Note [0, 1.0) covers
    // columns 0..9; onset channel marks only column 0.
    PieceDoc d;
    d.notes = {perf_note(60, 0.0, 1.0, 80)};
    MatrixConfig cfg;
    cfg.resolution = 600;
    auto roll = build_roll(d, 0.0, cfg);
    for (int c = 0; c < 10; ++c) CHECK(roll.at(1, 60, c) == 80);
    CHECK(roll.at(1, 60, 10) == 0);
    CHECK(roll.at(0, 60, 0) == 1);
    CHECK(roll.at(0, 60, 1) == 0);
    CHECK(roll.at(1, 61, 0) == 0);
}

TEST_CASE("onset channel sum equals in-window onsets") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        PieceDoc d = random_performance(rng, 120);
        MatrixConfig cfg;
        auto roll = build_roll(d, 0.0, cfg);
        // Count distinct (pitch, column) onset cells the notes produce;
        // collisions in the same cell collapse to one.
        std::set<std::pair<int, int>> cells;
        const double step = cfg.window_length / cfg.resolution;
        for (const auto& n : d.notes) {
            if (n.onset >= 0.0 && n.onset < cfg.window_length) {
                int col = static_cast<int>(n.onset / step);
                if (col >= cfg.resolution) col = cfg.resolution - 1;
                cells.insert({n.pitch, col});
            }
        }
        uint64_t sum = 0;
        for (int r = 0; r < roll.rows; ++r)
            for (int c = 0; c < roll.cols; ++c) sum += roll.at(0, r, c);
        CHECK(sum == cells.size());
    }
}

TEST_CASE("score frame values are voice indices") {
    PieceDoc d;
    d.modality = Modality::score;
    NoteEvent n;
    n.pitch = 72;
    n.onset = 0.0;
    n.duration = 2.0;
    n.voice = 3;
    d.notes = {n};
    MatrixConfig cfg;
    cfg.window_length = 120.0;
    auto roll = build_roll(d, 0.0, cfg);
    CHECK(roll.at(1, 72, 0) == 3);
}

TEST_CASE("collisions take the maximum value") {
    PieceDoc d;
    d.notes = {perf_note(60, 0.0, 1.0, 40), perf_note(60, 0.02, 1.0, 90)};
    MatrixConfig cfg;
    auto roll = build_roll(d, 0.0, cfg);
    CHECK(roll.at(1, 60, 0) == 90);
}

TEST_CASE("pedal rows appear when requested") {
    PieceDoc d;
    d.notes = {perf_note(60, 0.0, 1.0, 80)};
    PedalEvent p;
    p.kind = PedalEvent::Kind::sustain;
    p.onset = 0.0;
    p.duration = 30.0;
    d.pedals = {p};
    MatrixConfig cfg;
    cfg.include_pedal_rows = true;
    auto roll = build_roll(d, 0.0, cfg);
    CHECK(roll.rows == 131);
    CHECK(roll.at(1, 130, 0) != 0);   // sustain row active at t=0
    CHECK(roll.at(1, 130, 799) == 0); // released before 60 s
    CHECK(roll.at(1, 128, 0) == 0);   // una corda row empty
}

TEST_CASE("empty window is all zero") {
    PieceDoc d;
    d.notes = {perf_note(60, 0.0, 1.0, 80)};
    MatrixConfig cfg;
    auto roll = build_roll(d, 120.0, cfg);  // window far past the note
    for (auto v : roll.values) CHECK(v == 0);
}

TEST_CASE("container round trip is byte exact") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        PieceDoc d = random_performance(rng, 150);
        MatrixConfig cfg;
        cfg.include_pedal_rows = trial % 2 == 0;
        auto roll = build_roll(d, 0.0, cfg);
        auto bytes = roll_to_bytes(roll);
        auto back = roll_from_bytes(bytes);
        CHECK(back.channels == roll.channels);
        CHECK(back.rows == roll.rows);
        CHECK(back.cols == roll.cols);
        CHECK(back.values == roll.values);
        CHECK(roll_to_bytes(back) == bytes);
    }
}

TEST_CASE("frame runs re-encode the channel exactly") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        PieceDoc d = random_performance(rng, 150);
        MatrixConfig cfg;
        auto roll = build_roll(d, 0.0, cfg);
        auto runs = decode_frame_runs(roll, 1);
        PianoRoll rebuilt = roll;
        for (auto& v : rebuilt.values) v = 0;
        for (const auto& r : runs)
            for (int c = 0; c < r.length; ++c)
                rebuilt.at(1, r.row, r.col + c) = r.value;
        for (int r = 0; r < roll.rows; ++r)
            for (int c = 0; c < roll.cols; ++c)
                CHECK(rebuilt.at(1, r, c) == roll.at(1, r, c));
    }
}

TEST_CASE("column count is fixed regardless of window content") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        PieceDoc d = random_performance(rng, 30);
        MatrixConfig cfg;
        auto roll = build_roll(d, 0.0, cfg);
        CHECK(roll.cols == 800);
    }
}
