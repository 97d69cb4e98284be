#include "doctest.h"

#include "symr/synth.hpp"
#include "symr/tokenizer.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace symr;

namespace {

PieceDoc one_perf_note() {
    PieceDoc d;
    NoteEvent n;
    n.pitch = 60;
    n.onset = 0.0;
    n.duration = 0.5;
    n.velocity = 64;
    d.notes = {n};
    return d;
}

PieceDoc one_score_note() {
    PieceDoc d;
    d.modality = Modality::score;
    NoteEvent n;
    n.pitch = 60;
    n.onset = 0.0;
    n.duration = 1.0;
    n.voice = 1;
    n.measure_index = 0;
    d.notes = {n};
    d.time_signatures = {{0, 4, 4}};
    return d;
}

}  // namespace

TEST_CASE("vocabulary size: 32 velocity and 100 time-shift bins give 391") {
    QuantSpec spec = QuantSpec::defaults();
    spec.timeshift_values.resize(100);  // 10 ms steps up to 1 s
    auto v = build_vocabulary(Scheme::MIDILike, Modality::performance, spec);
    // 3 special + 128 NoteOn + 128 NoteOff + 32 Velocity + 100 TimeShift
    CHECK(v.size() == 391);
}

TEST_CASE("vocabulary construction is deterministic") {
    QuantSpec spec = QuantSpec::defaults();
    for (auto scheme : {Scheme::MIDILike, Scheme::REMI, Scheme::CPWord}) {
        for (auto m : {Modality::performance, Modality::score}) {
            if (scheme == Scheme::MIDILike && m == Modality::score) continue;
            auto a = build_vocabulary(scheme, m, spec);
            auto b = build_vocabulary(scheme, m, spec);
            CHECK(a.to_json() == b.to_json());
        }
    }
}

TEST_CASE("vocabulary JSON round trip") {
    auto v = build_vocabulary(Scheme::REMI, Modality::score, QuantSpec::defaults());
    auto back = Vocabulary::from_json(v.to_json());
    CHECK(back.size() == v.size());
    CHECK(back.to_json() == v.to_json());
}

TEST_CASE("hand-enumerated MIDILike sequence") {
    auto vocab = build_vocabulary(Scheme::MIDILike, Modality::performance,
                                  QuantSpec::defaults());
    auto seq = tokenize(one_perf_note(), Scheme::MIDILike, vocab);
    // velocity 64 -> bin 15; 0.5 s shift -> bin 49 (10 ms grid)
    std::vector<int32_t> expected = {
        Vocabulary::kBos,        vocab.id("Velocity_15"),
        vocab.id("NoteOn_60"),   vocab.id("TimeShift_49"),
        vocab.id("NoteOff_60"),  Vocabulary::kEos,
    };
    CHECK(seq.ids == expected);
}

TEST_CASE("hand-enumerated REMI score sequence") {
    auto vocab = build_vocabulary(Scheme::REMI, Modality::score,
                                  QuantSpec::defaults());
    auto seq = tokenize(one_score_note(), Scheme::REMI, vocab);
    // quarter-note duration 1.0 beats -> bin 3 on the 0.25-beat grid
    std::vector<int32_t> expected = {
        Vocabulary::kBos,       vocab.id("Bar"),      vocab.id("Position_0"),
        vocab.id("Voice_1"),    vocab.id("Pitch_60"), vocab.id("Duration_3"),
        Vocabulary::kEos,
    };
    CHECK(seq.ids == expected);
}

TEST_CASE("empty piece tokenizes to BOS/EOS only") {
    PieceDoc d;
    auto vocab = build_vocabulary(Scheme::MIDILike, Modality::performance,
                                  QuantSpec::defaults());
    auto seq = tokenize(d, Scheme::MIDILike, vocab);
    CHECK(seq.ids == std::vector<int32_t>{Vocabulary::kBos, Vocabulary::kEos});
}

TEST_CASE("tokenizing is deterministic") {
    std::mt19937_64 rng(5);
    auto vocab = build_vocabulary(Scheme::REMI, Modality::performance,
                                  QuantSpec::defaults());
    PieceDoc d = random_performance(rng, 100);
    auto a = tokenize(d, Scheme::REMI, vocab);
    auto b = tokenize(d, Scheme::REMI, vocab);
    CHECK(a.ids == b.ids);
}

TEST_CASE("MIDILike rejects scores") {
    CHECK_THROWS_AS(build_vocabulary(Scheme::MIDILike, Modality::score,
                                     QuantSpec::defaults()),
                    UnsupportedCombination);
    auto vocab = build_vocabulary(Scheme::MIDILike, Modality::performance,
                                  QuantSpec::defaults());
    CHECK_THROWS_AS(tokenize(one_score_note(), Scheme::MIDILike, vocab),
                    UnsupportedCombination);
}

TEST_CASE("ungrammatical sequences throw DecodeError with the index") {
    auto vocab = build_vocabulary(Scheme::MIDILike, Modality::performance,
                                  QuantSpec::defaults());
    TokenSequence seq;
    seq.scheme = Scheme::MIDILike;
    seq.ids = {Vocabulary::kBos, vocab.id("NoteOff_60"), Vocabulary::kEos};
    try {
        detokenize(seq, vocab);
        FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
        CHECK(e.index() == 1);
    }

    // Dangling NoteOn.
    seq.ids = {Vocabulary::kBos, vocab.id("Velocity_10"),
               vocab.id("NoteOn_60"), Vocabulary::kEos};
    CHECK_THROWS_AS(detokenize(seq, vocab), DecodeError);

    auto remi = build_vocabulary(Scheme::REMI, Modality::performance,
                                 QuantSpec::defaults());
    TokenSequence rseq;
    rseq.scheme = Scheme::REMI;
    rseq.ids = {Vocabulary::kBos, remi.id("Position_0"), Vocabulary::kEos};
    CHECK_THROWS_AS(detokenize(rseq, remi), DecodeError);  // Position before Bar
}

TEST_CASE("velocity bins recover within 2") {
    QuantSpec spec = QuantSpec::defaults();
    for (int v = 1; v <= 127; ++v) {
        int back = spec.velocity_from_bin(spec.velocity_bin(v));
        CHECK(std::abs(back - v) <= 2);
    }
}

TEST_CASE("performance round trips stay within one bin") {
    std::mt19937_64 rng(23);
    QuantSpec spec = QuantSpec::defaults();
    for (auto scheme : {Scheme::MIDILike, Scheme::REMI, Scheme::CPWord}) {
        auto vocab = build_vocabulary(scheme, Modality::performance, spec);
        for (int trial = 0; trial < 30; ++trial) {
            PieceDoc d = random_performance(rng, 80);
            auto seq = tokenize(d, scheme, vocab);
            auto back = detokenize(seq, vocab);
            std::string why;
            bool ok = round_trip_matches(d, back, 0.065, 0.105, 4, &why);
            INFO(to_string(scheme) << " trial " << trial << ": " << why);
            CHECK(ok);
        }
    }
}

TEST_CASE("score round trips are exact on the grid") {
    std::mt19937_64 rng(29);
    QuantSpec spec = QuantSpec::defaults();
    for (auto scheme : {Scheme::REMI, Scheme::CPWord}) {
        auto vocab = build_vocabulary(scheme, Modality::score, spec);
        for (int trial = 0; trial < 30; ++trial) {
            PieceDoc d = random_score(rng, 80);
            auto seq = tokenize(d, scheme, vocab);
            auto back = detokenize(seq, vocab);
            std::string why;
            bool ok = round_trip_matches(d, back, 1e-6, 1e-6, 0, &why);
            INFO(to_string(scheme) << " trial " << trial << ": " << why);
            CHECK(ok);
        }
    }
}

TEST_CASE("CPWord is shorter than REMI on the same piece") {
    std::mt19937_64 rng(31);
    QuantSpec spec = QuantSpec::defaults();
    auto remi = build_vocabulary(Scheme::REMI, Modality::performance, spec);
    auto cp = build_vocabulary(Scheme::CPWord, Modality::performance, spec);
    for (int trial = 0; trial < 10; ++trial) {
        PieceDoc d = random_performance(rng, 120);
        auto a = tokenize(d, Scheme::REMI, remi);
        auto b = tokenize(d, Scheme::CPWord, cp);
        CHECK(b.length() < a.length());
    }
}
