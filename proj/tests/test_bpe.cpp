#include "doctest.h"

#include "symr/bpe.hpp"
#include "symr/synth.hpp"

#include <random>
#include <vector>

using namespace symr;

namespace {

TokenSequence seq_of(std::vector<int32_t> ids) {
    TokenSequence s;
    s.scheme = Scheme::MIDILike;
    s.modality = Modality::performance;
    s.ids = std::move(ids);
    return s;
}

}  // namespace

TEST_CASE("most frequent pair merges first") {
    // Pair (3,4) occurs twice; everything else once.
    auto model = bpe_train({seq_of({3, 4, 3, 4, 5})}, 6, 2);
    REQUIRE(!model.merges.empty());
    CHECK(model.merges[0].first == 3);
    CHECK(model.merges[0].second == 4);
    CHECK(model.merges[0].merged == 6);
    auto applied = bpe_apply(seq_of({3, 4, 3, 4, 5}), model);
    CHECK(applied.ids == std::vector<int32_t>{6, 6, 5});
    auto decoded = bpe_decode(applied, model);
    CHECK(decoded.ids == std::vector<int32_t>{3, 4, 3, 4, 5});
}

TEST_CASE("ties break on the lower pair") {
    // (3,4) and (5,6) both occur twice; (3,4) must merge first.
    auto model =
        bpe_train({seq_of({3, 4, 9, 3, 4, 8, 5, 6, 7, 5, 6})}, 10, 2);
    REQUIRE(model.merges.size() == 2);
    CHECK(model.merges[0].first == 3);
    CHECK(model.merges[0].second == 4);
    CHECK(model.merges[1].first == 5);
    CHECK(model.merges[1].second == 6);
}

TEST_CASE("training stops when no pair repeats") {
    auto model = bpe_train({seq_of({3, 4, 5})}, 6, 4);
    CHECK(model.merges.empty());
}

TEST_CASE("training stops at the target multiplier") {
    // Highly repetitive corpus; vocab must not exceed 2x base.
    std::vector<int32_t> ids;
    for (int i = 0; i < 200; ++i) {
        ids.push_back(3);
        ids.push_back(4);
        ids.push_back(5);
    }
    auto model = bpe_train({seq_of(ids)}, 6, 2);
    CHECK(model.vocab_size() <= 12);
}

TEST_CASE("empty corpus is an error") {
    CHECK_THROWS_AS(bpe_train({}, 6, 2), Error);
}

TEST_CASE("CPWord sequences cannot be BPE-merged") {
    TokenSequence s;
    s.scheme = Scheme::CPWord;
    s.tuples.push_back({});
    CHECK_THROWS_AS(bpe_train({s}, 6, 2), UnsupportedCombination);
}

TEST_CASE("apply rejects ids outside the base vocabulary") {
    auto model = bpe_train({seq_of({3, 4, 3, 4, 5})}, 6, 2);
    CHECK_THROWS_AS(bpe_apply(seq_of({99}), model), Error);
}

TEST_CASE("decode inverts apply and never lengthens, random corpora") {
    std::mt19937_64 rng(41);
    auto vocab = build_vocabulary(Scheme::MIDILike, Modality::performance,
                                  QuantSpec::defaults());
    for (int round = 0; round < 5; ++round) {
        std::vector<TokenSequence> corpus;
        for (int i = 0; i < 12; ++i)
            corpus.push_back(
                tokenize(random_performance(rng, 60), Scheme::MIDILike, vocab));
        auto model = bpe_train(corpus, vocab.size(), 2);
        CHECK(model.base_vocab_size == vocab.size());
        for (const auto& s : corpus) {
            auto applied = bpe_apply(s, model);
            CHECK(applied.ids.size() <= s.ids.size());
            auto decoded = bpe_decode(applied, model);
            CHECK(decoded.ids == s.ids);
        }
    }
}

TEST_CASE("model JSON round trip preserves segmentation") {
    std::mt19937_64 rng(43);
    auto vocab = build_vocabulary(Scheme::MIDILike, Modality::performance,
                                  QuantSpec::defaults());
    std::vector<TokenSequence> corpus;
    for (int i = 0; i < 8; ++i)
        corpus.push_back(
            tokenize(random_performance(rng, 60), Scheme::MIDILike, vocab));
    auto model = bpe_train(corpus, vocab.size(), 2);
    auto back = BpeModel::from_json(model.to_json());
    CHECK(back.base_vocab_size == model.base_vocab_size);
    CHECK(back.merges.size() == model.merges.size());
    for (const auto& s : corpus)
        CHECK(bpe_apply(s, back).ids == bpe_apply(s, model).ids);
}
