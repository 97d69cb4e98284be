#ifndef SYMR_BPE_HPP
#define SYMR_BPE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "symr/tokenizer.hpp"

namespace symr {

/// Learned merge table. New ids start at base_vocab_size and are applied
/// in learned order, so training-time segmentation is reproducible.
struct BpeModel {
    struct Merge {
        int32_t first;
        int32_t second;
        int32_t merged;
    };
    std::vector<Merge> merges;
    int32_t base_vocab_size = 0;
    int target_multiplier = 4;

    int32_t vocab_size() const {
        return base_vocab_size + static_cast<int32_t>(merges.size());
    }

    std::string to_json() const;
    static BpeModel from_json(const std::string& text);
};

/// Greedy pair merging: repeatedly replace the globally most frequent
/// adjacent pair until the vocabulary reaches multiplier * base size or
/// no pair occurs at least twice. Ties break on (lower first id, lower
/// second id). CPWord tuples are not BPE-merged.
BpeModel bpe_train(const std::vector<TokenSequence>& corpus,
                   int32_t base_vocab_size, int multiplier = 4);

TokenSequence bpe_apply(const TokenSequence& seq, const BpeModel& model);

/// Exact inverse of bpe_apply.
TokenSequence bpe_decode(const TokenSequence& seq, const BpeModel& model);

}  // namespace symr

#endif
