#include "symr/bpe.hpp"

#include <algorithm>
#include <map>

#include "json.hpp"

namespace symr {

std::string BpeModel::to_json() const {
    nlohmann::json j;
    j["base_vocab_size"] = base_vocab_size;
    j["target_multiplier"] = target_multiplier;
    j["merges"] = nlohmann::json::array();
    for (const auto& m : merges)
        j["merges"].push_back({m.first, m.second, m.merged});
    return j.dump(2);
}

BpeModel BpeModel::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    BpeModel model;
    model.base_vocab_size = j.at("base_vocab_size").get<int32_t>();
    model.target_multiplier = j.at("target_multiplier").get<int>();
    for (const auto& jm : j.at("merges"))
        model.merges.push_back({jm.at(0).get<int32_t>(), jm.at(1).get<int32_t>(),
                                jm.at(2).get<int32_t>()});
    return model;
}

namespace {

void merge_in_place(std::vector<int32_t>& ids, const BpeModel::Merge& m) {
    std::size_t w = 0;
    for (std::size_t r = 0; r < ids.size(); ++r) {
        if (r + 1 < ids.size() && ids[r] == m.first && ids[r + 1] == m.second) {
            ids[w++] = m.merged;
            ++r;
        } else {
            ids[w++] = ids[r];
        }
    }
    ids.resize(w);
}

}  // namespace

BpeModel bpe_train(const std::vector<TokenSequence>& corpus,
                   int32_t base_vocab_size, int multiplier) {
    if (corpus.empty()) throw Error("bpe_train: empty corpus");
    for (const auto& s : corpus)
        if (s.scheme == Scheme::CPWord)
            throw UnsupportedCombination("CPWord tuples are not BPE-merged");

    BpeModel model;
    model.base_vocab_size = base_vocab_size;
    model.target_multiplier = multiplier;

    std::vector<std::vector<int32_t>> work;
    work.reserve(corpus.size());
    for (const auto& s : corpus) work.push_back(s.ids);

    const int32_t target = base_vocab_size * multiplier;
    while (model.vocab_size() < target) {
        // ordered map gives the (lower first, lower second) tie-break
        std::map<std::pair<int32_t, int32_t>, std::size_t> counts;
        for (const auto& ids : work)
            for (std::size_t i = 0; i + 1 < ids.size(); ++i)
                ++counts[{ids[i], ids[i + 1]}];

        std::pair<int32_t, int32_t> best{-1, -1};
        std::size_t best_count = 0;
        for (const auto& [pair, count] : counts)
            if (count > best_count) {
                best = pair;
                best_count = count;
            }
        if (best_count < 2) break;

        BpeModel::Merge m{best.first, best.second, model.vocab_size()};
        model.merges.push_back(m);
        for (auto& ids : work) merge_in_place(ids, m);
    }
    return model;
}

TokenSequence bpe_apply(const TokenSequence& seq, const BpeModel& model) {
    if (seq.scheme == Scheme::CPWord)
        throw UnsupportedCombination("CPWord tuples are not BPE-merged");
    for (int32_t id : seq.ids)
        if (id >= model.base_vocab_size)
            throw Error("sequence is not over the base vocabulary");
    TokenSequence out = seq;
    for (const auto& m : model.merges) merge_in_place(out.ids, m);
    return out;
}

TokenSequence bpe_decode(const TokenSequence& seq, const BpeModel& model) {
    TokenSequence out = seq;
    std::vector<int32_t> ids;
    // Expand recursively; merged ids index merges by id - base size.
    std::vector<int32_t> stack(out.ids.rbegin(), out.ids.rend());
    while (!stack.empty()) {
        int32_t id = stack.back();
        stack.pop_back();
        if (id >= model.vocab_size())
            throw Error("token id beyond model vocabulary: " + std::to_string(id));
        if (id >= model.base_vocab_size) {
            const auto& m = model.merges[id - model.base_vocab_size];
            stack.push_back(m.second);
            stack.push_back(m.first);
        } else {
            ids.push_back(id);
        }
    }
    out.ids = std::move(ids);
    return out;
}

}  // namespace symr
