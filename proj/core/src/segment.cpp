#include "symr/segment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "json.hpp"

namespace symr {

std::vector<Window> segment(const PieceDoc& doc, double window_length) {
    if (window_length <= 0.0) window_length = default_window_length(doc.modality);
    const double total = doc.length();
    std::vector<Window> out;
    if (total <= 0.0) return out;

    double pos = 0.0;
    int idx = 0;
    while (pos < total) {
        double len = std::min(window_length, total - pos);
        out.push_back({doc.piece_id, pos, len, idx++});
        pos += len;
    }
    // Merge a short trailing remainder into the previous window.
    if (out.size() >= 2 && out.back().length < 0.25 * window_length) {
        out[out.size() - 2].length += out.back().length;
        out.pop_back();
    }
    return out;
}

SplitPlan make_folds(const std::vector<PieceLabel>& pieces, int k,
                     double test_frac, uint64_t seed, bool stratify,
                     std::vector<std::string>* warnings) {
    if (static_cast<int>(pieces.size()) < k)
        throw Error("fewer pieces than folds");

    // Dedupe by piece_id; all performances of one piece share a side.
    std::map<std::string, std::string> by_id;
    for (const auto& p : pieces) by_id[p.piece_id] = p.label;

    std::map<std::string, std::vector<std::string>> by_class;
    for (const auto& [id, label] : by_id) by_class[label].push_back(id);
    const int n = static_cast<int>(by_id.size());
    const int target = static_cast<int>(std::lround(test_frac * n));

    if (warnings) {
        for (const auto& [label, ids] : by_class)
            if (static_cast<int>(ids.size()) < k)
                warnings->push_back("class '" + label + "' has only " +
                                    std::to_string(ids.size()) +
                                    " pieces; it may be absent from some test sets");
    }

    SplitPlan plan;
    plan.num_folds = k;
    plan.seed = seed;

    std::mt19937_64 rng(seed);
    for (int f = 0; f < k; ++f) {
        SplitPlan::Fold fold;
        if (stratify) {
            // Per-class quotas by largest remainder, summing to target.
            std::vector<std::pair<std::string, double>> fracs;
            int assigned = 0;
            std::map<std::string, int> quota;
            for (const auto& [label, ids] : by_class) {
                const double exact = test_frac * ids.size();
                quota[label] = static_cast<int>(std::floor(exact));
                assigned += quota[label];
                fracs.push_back({label, exact - std::floor(exact)});
            }
            std::sort(fracs.begin(), fracs.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
            });
            for (size_t i = 0; assigned < target && i < fracs.size(); ++i) {
                if (quota[fracs[i].first] <
                    static_cast<int>(by_class[fracs[i].first].size())) {
                    ++quota[fracs[i].first];
                    ++assigned;
                }
            }
            for (auto& [label, ids] : by_class) {
                std::vector<std::string> pool = ids;
                std::shuffle(pool.begin(), pool.end(), rng);
                for (int i = 0; i < quota[label]; ++i) fold.test.insert(pool[i]);
            }
        } else {
            std::vector<std::string> pool;
            for (const auto& [id, label] : by_id) pool.push_back(id);
            std::shuffle(pool.begin(), pool.end(), rng);
            for (int i = 0; i < target; ++i) fold.test.insert(pool[i]);
        }
        for (const auto& [id, label] : by_id)
            if (!fold.test.count(id)) fold.train.insert(id);
        plan.folds.push_back(std::move(fold));
    }
    return plan;
}

LeakageReport leakage_audit(const SplitPlan& plan,
                            const std::vector<std::string>& corpus_piece_ids) {
    LeakageReport report;
    for (int f = 0; f < static_cast<int>(plan.folds.size()); ++f)
        for (const auto& id : plan.folds[f].test)
            if (plan.folds[f].train.count(id)) report.leaks.push_back({f, id});
    for (const auto& id : corpus_piece_ids) {
        bool known = false;
        for (const auto& fold : plan.folds)
            if (fold.train.count(id) || fold.test.count(id)) {
                known = true;
                break;
            }
        if (!known) report.unassigned.push_back(id);
    }
    std::sort(report.unassigned.begin(), report.unassigned.end());
    report.unassigned.erase(
        std::unique(report.unassigned.begin(), report.unassigned.end()),
        report.unassigned.end());
    return report;
}

std::string to_json(const SplitPlan& plan) {
    nlohmann::json j;
    j["seed"] = plan.seed;
    j["num_folds"] = plan.num_folds;
    j["folds"] = nlohmann::json::array();
    for (const auto& fold : plan.folds)
        j["folds"].push_back({{"train", fold.train}, {"test", fold.test}});
    return j.dump(2);
}

SplitPlan split_plan_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    SplitPlan plan;
    plan.seed = j.value("seed", 0ull);
    plan.num_folds = j.at("num_folds").get<int>();
    for (const auto& jf : j.at("folds")) {
        SplitPlan::Fold fold;
        for (const auto& id : jf.at("train")) fold.train.insert(id.get<std::string>());
        for (const auto& id : jf.at("test")) fold.test.insert(id.get<std::string>());
        plan.folds.push_back(std::move(fold));
    }
    return plan;
}

}  // namespace symr
