#ifndef SYMR_SEGMENT_HPP
#define SYMR_SEGMENT_HPP

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "symr/piece.hpp"

namespace symr {

/// Fixed-context windows: 60 s for performances, 120 beats for scores.
constexpr double kPerformanceWindow = 60.0;
constexpr double kScoreWindow = 120.0;

inline double default_window_length(Modality m) {
    return m == Modality::performance ? kPerformanceWindow : kScoreWindow;
}

struct Window {
    std::string piece_id;
    double start = 0.0;
    double length = 0.0;
    int index = 0;
};

/// Tiles [0, piece length) with consecutive windows. A trailing
/// remainder shorter than 25% of the window length is merged into the
/// previous window instead of standing alone.
std::vector<Window> segment(const PieceDoc& doc, double window_length = 0.0);

/// Repeated piece-level holdout: `num_folds` independent seeded 85/15
/// splits keyed by piece_id, approximately class-stratified.
struct SplitPlan {
    struct Fold {
        std::set<std::string> train;
        std::set<std::string> test;
    };
    int num_folds = 8;
    uint64_t seed = 0;
    std::vector<Fold> folds;
};

struct PieceLabel {
    std::string piece_id;
    std::string label;
};

SplitPlan make_folds(const std::vector<PieceLabel>& pieces, int k = 8,
                     double test_frac = 0.15, uint64_t seed = 0,
                     bool stratify = true,
                     std::vector<std::string>* warnings = nullptr);

struct LeakageReport {
    std::vector<std::pair<int, std::string>> leaks;       // (fold, piece_id)
    std::vector<std::string> unassigned;                  // pieces unknown to plan
    bool clean() const { return leaks.empty(); }
};

LeakageReport leakage_audit(const SplitPlan& plan,
                            const std::vector<std::string>& corpus_piece_ids);

std::string to_json(const SplitPlan& plan);
SplitPlan split_plan_from_json(const std::string& text);

}  // namespace symr

#endif
