#ifndef SYMR_GRAPH_HPP
#define SYMR_GRAPH_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "symr/piece.hpp"

namespace symr {

enum class EdgeType {
    onset,
    consecutive,
    overlap,
    silence,
    voice,
    consecutive_inv,
    overlap_inv,
};

constexpr std::array<EdgeType, 7> kAllEdgeTypes = {
    EdgeType::onset,      EdgeType::consecutive,    EdgeType::overlap,
    EdgeType::silence,    EdgeType::voice,          EdgeType::consecutive_inv,
    EdgeType::overlap_inv,
};

std::string to_string(EdgeType t);

struct GraphConfig {
    double t_tol = 0.030;  // onset/offset tolerance, performance only
    bool inverse_edges = false;
    bool heterogeneous = true;
    bool include_silence_edges = false;
    bool include_voice_edges = false;  // score + advanced only
    FeatureLevel feature_level = FeatureLevel::basic;
};

using EdgeList = std::vector<std::pair<int, int>>;

/// Typed note graph over the notes of one window. Node order is the
/// canonical note order. The homogeneous view is the deduplicated union
/// of the typed lists.
struct NoteGraph {
    int node_count = 0;
    int feature_dim = 0;
    std::vector<double> features;  // node_count x feature_dim row-major
    std::vector<std::string> feature_names;
    std::map<EdgeType, EdgeList> edges;
    EdgeList hom_edges;  // filled by to_homogeneous
    bool heterogeneous = true;

    double feature(int node, int col) const {
        return features[static_cast<size_t>(node) * feature_dim + col];
    }
    EdgeList& typed(EdgeType t) { return edges[t]; }
};

/// Builds the typed edge sets with an onset-sorted sweep. Score
/// predicates compare times exactly; performance onset/consecutive
/// predicates use |dt| < t_tol, overlap stays strict.
NoteGraph build_graph(const PieceDoc& doc, double window_start,
                      double window_length, const GraphConfig& cfg);

/// Bridges every node with no incoming consecutive edge to the notes at
/// the maximal prior offset (within t_tol of it for performances).
/// Requires consecutive edges to be present already.
void add_silence_edges(NoteGraph& graph, const std::vector<NoteEvent>& notes,
                       Modality modality, double t_tol);

/// Within-measure bidirectional edges between equal-voice notes.
/// Score + advanced only; throws UnsupportedCombination on performances.
void add_voice_edges(NoteGraph& graph, const std::vector<NoteEvent>& notes,
                     Modality modality);

/// Basic: pitch-class one-hot (12) + octave one-hot (10) + normalized
/// duration = 23 columns. Advanced appends velocity/pedal features
/// (performance) or voice/articulation/dynamics/grace (score).
void node_features(const PieceDoc& doc, const std::vector<NoteEvent>& notes,
                   FeatureLevel level, double window_length, NoteGraph& graph);

/// Deduplicated union of all typed edge lists; features unchanged.
NoteGraph to_homogeneous(const NoteGraph& graph);

std::string graph_to_json(const NoteGraph& graph, const std::string& piece_id,
                          double window_start, double window_length,
                          const GraphConfig& cfg);

}  // namespace symr

#endif
