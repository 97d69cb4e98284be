#ifndef SYMR_SYNTH_HPP
#define SYMR_SYNTH_HPP

#include <random>
#include <string>

#include "symr/graph.hpp"
#include "symr/piece.hpp"

namespace symr {

/// Random piece generators for property tests and the verify command.
/// Onsets snap to a coarse grid so exact coincidences, abutting
/// offsets, and near-misses around the tolerance all actually occur.
PieceDoc random_performance(std::mt19937_64& rng, int max_notes = 200,
                            double span_seconds = 60.0);
PieceDoc random_score(std::mt19937_64& rng, int max_notes = 200,
                      double span_beats = 120.0);

/// Brute-force O(N^2) graph construction straight from the edge
/// predicates, kept as the independent oracle for the sweep builder.
NoteGraph build_graph_oracle(const PieceDoc& doc, double window_start,
                             double window_length, const GraphConfig& cfg);

/// Tokenizer round-trip acceptance predicate: every original note has a
/// decoded counterpart with exact pitch and onset/duration/velocity
/// within the given tolerances, and vice versa (quantization may merge
/// originals that land in the same bin). Score notes must also agree on
/// voice when both carry one.
bool round_trip_matches(const PieceDoc& original, const PieceDoc& decoded,
                        double onset_tol, double duration_tol,
                        int velocity_tol, std::string* why = nullptr);

}  // namespace symr

#endif
