#ifndef SYMR_PIECE_HPP
#define SYMR_PIECE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symr/errors.hpp"

namespace symr {

enum class Modality { performance, score };

std::string to_string(Modality m);
Modality modality_from_string(const std::string& s);

enum class FeatureLevel { basic, advanced };

// Articulation bit flags.
enum : uint8_t {
    kStaccato = 1,
    kAccent = 2,
    kTenuto = 4,
};

/// One note. Times are seconds for performances, beats for scores
/// (quarter note = 1.0); the unit is carried by the owning document's
/// modality and never mixed.
struct NoteEvent {
    int pitch = 0;           // MIDI number 0-127
    double onset = 0.0;
    double duration = 0.0;   // > 0 after canonicalize
    std::optional<int> velocity;       // 1-127, performance only
    std::optional<int> voice;          // >= 1, score only
    std::optional<int> measure_index;  // 0-based, score only
    std::optional<int> staff;
    std::optional<int> part;
    uint8_t articulations = 0;         // kStaccato | kAccent | kTenuto
    std::optional<int> dynamic_level;  // ordinal 0-7
    bool grace = false;

    double offset() const { return onset + duration; }
};

struct PedalEvent {
    enum class Kind { sustain, sostenuto, una_corda };
    Kind kind = Kind::sustain;
    double onset = 0.0;     // seconds
    double duration = 0.0;  // > 0

    double offset() const { return onset + duration; }
};

struct TimeSignature {
    int measure_index = 0;
    int numerator = 4;
    int denominator = 4;

    double beats_per_measure() const {
        return numerator * 4.0 / denominator;
    }
};

struct KeySignature {
    int measure_index = 0;
    int fifths = 0;  // -7..+7
};

/// Canonical in-memory representation of a piece; the unit every
/// encoder consumes.
struct PieceDoc {
    Modality modality = Modality::performance;
    std::string piece_id;
    std::vector<NoteEvent> notes;                  // sorted by (onset, pitch)
    std::vector<PedalEvent> pedals;                // performance only
    std::vector<TimeSignature> time_signatures;    // score only
    std::vector<KeySignature> key_signatures;      // score only
    std::map<std::string, std::string> labels;     // task name -> class label
    // Smallest positive time quantum of the source document (1 tick for
    // MIDI, 1/divisions beat for MusicXML). 0 = unknown; canonicalize
    // then falls back to the smallest positive duration present.
    double quantum = 0.0;

    double length() const;  // max offset over notes, 0 if empty
};

/// Sorts by (onset, pitch), ties broken by duration descending, removes
/// exact duplicate notes (same pitch, onset, duration), and clamps
/// zero/negative durations up to the document quantum.
/// Idempotent. Throws EmptyPiece if there are no notes.
PieceDoc canonicalize(PieceDoc doc);

struct Violation {
    std::string code;   // e.g. "PitchOutOfRange"
    long note_index;    // -1 when not tied to a note
    std::string detail;
};

/// Reports every invariant violation; empty iff the doc is valid.
std::vector<Violation> validate(const PieceDoc& doc);

// Canonical piece JSON (field names match the type definitions).
std::string to_json(const PieceDoc& doc);
PieceDoc piece_from_json(const std::string& text);

}  // namespace symr

#endif
