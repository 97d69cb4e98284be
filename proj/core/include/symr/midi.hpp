#ifndef SYMR_MIDI_HPP
#define SYMR_MIDI_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "symr/piece.hpp"

namespace symr {

/// Tempo changes in absolute ticks. Defaults to 120 bpm (500000 us per
/// quarter) at tick 0 when the file carries no tempo event.
struct TempoMap {
    struct Entry {
        int64_t tick;
        int64_t microseconds_per_quarter;
    };
    std::vector<Entry> entries;
    int ticks_per_quarter = 480;
};

/// Piecewise-linear tick->seconds conversion. Integer arithmetic in
/// nanoseconds internally, so the result is exact to 1 ns and monotone.
double ticks_to_seconds(int64_t tick, const TempoMap& map);

/// Parses a Standard MIDI File (formats 0 and 1) into a performance
/// PieceDoc. Note-on/off pairs are matched FIFO per (channel, pitch);
/// note-on with velocity 0 counts as note-off. Controllers 64/66/67
/// become sustain/sostenuto/una-corda pedal spans (value >= 64 = down).
/// The result is canonicalized. Non-fatal oddities (e.g. a dangling
/// note-on closed at end of track) are appended to `warnings`.
PieceDoc parse_smf(std::span<const uint8_t> bytes,
                   std::vector<std::string>* warnings = nullptr);

PieceDoc parse_smf_file(const std::string& path,
                        std::vector<std::string>* warnings = nullptr);

}  // namespace symr

#endif
