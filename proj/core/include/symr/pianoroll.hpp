#ifndef SYMR_PIANOROLL_HPP
#define SYMR_PIANOROLL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "symr/piece.hpp"

namespace symr {

struct MatrixConfig {
    int resolution = 800;          // time steps per window
    bool onset_channel = true;
    bool frame_channel = true;
    bool include_pedal_rows = false;  // performance only, adds rows 128-130
    double window_length = 60.0;   // 60 s performance / 120 beats score

    int num_channels() const {
        return (onset_channel ? 1 : 0) + (frame_channel ? 1 : 0);
    }
    int num_rows() const { return include_pedal_rows ? 131 : 128; }
};

/// Multi-channel pitch x time roll. Row 0 = MIDI pitch 0; rows 128-130
/// (when present) = una corda, sostenuto, sustain. Values are u32 so
/// the serialized payload size is exactly channels*rows*cols*4 bytes.
struct PianoRoll {
    int channels = 0;
    int rows = 0;
    int cols = 0;
    std::vector<uint32_t> values;  // [channel][row][col] row-major

    uint32_t& at(int c, int r, int col) {
        return values[(static_cast<size_t>(c) * rows + r) * cols + col];
    }
    uint32_t at(int c, int r, int col) const {
        return values[(static_cast<size_t>(c) * rows + r) * cols + col];
    }
    size_t payload_bytes() const { return values.size() * sizeof(uint32_t); }
};

/// Fills a roll for the given window. The onset channel is binary and
/// marks only onsets inside the window; the frame channel spans note
/// durations and holds velocity (performance) or voice index (score).
/// Half-open column intervals; cell collisions resolve to max.
PianoRoll build_roll(const PieceDoc& doc, double window_start,
                     const MatrixConfig& cfg);

// Binary container: "SYMR", u16 version, u32 dims, then LE u32 values.
std::string roll_to_bytes(const PianoRoll& roll);
PianoRoll roll_from_bytes(const std::string& bytes);

/// Decodes the frame channel into (pitch, first column, column count,
/// value) runs; re-encoding them reproduces the channel exactly.
struct FrameRun {
    int row;
    int col;
    int length;
    uint32_t value;
};
std::vector<FrameRun> decode_frame_runs(const PianoRoll& roll, int channel);

}  // namespace symr

#endif
