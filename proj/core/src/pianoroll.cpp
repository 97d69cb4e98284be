#include "symr/pianoroll.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace symr {

namespace {
constexpr double kEps = 1e-9;  // half-open interval boundary

// Pedal kind -> extra row index (rows 128-130).
int pedal_row(PedalEvent::Kind k) {
    switch (k) {
        case PedalEvent::Kind::una_corda: return 128;
        case PedalEvent::Kind::sostenuto: return 129;
        case PedalEvent::Kind::sustain: return 130;
    }
    return 130;
}
}  // namespace

PianoRoll build_roll(const PieceDoc& doc, double window_start,
                     const MatrixConfig& cfg) {
    PianoRoll roll;
    roll.channels = cfg.num_channels();
    roll.rows = cfg.num_rows();
    roll.cols = cfg.resolution;
    roll.values.assign(
        static_cast<size_t>(roll.channels) * roll.rows * roll.cols, 0);

    const double w0 = window_start;
    const double w1 = w0 + cfg.window_length;
    const double step = cfg.window_length / cfg.resolution;

    int onset_ch = -1, frame_ch = -1, c = 0;
    if (cfg.onset_channel) onset_ch = c++;
    if (cfg.frame_channel) frame_ch = c++;

    for (const auto& n : doc.notes) {
        if (n.offset() <= w0 || n.onset >= w1) continue;
        if (n.pitch < 0 || n.pitch > 127) continue;

        const uint32_t value = doc.modality == Modality::performance
                                   ? static_cast<uint32_t>(n.velocity.value_or(64))
                                   : static_cast<uint32_t>(n.voice.value_or(1));

        if (frame_ch >= 0) {
            const double lo = std::max(n.onset, w0);
            const double hi = std::min(n.offset(), w1);
            int c0 = static_cast<int>(std::floor((lo - w0) / step));
            int c1 = static_cast<int>(std::floor((hi - w0 - kEps) / step));
            c0 = std::clamp(c0, 0, roll.cols - 1);
            c1 = std::clamp(c1, 0, roll.cols - 1);
            for (int col = c0; col <= c1; ++col) {
                auto& cell = roll.at(frame_ch, n.pitch, col);
                cell = std::max(cell, value);
            }
        }
        if (onset_ch >= 0 && n.onset >= w0 && n.onset < w1) {
            int col = static_cast<int>(std::floor((n.onset - w0) / step));
            col = std::clamp(col, 0, roll.cols - 1);
            roll.at(onset_ch, n.pitch, col) = 1;
        }
    }

    if (cfg.include_pedal_rows && doc.modality == Modality::performance) {
        for (const auto& p : doc.pedals) {
            if (p.offset() <= w0 || p.onset >= w1) continue;
            const double lo = std::max(p.onset, w0);
            const double hi = std::min(p.offset(), w1);
            int c0 = static_cast<int>(std::floor((lo - w0) / step));
            int c1 = static_cast<int>(std::floor((hi - w0 - kEps) / step));
            c0 = std::clamp(c0, 0, roll.cols - 1);
            c1 = std::clamp(c1, 0, roll.cols - 1);
            const int row = pedal_row(p.kind);
            for (int ch = 0; ch < roll.channels; ++ch)
                for (int col = c0; col <= c1; ++col)
                    roll.at(ch, row, col) = 1;
        }
    }
    return roll;
}

namespace {
void put_u32le(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}
uint32_t get_u32le(const std::string& s, size_t pos) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<uint32_t>(static_cast<uint8_t>(s[pos + i])) << (8 * i);
    return v;
}
}  // namespace

std::string roll_to_bytes(const PianoRoll& roll) {
    std::string out;
    out.reserve(18 + roll.payload_bytes());
    out += "SYMR";
    out.push_back(1);  // version u16 LE
    out.push_back(0);
    put_u32le(out, static_cast<uint32_t>(roll.channels));
    put_u32le(out, static_cast<uint32_t>(roll.rows));
    put_u32le(out, static_cast<uint32_t>(roll.cols));
    for (uint32_t v : roll.values) put_u32le(out, v);
    return out;
}

PianoRoll roll_from_bytes(const std::string& bytes) {
    if (bytes.size() < 18 || bytes.compare(0, 4, "SYMR") != 0)
        throw ParseError("not a SYMR container", 0);
    const uint16_t version = static_cast<uint8_t>(bytes[4]) |
                             static_cast<uint8_t>(bytes[5]) << 8;
    if (version != 1) throw UnsupportedFormat("SYMR version " + std::to_string(version));
    PianoRoll roll;
    roll.channels = static_cast<int>(get_u32le(bytes, 6));
    roll.rows = static_cast<int>(get_u32le(bytes, 10));
    roll.cols = static_cast<int>(get_u32le(bytes, 14));
    const size_t n =
        static_cast<size_t>(roll.channels) * roll.rows * roll.cols;
    if (bytes.size() != 18 + n * 4)
        throw ParseError("SYMR payload size mismatch",
                         static_cast<long>(bytes.size()));
    roll.values.resize(n);
    for (size_t i = 0; i < n; ++i) roll.values[i] = get_u32le(bytes, 18 + i * 4);
    return roll;
}

std::vector<FrameRun> decode_frame_runs(const PianoRoll& roll, int channel) {
    std::vector<FrameRun> runs;
    for (int row = 0; row < roll.rows; ++row) {
        int col = 0;
        while (col < roll.cols) {
            const uint32_t v = roll.at(channel, row, col);
            if (v == 0) {
                ++col;
                continue;
            }
            int end = col;
            while (end + 1 < roll.cols && roll.at(channel, row, end + 1) == v) ++end;
            runs.push_back({row, col, end - col + 1, v});
            col = end + 1;
        }
    }
    return runs;
}

}  // namespace symr
