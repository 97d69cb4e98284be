#ifndef SYMR_TOKENIZER_HPP
#define SYMR_TOKENIZER_HPP

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "symr/piece.hpp"

namespace symr {

enum class Scheme { MIDILike, REMI, CPWord };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

/// Quantization grids shared by vocabulary construction and the
/// tokenizers. Defaults: 32 velocity bins uniform over 1-127;
/// time-shift/duration bins of 10 ms up to 1 s then 100 ms up to 10 s;
/// sixteenth-note position grid for scores; a fixed 1 s pseudo-bar with
/// 16 positions for performance REMI/CPWord.
struct QuantSpec {
    int velocity_bins = 32;
    std::vector<double> timeshift_values;      // seconds, ascending
    std::vector<double> duration_values;       // seconds, ascending
    std::vector<double> score_duration_values; // beats, ascending
    double perf_bar_seconds = 1.0;
    int perf_positions_per_bar = 16;
    int positions_per_beat = 4;                // score grid
    int max_voice = 8;
    std::vector<std::pair<int, int>> time_signatures = {{4, 4}};  // vocab set

    static QuantSpec defaults();

    int velocity_bin(int velocity) const;
    int velocity_from_bin(int bin) const;
    // Nearest-value quantization over an ascending grid.
    static int nearest_bin(const std::vector<double>& values, double v);
};

// Token family names, used in vocabulary files.
enum class TokenFamily {
    Special, Pitch, Velocity, Duration, TimeShift,
    Position, Bar, KeySig, TimeSig, Voice, Pedal,
};

std::string to_string(TokenFamily f);

/// Bijective token-string <-> id map with ids contiguous from 0.
/// PAD=0, BOS=1, EOS=2 are always reserved.
class Vocabulary {
public:
    static constexpr int32_t kPad = 0;
    static constexpr int32_t kBos = 1;
    static constexpr int32_t kEos = 2;

    int32_t add(const std::string& token, TokenFamily family);
    int32_t id(const std::string& token) const;           // throws if absent
    bool contains(const std::string& token) const;
    const std::string& token(int32_t id) const;
    TokenFamily family(int32_t id) const;
    int32_t size() const { return static_cast<int32_t>(tokens_.size()); }

    Scheme scheme = Scheme::MIDILike;
    Modality modality = Modality::performance;
    QuantSpec spec;

    std::string to_json() const;
    static Vocabulary from_json(const std::string& text);

private:
    std::vector<std::string> tokens_;
    std::vector<TokenFamily> families_;
    std::unordered_map<std::string, int32_t> index_;
};

/// Deterministic vocabulary for a (scheme, modality, quantization)
/// triple: identical inputs give byte-identical serialized files.
Vocabulary build_vocabulary(Scheme scheme, Modality modality,
                            const QuantSpec& spec);

// CPWord compound-token slots, in order.
enum CpSlot {
    kCpType = 0, kCpBarFlag, kCpPosition, kCpPitch, kCpVelVoice, kCpDuration,
    kCpArity
};
using CpTuple = std::array<int32_t, kCpArity>;

struct TokenSequence {
    Scheme scheme = Scheme::MIDILike;
    Modality modality = Modality::performance;
    std::vector<int32_t> ids;        // MIDILike / REMI
    std::vector<CpTuple> tuples;     // CPWord

    std::size_t length() const {
        return scheme == Scheme::CPWord ? tuples.size() : ids.size();
    }
};

/// Encodes a canonical doc under the scheme's grammar. MIDILike is
/// undefined for scores and throws UnsupportedCombination. Values
/// outside the quantization range are clamped; clamp events go to
/// `warnings`.
TokenSequence tokenize(const PieceDoc& doc, Scheme scheme,
                       const Vocabulary& vocab,
                       std::vector<std::string>* warnings = nullptr);

/// Inverse of tokenize up to quantization: pitch exact, times and
/// velocity within one bin. Ungrammatical input throws DecodeError
/// with the offending token index.
PieceDoc detokenize(const TokenSequence& seq, const Vocabulary& vocab);

}  // namespace symr

#endif
