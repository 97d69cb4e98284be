#include "symr/tokenizer.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace symr {

using nlohmann::json;

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::MIDILike: return "MIDILike";
        case Scheme::REMI: return "REMI";
        case Scheme::CPWord: return "CPWord";
    }
    return "MIDILike";
}

Scheme scheme_from_string(const std::string& s) {
    std::string low;
    for (char c : s) low.push_back(static_cast<char>(std::tolower(c)));
    if (low == "midilike") return Scheme::MIDILike;
    if (low == "remi") return Scheme::REMI;
    if (low == "cpword" || low == "cp") return Scheme::CPWord;
    throw Error("unknown tokenization scheme: " + s);
}

std::string to_string(TokenFamily f) {
    switch (f) {
        case TokenFamily::Special: return "Special";
        case TokenFamily::Pitch: return "Pitch";
        case TokenFamily::Velocity: return "Velocity";
        case TokenFamily::Duration: return "Duration";
        case TokenFamily::TimeShift: return "TimeShift";
        case TokenFamily::Position: return "Position";
        case TokenFamily::Bar: return "Bar";
        case TokenFamily::KeySig: return "KeySig";
        case TokenFamily::TimeSig: return "TimeSig";
        case TokenFamily::Voice: return "Voice";
        case TokenFamily::Pedal: return "Pedal";
    }
    return "Special";
}

static TokenFamily family_from_string(const std::string& s) {
    static const std::unordered_map<std::string, TokenFamily> table = {
        {"Special", TokenFamily::Special},   {"Pitch", TokenFamily::Pitch},
        {"Velocity", TokenFamily::Velocity}, {"Duration", TokenFamily::Duration},
        {"TimeShift", TokenFamily::TimeShift}, {"Position", TokenFamily::Position},
        {"Bar", TokenFamily::Bar},           {"KeySig", TokenFamily::KeySig},
        {"TimeSig", TokenFamily::TimeSig},   {"Voice", TokenFamily::Voice},
        {"Pedal", TokenFamily::Pedal},
    };
    auto it = table.find(s);
    if (it == table.end()) throw Error("unknown token family: " + s);
    return it->second;
}

QuantSpec QuantSpec::defaults() {
    QuantSpec q;
    for (int i = 1; i <= 100; ++i) q.timeshift_values.push_back(i * 0.01);
    for (int i = 11; i <= 100; ++i) q.timeshift_values.push_back(i * 0.1);
    q.duration_values = q.timeshift_values;
    for (int i = 1; i <= 64; ++i) q.score_duration_values.push_back(i * 0.25);
    return q;
}

int QuantSpec::velocity_bin(int velocity) const {
    velocity = std::clamp(velocity, 1, 127);
    int b = static_cast<int>((velocity - 1) * velocity_bins / 127.0);
    return std::clamp(b, 0, velocity_bins - 1);
}

int QuantSpec::velocity_from_bin(int bin) const {
    double v = 1.0 + (bin + 0.5) * 127.0 / velocity_bins;
    return std::clamp(static_cast<int>(std::lround(v)), 1, 127);
}

int QuantSpec::nearest_bin(const std::vector<double>& values, double v) {
    auto it = std::lower_bound(values.begin(), values.end(), v);
    if (it == values.begin()) return 0;
    if (it == values.end()) return static_cast<int>(values.size()) - 1;
    auto prev = std::prev(it);
    return (v - *prev <= *it - v)
               ? static_cast<int>(prev - values.begin())
               : static_cast<int>(it - values.begin());
}

int32_t Vocabulary::add(const std::string& token, TokenFamily family) {
    auto it = index_.find(token);
    if (it != index_.end()) return it->second;
    int32_t id = size();
    tokens_.push_back(token);
    families_.push_back(family);
    index_[token] = id;
    return id;
}

int32_t Vocabulary::id(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) throw Error("token not in vocabulary: " + token);
    return it->second;
}

bool Vocabulary::contains(const std::string& token) const {
    return index_.count(token) != 0;
}

const std::string& Vocabulary::token(int32_t id) const {
    if (id < 0 || id >= size())
        throw Error("token id out of range: " + std::to_string(id));
    return tokens_[id];
}

TokenFamily Vocabulary::family(int32_t id) const {
    if (id < 0 || id >= size())
        throw Error("token id out of range: " + std::to_string(id));
    return families_[id];
}

std::string Vocabulary::to_json() const {
    json j;
    j["scheme"] = symr::to_string(scheme);
    j["modality"] = symr::to_string(modality);
    json spec_j;
    spec_j["velocity_bins"] = spec.velocity_bins;
    spec_j["timeshift_values"] = spec.timeshift_values;
    spec_j["duration_values"] = spec.duration_values;
    spec_j["score_duration_values"] = spec.score_duration_values;
    spec_j["perf_bar_seconds"] = spec.perf_bar_seconds;
    spec_j["perf_positions_per_bar"] = spec.perf_positions_per_bar;
    spec_j["positions_per_beat"] = spec.positions_per_beat;
    spec_j["max_voice"] = spec.max_voice;
    spec_j["time_signatures"] = spec.time_signatures;
    j["quantization"] = spec_j;
    j["entries"] = json::array();
    for (int32_t i = 0; i < size(); ++i)
        j["entries"].push_back({{"id", i},
                                {"token", tokens_[i]},
                                {"family", symr::to_string(families_[i])}});
    return j.dump(2);
}

Vocabulary Vocabulary::from_json(const std::string& text) {
    json j = json::parse(text);
    Vocabulary v;
    v.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    v.modality = modality_from_string(j.at("modality").get<std::string>());
    const auto& sj = j.at("quantization");
    v.spec.velocity_bins = sj.at("velocity_bins").get<int>();
    v.spec.timeshift_values = sj.at("timeshift_values").get<std::vector<double>>();
    v.spec.duration_values = sj.at("duration_values").get<std::vector<double>>();
    v.spec.score_duration_values =
        sj.at("score_duration_values").get<std::vector<double>>();
    v.spec.perf_bar_seconds = sj.at("perf_bar_seconds").get<double>();
    v.spec.perf_positions_per_bar = sj.at("perf_positions_per_bar").get<int>();
    v.spec.positions_per_beat = sj.at("positions_per_beat").get<int>();
    v.spec.max_voice = sj.at("max_voice").get<int>();
    v.spec.time_signatures =
        sj.at("time_signatures").get<std::vector<std::pair<int, int>>>();
    for (const auto& e : j.at("entries"))
        v.add(e.at("token").get<std::string>(),
              family_from_string(e.at("family").get<std::string>()));
    return v;
}

namespace {

std::string tok(const std::string& prefix, int v) {
    return prefix + "_" + std::to_string(v);
}

int score_positions_per_bar(const QuantSpec& spec, int num, int den) {
    const double beats = num * 4.0 / den;
    return std::max(1, static_cast<int>(std::lround(beats * spec.positions_per_beat)));
}

int max_positions(const QuantSpec& spec, Modality m) {
    if (m == Modality::performance) return spec.perf_positions_per_bar;
    int mx = 1;
    for (auto [num, den] : spec.time_signatures)
        mx = std::max(mx, score_positions_per_bar(spec, num, den));
    return mx;
}

const std::vector<double>& duration_grid(const Vocabulary& vocab) {
    return vocab.modality == Modality::performance
               ? vocab.spec.duration_values
               : vocab.spec.score_duration_values;
}

}  // namespace

Vocabulary build_vocabulary(Scheme scheme, Modality modality,
                            const QuantSpec& spec) {
    if (scheme == Scheme::MIDILike && modality == Modality::score)
        throw UnsupportedCombination("MIDILike is undefined for scores");

    Vocabulary v;
    v.scheme = scheme;
    v.modality = modality;
    v.spec = spec;
    v.add("PAD", TokenFamily::Special);
    v.add("BOS", TokenFamily::Special);
    v.add("EOS", TokenFamily::Special);

    const bool perf = modality == Modality::performance;
    const int npos = max_positions(spec, modality);
    const int ndur = perf ? static_cast<int>(spec.duration_values.size())
                          : static_cast<int>(spec.score_duration_values.size());

    switch (scheme) {
        case Scheme::MIDILike:
            for (int p = 0; p < 128; ++p) v.add(tok("NoteOn", p), TokenFamily::Pitch);
            for (int p = 0; p < 128; ++p) v.add(tok("NoteOff", p), TokenFamily::Pitch);
            for (int b = 0; b < spec.velocity_bins; ++b)
                v.add(tok("Velocity", b), TokenFamily::Velocity);
            for (int t = 0; t < static_cast<int>(spec.timeshift_values.size()); ++t)
                v.add(tok("TimeShift", t), TokenFamily::TimeShift);
            break;

        case Scheme::REMI:
            v.add("Bar", TokenFamily::Bar);
            for (int p = 0; p < npos; ++p)
                v.add(tok("Position", p), TokenFamily::Position);
            if (perf) {
                for (int b = 0; b < spec.velocity_bins; ++b)
                    v.add(tok("Velocity", b), TokenFamily::Velocity);
            } else {
                for (int vi = 1; vi <= spec.max_voice; ++vi)
                    v.add(tok("Voice", vi), TokenFamily::Voice);
            }
            for (int p = 0; p < 128; ++p) v.add(tok("Pitch", p), TokenFamily::Pitch);
            for (int d = 0; d < ndur; ++d)
                v.add(tok("Duration", d), TokenFamily::Duration);
            if (!perf) {
                for (int f = -7; f <= 7; ++f)
                    v.add(tok("KeySig", f), TokenFamily::KeySig);
                for (auto [num, den] : spec.time_signatures)
                    v.add("TimeSig_" + std::to_string(num) + "/" +
                              std::to_string(den),
                          TokenFamily::TimeSig);
            }
            break;

        case Scheme::CPWord:
            v.add("Type_BOS", TokenFamily::Special);
            v.add("Type_EOS", TokenFamily::Special);
            v.add("Type_Metric", TokenFamily::Special);
            v.add("Type_Note", TokenFamily::Special);
            v.add("BarFlag_New", TokenFamily::Bar);
            v.add("BarFlag_Ignore", TokenFamily::Bar);
            for (int p = 0; p < npos; ++p)
                v.add(tok("Position", p), TokenFamily::Position);
            v.add("Position_Ignore", TokenFamily::Position);
            for (int p = 0; p < 128; ++p) v.add(tok("Pitch", p), TokenFamily::Pitch);
            v.add("Pitch_Ignore", TokenFamily::Pitch);
            if (perf) {
                for (int b = 0; b < spec.velocity_bins; ++b)
                    v.add(tok("Velocity", b), TokenFamily::Velocity);
            } else {
                for (int vi = 1; vi <= spec.max_voice; ++vi)
                    v.add(tok("Voice", vi), TokenFamily::Voice);
            }
            v.add("VelVoice_Ignore",
                  perf ? TokenFamily::Velocity : TokenFamily::Voice);
            for (int d = 0; d < ndur; ++d)
                v.add(tok("Duration", d), TokenFamily::Duration);
            v.add("Duration_Ignore", TokenFamily::Duration);
            break;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Score bar table: bar start positions in beats from the document's time
// signatures (nominal lengths; 4/4 assumed before the first signature).

namespace {

class ScoreBars {
public:
    ScoreBars(const std::vector<TimeSignature>& sigs, const QuantSpec& spec)
        : sigs_(sigs), spec_(spec) {
        std::sort(sigs_.begin(), sigs_.end(),
                  [](const TimeSignature& a, const TimeSignature& b) {
                      return a.measure_index < b.measure_index;
                  });
        starts_ = {0.0};
    }

    TimeSignature sig_at(int bar) const {
        TimeSignature eff{0, 4, 4};
        for (const auto& s : sigs_)
            if (s.measure_index <= bar) eff = s;
            else break;
        return eff;
    }

    // Explicit signature event at exactly this bar, if any.
    std::optional<TimeSignature> change_at(int bar) const {
        for (const auto& s : sigs_)
            if (s.measure_index == bar) return s;
        return std::nullopt;
    }

    double start(int bar) {
        while (static_cast<int>(starts_.size()) <= bar)
            starts_.push_back(starts_.back() +
                              sig_at(static_cast<int>(starts_.size()) - 1)
                                  .beats_per_measure());
        return starts_[bar];
    }

    int bar_of(double onset) {
        int bar = 0;
        while (start(bar + 1) <= onset + 1e-12) ++bar;
        return bar;
    }

private:
    std::vector<TimeSignature> sigs_;
    QuantSpec spec_;
    std::vector<double> starts_;
};

struct BarPos {
    int bar;
    int pos;
};

// Snap an onset onto the (bar, position) grid; positions that round to
// the next barline roll over.
BarPos locate(double onset, ScoreBars* bars, const QuantSpec& spec,
              Modality modality) {
    if (modality == Modality::performance) {
        const double grid = spec.perf_bar_seconds / spec.perf_positions_per_bar;
        int bar = static_cast<int>(std::floor(onset / spec.perf_bar_seconds + 1e-12));
        int pos = static_cast<int>(std::lround((onset - bar * spec.perf_bar_seconds) / grid));
        if (pos >= spec.perf_positions_per_bar) {
            ++bar;
            pos = 0;
        }
        return {bar, pos};
    }
    int bar = bars->bar_of(onset);
    const double grid = 1.0 / spec.positions_per_beat;
    int pos = static_cast<int>(std::lround((onset - bars->start(bar)) / grid));
    const auto sig = bars->sig_at(bar);
    if (pos >= score_positions_per_bar(spec, sig.numerator, sig.denominator)) {
        ++bar;
        pos = 0;
    }
    return {bar, pos};
}

void warn(std::vector<std::string>* warnings, const std::string& msg) {
    if (warnings) warnings->push_back(msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// tokenize

namespace {

TokenSequence tokenize_midilike(const PieceDoc& doc, const Vocabulary& vocab,
                                std::vector<std::string>* warnings) {
    const QuantSpec& spec = vocab.spec;
    TokenSequence seq;
    seq.scheme = Scheme::MIDILike;
    seq.modality = doc.modality;
    seq.ids.push_back(Vocabulary::kBos);

    struct Ev {
        double time;
        int kind;  // 0 = off, 1 = on
        int pitch;
        int vel;
    };
    std::vector<Ev> events;
    for (const auto& n : doc.notes) {
        events.push_back({n.onset, 1, n.pitch, n.velocity.value_or(64)});
        events.push_back({n.offset(), 0, n.pitch, 0});
    }
    std::sort(events.begin(), events.end(), [](const Ev& a, const Ev& b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.kind != b.kind) return a.kind < b.kind;  // off before on
        return a.pitch < b.pitch;
    });

    const double max_shift = spec.timeshift_values.back();
    double cur = 0.0;
    for (const auto& ev : events) {
        double delta = ev.time - cur;
        while (delta > max_shift) {
            seq.ids.push_back(vocab.id(tok("TimeShift",
                static_cast<int>(spec.timeshift_values.size()) - 1)));
            cur += max_shift;
            delta -= max_shift;
        }
        if (delta > spec.timeshift_values.front() / 2) {
            int bin = QuantSpec::nearest_bin(spec.timeshift_values, delta);
            seq.ids.push_back(vocab.id(tok("TimeShift", bin)));
            cur += spec.timeshift_values[bin];
        }
        if (ev.kind == 1) {
            seq.ids.push_back(
                vocab.id(tok("Velocity", spec.velocity_bin(ev.vel))));
            seq.ids.push_back(vocab.id(tok("NoteOn", ev.pitch)));
        } else {
            seq.ids.push_back(vocab.id(tok("NoteOff", ev.pitch)));
        }
    }
    (void)warnings;
    seq.ids.push_back(Vocabulary::kEos);
    return seq;
}

TokenSequence tokenize_remi(const PieceDoc& doc, const Vocabulary& vocab,
                            std::vector<std::string>* warnings) {
    const QuantSpec& spec = vocab.spec;
    const bool perf = doc.modality == Modality::performance;
    TokenSequence seq;
    seq.scheme = Scheme::REMI;
    seq.modality = doc.modality;
    seq.ids.push_back(Vocabulary::kBos);

    ScoreBars bars(doc.time_signatures, spec);
    const auto& durs = duration_grid(vocab);
    const int npos = max_positions(spec, doc.modality);

    TimeSignature eff_sig{0, 4, 4};
    int eff_fifths = 0;
    int cur_bar = -1;

    auto enter_bar = [&](int target) {
        while (cur_bar < target) {
            ++cur_bar;
            seq.ids.push_back(vocab.id("Bar"));
            if (!perf) {
                if (auto ts = bars.change_at(cur_bar)) {
                    if (ts->numerator != eff_sig.numerator ||
                        ts->denominator != eff_sig.denominator) {
                        const std::string t = "TimeSig_" +
                            std::to_string(ts->numerator) + "/" +
                            std::to_string(ts->denominator);
                        if (vocab.contains(t)) {
                            seq.ids.push_back(vocab.id(t));
                            eff_sig = *ts;
                        } else {
                            warn(warnings, "time signature not in vocabulary: " + t);
                        }
                    }
                }
                for (const auto& ks : doc.key_signatures)
                    if (ks.measure_index == cur_bar && ks.fifths != eff_fifths) {
                        seq.ids.push_back(vocab.id(tok("KeySig",
                            std::clamp(ks.fifths, -7, 7))));
                        eff_fifths = ks.fifths;
                    }
            }
        }
    };

    for (const auto& n : doc.notes) {
        auto [bar, pos] = locate(n.onset, &bars, spec, doc.modality);
        enter_bar(bar);
        if (pos >= npos) {
            warn(warnings, "position clamped");
            pos = npos - 1;
        }
        seq.ids.push_back(vocab.id(tok("Position", pos)));
        if (perf) {
            seq.ids.push_back(vocab.id(
                tok("Velocity", spec.velocity_bin(n.velocity.value_or(64)))));
        } else {
            int voice = std::clamp(n.voice.value_or(1), 1, spec.max_voice);
            if (n.voice.value_or(1) > spec.max_voice) warn(warnings, "voice clamped");
            seq.ids.push_back(vocab.id(tok("Voice", voice)));
        }
        seq.ids.push_back(vocab.id(tok("Pitch", n.pitch)));
        seq.ids.push_back(vocab.id(
            tok("Duration", QuantSpec::nearest_bin(durs, n.duration))));
    }
    seq.ids.push_back(Vocabulary::kEos);
    return seq;
}

TokenSequence tokenize_cpword(const PieceDoc& doc, const Vocabulary& vocab,
                              std::vector<std::string>* warnings) {
    const QuantSpec& spec = vocab.spec;
    const bool perf = doc.modality == Modality::performance;
    TokenSequence seq;
    seq.scheme = Scheme::CPWord;
    seq.modality = doc.modality;

    const auto& durs = duration_grid(vocab);
    const int npos = max_positions(spec, doc.modality);
    ScoreBars bars(doc.time_signatures, spec);

    const int32_t ig_bar = vocab.id("BarFlag_Ignore");
    const int32_t ig_pos = vocab.id("Position_Ignore");
    const int32_t ig_pitch = vocab.id("Pitch_Ignore");
    const int32_t ig_vv = vocab.id("VelVoice_Ignore");
    const int32_t ig_dur = vocab.id("Duration_Ignore");
    auto blank = [&](int32_t type) {
        return CpTuple{type, ig_bar, ig_pos, ig_pitch, ig_vv, ig_dur};
    };

    seq.tuples.push_back(blank(vocab.id("Type_BOS")));

    int cur_bar = -1, cur_pos = -1;
    auto enter_bar = [&](int target) {
        while (cur_bar < target) {
            ++cur_bar;
            CpTuple t = blank(vocab.id("Type_Metric"));
            t[kCpBarFlag] = vocab.id("BarFlag_New");
            if (!perf) {
                // Bar tuples carry the measure length in the duration slot
                // so decoding can rebuild bar start times.
                const auto sig = bars.sig_at(cur_bar);
                t[kCpDuration] = vocab.id(tok("Duration",
                    QuantSpec::nearest_bin(durs, sig.beats_per_measure())));
            }
            seq.tuples.push_back(t);
            cur_pos = -1;
        }
    };

    for (const auto& n : doc.notes) {
        auto [bar, pos] = locate(n.onset, &bars, spec, doc.modality);
        enter_bar(bar);
        if (pos >= npos) {
            warn(warnings, "position clamped");
            pos = npos - 1;
        }
        if (pos != cur_pos) {
            CpTuple t = blank(vocab.id("Type_Metric"));
            t[kCpPosition] = vocab.id(tok("Position", pos));
            seq.tuples.push_back(t);
            cur_pos = pos;
        }
        CpTuple t = blank(vocab.id("Type_Note"));
        t[kCpPitch] = vocab.id(tok("Pitch", n.pitch));
        t[kCpVelVoice] =
            perf ? vocab.id(tok("Velocity", spec.velocity_bin(n.velocity.value_or(64))))
                 : vocab.id(tok("Voice",
                                std::clamp(n.voice.value_or(1), 1, spec.max_voice)));
        t[kCpDuration] =
            vocab.id(tok("Duration", QuantSpec::nearest_bin(durs, n.duration)));
        seq.tuples.push_back(t);
    }

    seq.tuples.push_back(blank(vocab.id("Type_EOS")));
    return seq;
}

}  // namespace

TokenSequence tokenize(const PieceDoc& doc, Scheme scheme,
                       const Vocabulary& vocab,
                       std::vector<std::string>* warnings) {
    if (scheme == Scheme::MIDILike && doc.modality == Modality::score)
        throw UnsupportedCombination("MIDILike is undefined for scores");
    if (vocab.scheme != scheme || vocab.modality != doc.modality)
        throw Error("vocabulary does not match scheme/modality");

    switch (scheme) {
        case Scheme::MIDILike: return tokenize_midilike(doc, vocab, warnings);
        case Scheme::REMI: return tokenize_remi(doc, vocab, warnings);
        case Scheme::CPWord: return tokenize_cpword(doc, vocab, warnings);
    }
    throw Error("unreachable");
}

// ---------------------------------------------------------------------------
// detokenize

namespace {

// Splits "Prefix_value" on the last underscore.
int suffix_int(const std::string& token) {
    auto p = token.rfind('_');
    return std::stoi(token.substr(p + 1));
}

PieceDoc detokenize_midilike(const TokenSequence& seq, const Vocabulary& vocab) {
    const QuantSpec& spec = vocab.spec;
    PieceDoc doc;
    doc.modality = Modality::performance;

    double cur = 0.0;
    int cur_vel = 64;
    std::unordered_map<int, std::vector<std::pair<double, int>>> open;  // pitch -> FIFO

    for (std::size_t i = 0; i < seq.ids.size(); ++i) {
        const int32_t id = seq.ids[i];
        if (id == Vocabulary::kBos || id == Vocabulary::kEos ||
            id == Vocabulary::kPad)
            continue;
        const std::string& t = vocab.token(id);
        if (t.rfind("TimeShift_", 0) == 0) {
            cur += spec.timeshift_values[suffix_int(t)];
        } else if (t.rfind("Velocity_", 0) == 0) {
            cur_vel = spec.velocity_from_bin(suffix_int(t));
        } else if (t.rfind("NoteOn_", 0) == 0) {
            open[suffix_int(t)].push_back({cur, cur_vel});
        } else if (t.rfind("NoteOff_", 0) == 0) {
            const int pitch = suffix_int(t);
            auto& q = open[pitch];
            if (q.empty()) throw DecodeError("NoteOff without NoteOn", i);
            auto [on, vel] = q.front();
            q.erase(q.begin());
            NoteEvent n;
            n.pitch = pitch;
            n.onset = on;
            n.duration = std::max(cur - on, spec.timeshift_values.front());
            n.velocity = vel;
            doc.notes.push_back(n);
        } else {
            throw DecodeError("unexpected token " + t, i);
        }
    }
    for (const auto& [pitch, q] : open)
        if (!q.empty())
            throw DecodeError("NoteOn without NoteOff, pitch " +
                                  std::to_string(pitch),
                              seq.ids.size() - 1);
    return doc;
}

PieceDoc detokenize_remi(const TokenSequence& seq, const Vocabulary& vocab) {
    const QuantSpec& spec = vocab.spec;
    const bool perf = vocab.modality == Modality::performance;
    PieceDoc doc;
    doc.modality = vocab.modality;

    const auto& durs = duration_grid(vocab);
    const double grid = perf ? spec.perf_bar_seconds / spec.perf_positions_per_bar
                             : 1.0 / spec.positions_per_beat;
    double bar_start = 0.0;
    double bar_len = perf ? spec.perf_bar_seconds
                          : TimeSignature{0, 4, 4}.beats_per_measure();
    int bars_seen = 0;
    double pos = 0.0;
    bool have_pos = false;
    int cur_vel = 64;
    int cur_voice = 1;
    std::optional<int> pending_pitch;
    std::optional<std::size_t> pending_at;

    for (std::size_t i = 0; i < seq.ids.size(); ++i) {
        const int32_t id = seq.ids[i];
        if (id == Vocabulary::kBos || id == Vocabulary::kEos ||
            id == Vocabulary::kPad)
            continue;
        const std::string& t = vocab.token(id);
        if (pending_pitch && t.rfind("Duration_", 0) != 0)
            throw DecodeError("Pitch not followed by Duration", i);

        if (t == "Bar") {
            if (bars_seen > 0) bar_start += bar_len;
            ++bars_seen;
            have_pos = false;
        } else if (t.rfind("TimeSig_", 0) == 0) {
            auto body = t.substr(8);
            auto slash = body.find('/');
            const int num = std::stoi(body.substr(0, slash));
            const int den = std::stoi(body.substr(slash + 1));
            bar_len = TimeSignature{0, num, den}.beats_per_measure();
            if (bars_seen > 0)
                doc.time_signatures.push_back({bars_seen - 1, num, den});
        } else if (t.rfind("KeySig_", 0) == 0) {
            if (bars_seen > 0)
                doc.key_signatures.push_back({bars_seen - 1, suffix_int(t)});
        } else if (t.rfind("Position_", 0) == 0) {
            if (bars_seen == 0) throw DecodeError("Position before Bar", i);
            pos = suffix_int(t) * grid;
            have_pos = true;
        } else if (t.rfind("Velocity_", 0) == 0) {
            cur_vel = spec.velocity_from_bin(suffix_int(t));
        } else if (t.rfind("Voice_", 0) == 0) {
            cur_voice = suffix_int(t);
        } else if (t.rfind("Pitch_", 0) == 0) {
            if (!have_pos) throw DecodeError("Pitch before Position", i);
            pending_pitch = suffix_int(t);
            pending_at = i;
        } else if (t.rfind("Duration_", 0) == 0) {
            if (!pending_pitch) throw DecodeError("Duration without Pitch", i);
            NoteEvent n;
            n.pitch = *pending_pitch;
            n.onset = bar_start + pos;
            n.duration = durs[suffix_int(t)];
            if (perf)
                n.velocity = cur_vel;
            else
                n.voice = cur_voice;
            doc.notes.push_back(n);
            pending_pitch.reset();
        } else {
            throw DecodeError("unexpected token " + t, i);
        }
    }
    if (pending_pitch)
        throw DecodeError("Pitch not followed by Duration",
                          pending_at.value_or(seq.ids.size() - 1));
    return doc;
}

PieceDoc detokenize_cpword(const TokenSequence& seq, const Vocabulary& vocab) {
    const QuantSpec& spec = vocab.spec;
    const bool perf = vocab.modality == Modality::performance;
    PieceDoc doc;
    doc.modality = vocab.modality;

    const auto& durs = duration_grid(vocab);
    const double grid = perf ? spec.perf_bar_seconds / spec.perf_positions_per_bar
                             : 1.0 / spec.positions_per_beat;
    double bar_start = 0.0;
    double bar_len = perf ? spec.perf_bar_seconds : 4.0;
    int bars_seen = 0;
    double pos = 0.0;
    bool have_pos = false;

    for (std::size_t i = 0; i < seq.tuples.size(); ++i) {
        const auto& tp = seq.tuples[i];
        const std::string& type = vocab.token(tp[kCpType]);
        if (type == "Type_BOS" || type == "Type_EOS") continue;
        if (type == "Type_Metric") {
            if (vocab.token(tp[kCpBarFlag]) == "BarFlag_New") {
                if (bars_seen > 0) bar_start += bar_len;
                ++bars_seen;
                have_pos = false;
                const std::string& d = vocab.token(tp[kCpDuration]);
                if (d != "Duration_Ignore") bar_len = durs[suffix_int(d)];
            }
            const std::string& p = vocab.token(tp[kCpPosition]);
            if (p != "Position_Ignore") {
                if (bars_seen == 0) throw DecodeError("Position before Bar", i);
                pos = suffix_int(p) * grid;
                have_pos = true;
            }
        } else if (type == "Type_Note") {
            if (!have_pos) throw DecodeError("Note before Position", i);
            const std::string& pt = vocab.token(tp[kCpPitch]);
            const std::string& dt = vocab.token(tp[kCpDuration]);
            if (pt == "Pitch_Ignore" || dt == "Duration_Ignore")
                throw DecodeError("note tuple with ignored pitch/duration", i);
            NoteEvent n;
            n.pitch = suffix_int(pt);
            n.onset = bar_start + pos;
            n.duration = durs[suffix_int(dt)];
            const std::string& vv = vocab.token(tp[kCpVelVoice]);
            if (perf)
                n.velocity = vv == "VelVoice_Ignore"
                                 ? 64
                                 : spec.velocity_from_bin(suffix_int(vv));
            else
                n.voice = vv == "VelVoice_Ignore" ? 1 : suffix_int(vv);
            doc.notes.push_back(n);
        } else {
            throw DecodeError("unexpected tuple type " + type, i);
        }
    }
    return doc;
}

}  // namespace

PieceDoc detokenize(const TokenSequence& seq, const Vocabulary& vocab) {
    PieceDoc doc;
    switch (seq.scheme) {
        case Scheme::MIDILike: doc = detokenize_midilike(seq, vocab); break;
        case Scheme::REMI: doc = detokenize_remi(seq, vocab); break;
        case Scheme::CPWord: doc = detokenize_cpword(seq, vocab); break;
    }
    if (!doc.notes.empty()) doc = canonicalize(std::move(doc));
    return doc;
}

}  // namespace symr
