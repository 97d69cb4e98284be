#include "symr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace symr {

PieceDoc random_performance(std::mt19937_64& rng, int max_notes,
                            double span_seconds) {
    std::uniform_int_distribution<int> n_notes(1, max_notes);
    // 5 ms grid: coincident onsets, abutting offsets and near-tolerance
    // gaps all occur with useful frequency.
    const double grid = 0.005;
    const int slots = static_cast<int>(span_seconds / grid);
    std::uniform_int_distribution<int> slot(0, slots - 1);
    std::uniform_int_distribution<int> dur_slots(2, 300);  // 10 ms .. 1.5 s
    std::uniform_int_distribution<int> pitch(21, 108);
    std::uniform_int_distribution<int> vel(1, 127);

    PieceDoc doc;
    doc.modality = Modality::performance;
    doc.piece_id = "perf_" + std::to_string(rng());
    doc.quantum = grid;
    const int n = n_notes(rng);
    for (int i = 0; i < n; ++i) {
        NoteEvent note;
        note.pitch = pitch(rng);
        note.onset = slot(rng) * grid;
        note.duration = dur_slots(rng) * grid;
        note.velocity = vel(rng);
        doc.notes.push_back(note);
    }
    // Overlapping equal-pitch notes have no unambiguous on/off event
    // encoding (FIFO pairing permutes their durations), so keep pieces
    // free of them.
    std::sort(doc.notes.begin(), doc.notes.end(),
              [](const NoteEvent& a, const NoteEvent& b) {
                  return a.onset < b.onset;
              });
    std::map<int, double> last_off;
    std::erase_if(doc.notes, [&](const NoteEvent& nt) {
        if (nt.onset < last_off[nt.pitch]) return true;
        last_off[nt.pitch] = nt.offset();
        return false;
    });
    if (rng() % 3 == 0) {
        PedalEvent p;
        p.kind = static_cast<PedalEvent::Kind>(rng() % 3);
        p.onset = slot(rng) * grid;
        p.duration = dur_slots(rng) * grid;
        doc.pedals.push_back(p);
    }
    return canonicalize(std::move(doc));
}

PieceDoc random_score(std::mt19937_64& rng, int max_notes, double span_beats) {
    std::uniform_int_distribution<int> n_notes(1, max_notes);
    const double grid = 0.25;  // sixteenth grid in beats
    const int slots = static_cast<int>(span_beats / grid);
    std::uniform_int_distribution<int> slot(0, slots - 1);
    std::uniform_int_distribution<int> dur_slots(1, 16);  // up to 4 beats
    std::uniform_int_distribution<int> pitch(21, 108);
    std::uniform_int_distribution<int> voice(1, 4);

    PieceDoc doc;
    doc.modality = Modality::score;
    doc.piece_id = "score_" + std::to_string(rng());
    doc.quantum = grid;
    doc.time_signatures.push_back({0, 4, 4});
    doc.key_signatures.push_back({0, static_cast<int>(rng() % 15) - 7});
    const int n = n_notes(rng);
    for (int i = 0; i < n; ++i) {
        NoteEvent note;
        note.pitch = pitch(rng);
        note.onset = slot(rng) * grid;
        note.duration = dur_slots(rng) * grid;
        note.voice = voice(rng);
        note.measure_index = static_cast<int>(note.onset / 4.0);
        note.articulations = static_cast<uint8_t>(rng() % 8);
        if (rng() % 2) note.dynamic_level = static_cast<int>(rng() % 8);
        note.grace = rng() % 16 == 0;
        doc.notes.push_back(note);
    }
    return canonicalize(std::move(doc));
}

NoteGraph build_graph_oracle(const PieceDoc& doc, double window_start,
                             double window_length, const GraphConfig& cfg) {
    NoteGraph g;
    g.heterogeneous = cfg.heterogeneous;

    const double w0 = window_start;
    const double w1 = w0 + window_length;
    std::vector<NoteEvent> notes;
    for (const auto& nt : doc.notes)
        if (nt.onset >= w0 && nt.onset < w1) notes.push_back(nt);
    const int n = static_cast<int>(notes.size());
    g.node_count = n;
    for (EdgeType t : kAllEdgeTypes) g.edges[t];

    const bool perf = doc.modality == Modality::performance;
    const double tol = cfg.t_tol;

    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            const bool onset_edge =
                perf ? std::fabs(notes[u].onset - notes[v].onset) < tol
                     : notes[u].onset == notes[v].onset;
            if (onset_edge) g.edges[EdgeType::onset].push_back({u, v});
            const bool consec =
                perf ? std::fabs(notes[u].offset() - notes[v].onset) < tol
                     : notes[u].offset() == notes[v].onset;
            if (consec) g.edges[EdgeType::consecutive].push_back({u, v});
            // containment: onset of u strictly inside v's span => v -> u
            if (notes[v].onset < notes[u].onset &&
                notes[u].onset < notes[v].offset())
                g.edges[EdgeType::overlap].push_back({v, u});
        }

    for (EdgeType t : {EdgeType::onset, EdgeType::consecutive, EdgeType::overlap}) {
        auto& e = g.edges[t];
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
    }

    if (cfg.include_silence_edges) {
        std::vector<bool> has_incoming(n, false);
        for (auto [src, dst] : g.edges[EdgeType::consecutive])
            has_incoming[dst] = true;
        auto& silence = g.edges[EdgeType::silence];
        for (int v = 0; v < n; ++v) {
            if (has_incoming[v]) continue;
            double max_off = -1.0;
            for (int u = 0; u < n; ++u)
                if (notes[u].offset() <= notes[v].onset)
                    max_off = std::max(max_off, notes[u].offset());
            if (max_off < 0.0) continue;
            for (int u = 0; u < n; ++u) {
                if (u == v) continue;
                const double off = notes[u].offset();
                if (off > notes[v].onset) continue;
                const bool match = perf ? max_off - off < tol : off == max_off;
                if (match) silence.push_back({u, v});
            }
        }
        std::sort(silence.begin(), silence.end());
        silence.erase(std::unique(silence.begin(), silence.end()), silence.end());
    }

    if (cfg.include_voice_edges) {
        if (perf) throw UnsupportedCombination("voice edges require a score");
        if (cfg.feature_level == FeatureLevel::advanced) {
            auto& ve = g.edges[EdgeType::voice];
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v) {
                    if (u == v) continue;
                    if (notes[u].measure_index.value_or(0) ==
                            notes[v].measure_index.value_or(0) &&
                        notes[u].voice.value_or(1) == notes[v].voice.value_or(1))
                        ve.push_back({u, v});
                }
            std::sort(ve.begin(), ve.end());
            ve.erase(std::unique(ve.begin(), ve.end()), ve.end());
        }
    }

    if (cfg.inverse_edges) {
        for (auto [s, d] : g.edges[EdgeType::consecutive])
            g.edges[EdgeType::consecutive_inv].push_back({d, s});
        for (auto [s, d] : g.edges[EdgeType::overlap])
            g.edges[EdgeType::overlap_inv].push_back({d, s});
        for (EdgeType t : {EdgeType::consecutive_inv, EdgeType::overlap_inv}) {
            auto& e = g.edges[t];
            std::sort(e.begin(), e.end());
            e.erase(std::unique(e.begin(), e.end()), e.end());
        }
    }

    node_features(doc, notes, cfg.feature_level, window_length, g);
    return g;
}

namespace {

bool covered(const NoteEvent& a, const std::vector<NoteEvent>& pool,
             bool is_score, double onset_tol, double duration_tol,
             int velocity_tol) {
    for (const auto& b : pool) {
        if (a.pitch != b.pitch) continue;
        if (std::fabs(a.onset - b.onset) > onset_tol) continue;
        if (std::fabs(a.duration - b.duration) > duration_tol) continue;
        if (!is_score && a.velocity && b.velocity &&
            std::abs(*a.velocity - *b.velocity) > velocity_tol)
            continue;
        if (is_score && a.voice && b.voice && *a.voice != *b.voice) continue;
        return true;
    }
    return false;
}

}  // namespace

bool round_trip_matches(const PieceDoc& original, const PieceDoc& decoded,
                        double onset_tol, double duration_tol,
                        int velocity_tol, std::string* why) {
    const bool is_score = original.modality == Modality::score;
    for (const auto& a : original.notes)
        if (!covered(a, decoded.notes, is_score, onset_tol, duration_tol,
                     velocity_tol)) {
            if (why)
                *why = "original note p=" + std::to_string(a.pitch) + " on=" +
                       std::to_string(a.onset) + " has no decoded match";
            return false;
        }
    for (const auto& b : decoded.notes)
        if (!covered(b, original.notes, is_score, onset_tol, duration_tol,
                     velocity_tol)) {
            if (why)
                *why = "decoded note p=" + std::to_string(b.pitch) + " on=" +
                       std::to_string(b.onset) + " has no original match";
            return false;
        }
    return true;
}

}  // namespace symr
