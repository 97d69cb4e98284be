#include "symr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace symr {

std::string to_string(EdgeType t) {
    switch (t) {
        case EdgeType::onset: return "onset";
        case EdgeType::consecutive: return "consecutive";
        case EdgeType::overlap: return "overlap";
        case EdgeType::silence: return "silence";
        case EdgeType::voice: return "voice";
        case EdgeType::consecutive_inv: return "consecutive_inv";
        case EdgeType::overlap_inv: return "overlap_inv";
    }
    return "onset";
}

namespace {

void sort_dedupe(EdgeList& edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

}  // namespace

NoteGraph build_graph(const PieceDoc& doc, double window_start,
                      double window_length, const GraphConfig& cfg) {
    NoteGraph g;
    g.heterogeneous = cfg.heterogeneous;

    const double w0 = window_start;
    const double w1 = w0 + window_length;
    std::vector<NoteEvent> notes;
    for (const auto& n : doc.notes)
        if (n.onset >= w0 && n.onset < w1) notes.push_back(n);
    g.node_count = static_cast<int>(notes.size());
    for (EdgeType t : kAllEdgeTypes) g.edges[t];  // materialize empty lists

    const bool perf = doc.modality == Modality::performance;
    const double tol = perf ? cfg.t_tol : 0.0;
    const int n = g.node_count;

    auto& onset_edges = g.edges[EdgeType::onset];
    auto& consec_edges = g.edges[EdgeType::consecutive];
    auto& overlap_edges = g.edges[EdgeType::overlap];

    // Notes are in canonical (onset, pitch) order, so a forward scan
    // bounded by the tolerance covers every onset pair.
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dt = notes[j].onset - notes[i].onset;
            if (perf ? dt >= tol : dt > 0.0) break;
            onset_edges.push_back({i, j});
            onset_edges.push_back({j, i});
        }
    }

    // consecutive: off(u) = on(v), with tolerance for performances.
    std::vector<double> onsets(n);
    for (int i = 0; i < n; ++i) onsets[i] = notes[i].onset;
    for (int u = 0; u < n; ++u) {
        const double off = notes[u].offset();
        auto lo = std::lower_bound(onsets.begin(), onsets.end(), off - tol);
        for (auto it = lo; it != onsets.end(); ++it) {
            const double d = *it - off;
            if (perf) {
                if (d >= tol) break;
                if (d <= -tol) continue;
            } else {
                if (d > 0.0) break;
                if (d < 0.0) continue;
            }
            const int v = static_cast<int>(it - onsets.begin());
            if (v != u) consec_edges.push_back({u, v});
        }
    }

    // overlap: on(v) < on(u) < off(v), strict in both modes. Sweep with
    // an active interval list; equal-onset groups enter together.
    {
        std::vector<std::pair<double, int>> active;  // (offset, idx)
        int i = 0;
        while (i < n) {
            int j = i;
            while (j < n && notes[j].onset == notes[i].onset) ++j;
            const double t = notes[i].onset;
            std::erase_if(active, [&](const auto& a) { return a.first <= t; });
            for (const auto& [off, v] : active)
                for (int u = i; u < j; ++u) overlap_edges.push_back({v, u});
            for (int u = i; u < j; ++u) active.push_back({notes[u].offset(), u});
            i = j;
        }
    }

    sort_dedupe(onset_edges);
    sort_dedupe(consec_edges);
    sort_dedupe(overlap_edges);

    if (cfg.include_silence_edges)
        add_silence_edges(g, notes, doc.modality, cfg.t_tol);
    if (cfg.include_voice_edges) {
        if (perf)
            throw UnsupportedCombination("voice edges require a score");
        if (cfg.feature_level == FeatureLevel::advanced)
            add_voice_edges(g, notes, doc.modality);
    }

    if (cfg.inverse_edges) {
        for (auto [src, dst] : consec_edges)
            g.edges[EdgeType::consecutive_inv].push_back({dst, src});
        for (auto [src, dst] : overlap_edges)
            g.edges[EdgeType::overlap_inv].push_back({dst, src});
        sort_dedupe(g.edges[EdgeType::consecutive_inv]);
        sort_dedupe(g.edges[EdgeType::overlap_inv]);
    }

    node_features(doc, notes, cfg.feature_level, window_length, g);
    return g;
}

void add_silence_edges(NoteGraph& graph, const std::vector<NoteEvent>& notes,
                       Modality modality, double t_tol) {
    const int n = static_cast<int>(notes.size());
    const double tol = modality == Modality::performance ? t_tol : 0.0;

    std::vector<bool> has_incoming(n, false);
    for (auto [src, dst] : graph.edges[EdgeType::consecutive])
        has_incoming[dst] = true;

    std::vector<std::pair<double, int>> by_offset;  // (offset, idx)
    for (int i = 0; i < n; ++i) by_offset.push_back({notes[i].offset(), i});
    std::sort(by_offset.begin(), by_offset.end());

    auto& silence = graph.edges[EdgeType::silence];
    for (int v = 0; v < n; ++v) {
        if (has_incoming[v]) continue;
        // Latest offset at or before this onset.
        auto it = std::upper_bound(
            by_offset.begin(), by_offset.end(),
            std::make_pair(notes[v].onset, std::numeric_limits<int>::max()));
        if (it == by_offset.begin()) continue;  // no earlier note
        const double max_off = std::prev(it)->first;
        for (auto r = std::prev(it);; --r) {
            const bool match = modality == Modality::performance
                                   ? max_off - r->first < tol
                                   : r->first == max_off;
            if (!match) break;
            if (r->second != v) silence.push_back({r->second, v});
            if (r == by_offset.begin()) break;
        }
    }
    sort_dedupe(silence);
}

void add_voice_edges(NoteGraph& graph, const std::vector<NoteEvent>& notes,
                     Modality modality) {
    if (modality == Modality::performance)
        throw UnsupportedCombination("voice edges require a score");
    const int n = static_cast<int>(notes.size());
    auto& voice_edges = graph.edges[EdgeType::voice];
    std::map<std::pair<int, int>, std::vector<int>> groups;  // (measure, voice)
    for (int i = 0; i < n; ++i)
        groups[{notes[i].measure_index.value_or(0), notes[i].voice.value_or(1)}]
            .push_back(i);
    for (const auto& [key, idxs] : groups)
        for (size_t a = 0; a < idxs.size(); ++a)
            for (size_t b = a + 1; b < idxs.size(); ++b) {
                voice_edges.push_back({idxs[a], idxs[b]});
                voice_edges.push_back({idxs[b], idxs[a]});
            }
    sort_dedupe(voice_edges);
}

void node_features(const PieceDoc& doc, const std::vector<NoteEvent>& notes,
                   FeatureLevel level, double window_length, NoteGraph& graph) {
    const bool perf = doc.modality == Modality::performance;

    std::vector<std::string> names;
    for (int i = 0; i < 12; ++i) names.push_back("pitch_class_" + std::to_string(i));
    for (int i = 0; i < 10; ++i) names.push_back("octave_" + std::to_string(i));
    names.push_back("duration_norm");
    if (level == FeatureLevel::advanced) {
        if (perf) {
            names.push_back("velocity");
            names.push_back("pedal_sustain");
            names.push_back("pedal_sostenuto");
            names.push_back("pedal_una_corda");
        } else {
            for (int i = 1; i <= 8; ++i) names.push_back("voice_" + std::to_string(i));
            names.push_back("staccato");
            names.push_back("accent");
            names.push_back("tenuto");
            names.push_back("dynamic");
            names.push_back("grace");
        }
    }
    const int k = static_cast<int>(names.size());
    graph.feature_dim = k;
    graph.feature_names = names;
    graph.features.assign(static_cast<size_t>(notes.size()) * k, 0.0);

    auto pedal_active = [&](PedalEvent::Kind kind, double t) {
        for (const auto& p : doc.pedals)
            if (p.kind == kind && p.onset <= t && t < p.offset()) return 1.0;
        return 0.0;
    };

    for (size_t i = 0; i < notes.size(); ++i) {
        const auto& nt = notes[i];
        double* row = &graph.features[i * k];
        row[nt.pitch % 12] = 1.0;
        row[12 + std::min(nt.pitch / 12, 9)] = 1.0;
        row[22] = nt.duration / window_length;
        if (level == FeatureLevel::advanced) {
            if (perf) {
                row[23] = nt.velocity.value_or(64) / 127.0;
                row[24] = pedal_active(PedalEvent::Kind::sustain, nt.onset);
                row[25] = pedal_active(PedalEvent::Kind::sostenuto, nt.onset);
                row[26] = pedal_active(PedalEvent::Kind::una_corda, nt.onset);
            } else {
                row[23 + std::clamp(nt.voice.value_or(1), 1, 8) - 1] = 1.0;
                row[31] = (nt.articulations & kStaccato) ? 1.0 : 0.0;
                row[32] = (nt.articulations & kAccent) ? 1.0 : 0.0;
                row[33] = (nt.articulations & kTenuto) ? 1.0 : 0.0;
                row[34] = nt.dynamic_level.value_or(0) / 7.0;
                row[35] = nt.grace ? 1.0 : 0.0;
            }
        }
    }
}

NoteGraph to_homogeneous(const NoteGraph& graph) {
    NoteGraph out = graph;
    out.heterogeneous = false;
    out.hom_edges.clear();
    for (const auto& [type, list] : graph.edges)
        out.hom_edges.insert(out.hom_edges.end(), list.begin(), list.end());
    sort_dedupe(out.hom_edges);
    return out;
}

std::string graph_to_json(const NoteGraph& graph, const std::string& piece_id,
                          double window_start, double window_length,
                          const GraphConfig& cfg) {
    nlohmann::json j;
    j["piece_id"] = piece_id;
    j["window"] = {{"start", window_start}, {"length", window_length}};
    j["config"] = {{"t_tol", cfg.t_tol},
                   {"inverse_edges", cfg.inverse_edges},
                   {"heterogeneous", cfg.heterogeneous},
                   {"include_silence_edges", cfg.include_silence_edges},
                   {"include_voice_edges", cfg.include_voice_edges},
                   {"feature_level",
                    cfg.feature_level == FeatureLevel::basic ? "basic" : "advanced"}};
    j["num_nodes"] = graph.node_count;
    j["feature_names"] = graph.feature_names;
    j["features"] = nlohmann::json::array();
    for (int i = 0; i < graph.node_count; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < graph.feature_dim; ++c)
            row.push_back(graph.feature(i, c));
        j["features"].push_back(std::move(row));
    }
    j["edges"] = nlohmann::json::object();
    for (const auto& [type, list] : graph.edges) {
        nlohmann::json arr = nlohmann::json::array();
        for (auto [s, d] : list) arr.push_back({s, d});
        j["edges"][to_string(type)] = std::move(arr);
    }
    return j.dump();
}

}  // namespace symr
