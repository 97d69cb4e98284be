#include "symr/piece.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace symr {

using nlohmann::json;

std::string to_string(Modality m) {
    return m == Modality::performance ? "performance" : "score";
}

Modality modality_from_string(const std::string& s) {
    if (s == "performance") return Modality::performance;
    if (s == "score") return Modality::score;
    throw Error("unknown modality: " + s);
}

double PieceDoc::length() const {
    double end = 0.0;
    for (const auto& n : notes) end = std::max(end, n.offset());
    return end;
}

static double resolve_quantum(const PieceDoc& doc) {
    if (doc.quantum > 0.0) return doc.quantum;
    double q = std::numeric_limits<double>::infinity();
    for (const auto& n : doc.notes)
        if (n.duration > 0.0) q = std::min(q, n.duration);
    if (std::isfinite(q)) return q;
    // No positive duration anywhere: fall back to 1 ms / 1/480 beat.
    return doc.modality == Modality::performance ? 1e-3 : 1.0 / 480.0;
}

PieceDoc canonicalize(PieceDoc doc) {
    if (doc.notes.empty()) throw EmptyPiece();

    const double q = resolve_quantum(doc);
    for (auto& n : doc.notes)
        if (n.duration <= 0.0) n.duration = q;

    std::stable_sort(doc.notes.begin(), doc.notes.end(),
                     [](const NoteEvent& a, const NoteEvent& b) {
                         if (a.onset != b.onset) return a.onset < b.onset;
                         if (a.pitch != b.pitch) return a.pitch < b.pitch;
                         return a.duration > b.duration;
                     });

    auto last = std::unique(doc.notes.begin(), doc.notes.end(),
                            [](const NoteEvent& a, const NoteEvent& b) {
                                return a.pitch == b.pitch && a.onset == b.onset &&
                                       a.duration == b.duration;
                            });
    doc.notes.erase(last, doc.notes.end());

    std::stable_sort(doc.pedals.begin(), doc.pedals.end(),
                     [](const PedalEvent& a, const PedalEvent& b) {
                         return a.onset < b.onset;
                     });
    doc.quantum = q;
    return doc;
}

std::vector<Violation> validate(const PieceDoc& doc) {
    std::vector<Violation> out;
    const bool perf = doc.modality == Modality::performance;
    for (long i = 0; i < static_cast<long>(doc.notes.size()); ++i) {
        const auto& n = doc.notes[i];
        if (n.pitch < 0 || n.pitch > 127)
            out.push_back({"PitchOutOfRange", i, std::to_string(n.pitch)});
        if (!(n.duration > 0.0))
            out.push_back({"NonPositiveDuration", i, std::to_string(n.duration)});
        if (perf) {
            if (!n.velocity)
                out.push_back({"MissingVelocity", i, ""});
            else if (*n.velocity < 1 || *n.velocity > 127)
                out.push_back({"VelocityOutOfRange", i, std::to_string(*n.velocity)});
            if (n.voice) out.push_back({"ModalityFieldMismatch", i, "voice on performance note"});
            if (n.measure_index)
                out.push_back({"ModalityFieldMismatch", i, "measure_index on performance note"});
        } else {
            if (n.velocity) out.push_back({"ModalityFieldMismatch", i, "velocity on score note"});
            if (n.voice && *n.voice < 1)
                out.push_back({"VoiceOutOfRange", i, std::to_string(*n.voice)});
        }
        if (n.dynamic_level && (*n.dynamic_level < 0 || *n.dynamic_level > 7))
            out.push_back({"DynamicOutOfRange", i, std::to_string(*n.dynamic_level)});
        if (i > 0) {
            const auto& p = doc.notes[i - 1];
            if (n.onset < p.onset || (n.onset == p.onset && n.pitch < p.pitch))
                out.push_back({"NotSorted", i, ""});
        }
    }
    if (!perf && !doc.pedals.empty())
        out.push_back({"ModalityFieldMismatch", -1, "pedals on score doc"});
    if (perf && (!doc.time_signatures.empty() || !doc.key_signatures.empty()))
        out.push_back({"ModalityFieldMismatch", -1, "signatures on performance doc"});
    for (long i = 0; i < static_cast<long>(doc.pedals.size()); ++i)
        if (!(doc.pedals[i].duration > 0.0))
            out.push_back({"NonPositivePedalDuration", i, ""});
    return out;
}

static std::string pedal_kind_name(PedalEvent::Kind k) {
    switch (k) {
        case PedalEvent::Kind::sustain: return "sustain";
        case PedalEvent::Kind::sostenuto: return "sostenuto";
        case PedalEvent::Kind::una_corda: return "una_corda";
    }
    return "sustain";
}

static PedalEvent::Kind pedal_kind_from_name(const std::string& s) {
    if (s == "sustain") return PedalEvent::Kind::sustain;
    if (s == "sostenuto") return PedalEvent::Kind::sostenuto;
    if (s == "una_corda") return PedalEvent::Kind::una_corda;
    throw Error("unknown pedal kind: " + s);
}

std::string to_json(const PieceDoc& doc) {
    json j;
    j["modality"] = to_string(doc.modality);
    j["piece_id"] = doc.piece_id;
    j["quantum"] = doc.quantum;
    j["notes"] = json::array();
    for (const auto& n : doc.notes) {
        json jn;
        jn["pitch"] = n.pitch;
        jn["onset"] = n.onset;
        jn["duration"] = n.duration;
        if (n.velocity) jn["velocity"] = *n.velocity;
        if (n.voice) jn["voice"] = *n.voice;
        if (n.measure_index) jn["measure_index"] = *n.measure_index;
        if (n.staff) jn["staff"] = *n.staff;
        if (n.part) jn["part"] = *n.part;
        if (n.articulations) jn["articulation_flags"] = n.articulations;
        if (n.dynamic_level) jn["dynamic_level"] = *n.dynamic_level;
        if (n.grace) jn["grace"] = true;
        j["notes"].push_back(std::move(jn));
    }
    j["pedals"] = json::array();
    for (const auto& p : doc.pedals)
        j["pedals"].push_back({{"kind", pedal_kind_name(p.kind)},
                               {"onset", p.onset},
                               {"duration", p.duration}});
    j["time_signatures"] = json::array();
    for (const auto& t : doc.time_signatures)
        j["time_signatures"].push_back(
            {{"measure_index", t.measure_index},
             {"numerator", t.numerator},
             {"denominator", t.denominator}});
    j["key_signatures"] = json::array();
    for (const auto& k : doc.key_signatures)
        j["key_signatures"].push_back(
            {{"measure_index", k.measure_index}, {"fifths", k.fifths}});
    j["labels"] = doc.labels;
    return j.dump();
}

PieceDoc piece_from_json(const std::string& text) {
    json j = json::parse(text);
    PieceDoc doc;
    doc.modality = modality_from_string(j.at("modality").get<std::string>());
    doc.piece_id = j.value("piece_id", std::string());
    doc.quantum = j.value("quantum", 0.0);
    for (const auto& jn : j.at("notes")) {
        NoteEvent n;
        n.pitch = jn.at("pitch").get<int>();
        n.onset = jn.at("onset").get<double>();
        n.duration = jn.at("duration").get<double>();
        if (jn.contains("velocity")) n.velocity = jn["velocity"].get<int>();
        if (jn.contains("voice")) n.voice = jn["voice"].get<int>();
        if (jn.contains("measure_index")) n.measure_index = jn["measure_index"].get<int>();
        if (jn.contains("staff")) n.staff = jn["staff"].get<int>();
        if (jn.contains("part")) n.part = jn["part"].get<int>();
        if (jn.contains("articulation_flags"))
            n.articulations = static_cast<uint8_t>(jn["articulation_flags"].get<int>());
        if (jn.contains("dynamic_level")) n.dynamic_level = jn["dynamic_level"].get<int>();
        n.grace = jn.value("grace", false);
        doc.notes.push_back(std::move(n));
    }
    for (const auto& jp : j.value("pedals", json::array())) {
        PedalEvent p;
        p.kind = pedal_kind_from_name(jp.at("kind").get<std::string>());
        p.onset = jp.at("onset").get<double>();
        p.duration = jp.at("duration").get<double>();
        doc.pedals.push_back(p);
    }
    for (const auto& jt : j.value("time_signatures", json::array()))
        doc.time_signatures.push_back({jt.at("measure_index").get<int>(),
                                       jt.at("numerator").get<int>(),
                                       jt.at("denominator").get<int>()});
    for (const auto& jk : j.value("key_signatures", json::array()))
        doc.key_signatures.push_back(
            {jk.at("measure_index").get<int>(), jk.at("fifths").get<int>()});
    if (j.contains("labels"))
        doc.labels = j["labels"].get<std::map<std::string, std::string>>();
    return doc;
}

}  // namespace symr
