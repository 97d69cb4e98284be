#include "symr/musicxml.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace symr {

namespace {

using boost::property_tree::ptree;

int step_to_semitone(const std::string& step) {
    switch (step.empty() ? '?' : step[0]) {
        case 'C': return 0;
        case 'D': return 2;
        case 'E': return 4;
        case 'F': return 5;
        case 'G': return 7;
        case 'A': return 9;
        case 'B': return 11;
    }
    throw ParseError("bad pitch step: " + step);
}

// pp..ff marks onto the fixed 0-7 ordinal scheme.
std::optional<int> dynamic_ordinal(const std::string& mark) {
    static const std::map<std::string, int> table = {
        {"pppp", 0}, {"ppp", 0}, {"pp", 1}, {"p", 2},  {"mp", 3},
        {"mf", 4},   {"f", 5},   {"ff", 6}, {"fff", 7}, {"ffff", 7},
        {"sf", 5},   {"sfz", 5}, {"fp", 5},
    };
    auto it = table.find(mark);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

struct GraceNote {
    NoteEvent note;
    int voice;
};

}  // namespace

PieceDoc parse_musicxml(const std::string& text,
                        std::vector<std::string>* warnings) {
    ptree pt;
    try {
        std::istringstream ss(text);
        boost::property_tree::read_xml(
            ss, pt, boost::property_tree::xml_parser::trim_whitespace);
    } catch (const boost::property_tree::xml_parser_error& e) {
        throw ParseError("malformed XML: " + e.message(),
                         static_cast<long>(e.line()));
    }

    if (pt.find("score-timewise") != pt.not_found())
        throw UnsupportedFormat("score-timewise documents are not supported");
    auto root = pt.get_child_optional("score-partwise");
    if (!root) throw ParseError("root element is not score-partwise");

    PieceDoc doc;
    doc.modality = Modality::score;
    int max_divisions = 1;

    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };

    int part_index = -1;
    for (const auto& [pname, pnode] : *root) {
        if (pname != "part") continue;
        ++part_index;

        int divisions = 0;
        double measure_start = 0.0;  // beats
        int num = 4, den = 4;
        int measure_index = -1;
        // Tie chains still open, keyed by (voice, pitch) -> note index.
        std::map<std::pair<int, int>, std::size_t> open_ties;
        std::optional<int> cur_dynamic;

        for (const auto& [mname, mnode] : pnode) {
            if (mname != "measure") continue;
            ++measure_index;

            int64_t pos = 0;       // divisions within the measure
            int64_t max_pos = 0;
            int64_t prev_onset = 0;  // onset of the previous non-chord note
            std::vector<GraceNote> grace_buf;
            std::map<int, int64_t> voice_filled;  // voice -> summed durations

            auto flush_graces = [&](int voice, int64_t anchor_pos) {
                for (auto& g : grace_buf) {
                    if (g.voice != voice) continue;
                    g.note.onset = measure_start +
                                   static_cast<double>(anchor_pos) / divisions;
                    g.note.duration = 1.0 / divisions;
                    g.note.measure_index = measure_index;
                    doc.notes.push_back(g.note);
                }
                std::erase_if(grace_buf,
                              [&](const GraceNote& g) { return g.voice == voice; });
            };

            for (const auto& [ename, e] : mnode) {
                if (ename == "attributes") {
                    if (auto d = e.get_optional<int>("divisions")) {
                        divisions = *d;
                        max_divisions = std::max(max_divisions, divisions);
                    }
                    if (auto f = e.get_optional<int>("key.fifths")) {
                        if (part_index == 0)
                            doc.key_signatures.push_back({measure_index, *f});
                    }
                    if (auto b = e.get_optional<int>("time.beats")) {
                        num = *b;
                        den = e.get<int>("time.beat-type", 4);
                        if (part_index == 0)
                            doc.time_signatures.push_back({measure_index, num, den});
                    }
                } else if (ename == "direction") {
                    if (auto dyn = e.get_child_optional("direction-type.dynamics"))
                        for (const auto& [dname, _] : *dyn)
                            if (auto ord = dynamic_ordinal(dname)) cur_dynamic = ord;
                } else if (ename == "backup") {
                    pos -= e.get<int64_t>("duration", 0);
                    if (pos < 0) {
                        warn("backup before measure start, measure " +
                             std::to_string(measure_index));
                        pos = 0;
                    }
                } else if (ename == "forward") {
                    pos += e.get<int64_t>("duration", 0);
                    max_pos = std::max(max_pos, pos);
                } else if (ename == "note") {
                    const bool is_grace = e.find("grace") != e.not_found();
                    const bool is_chord = e.find("chord") != e.not_found();
                    const bool is_rest = e.find("rest") != e.not_found();
                    const int voice = e.get<int>("voice", 1);
                    const int64_t dur = e.get<int64_t>("duration", 0);

                    if (is_rest) {
                        if (divisions <= 0)
                            throw ParseError("no divisions before first timed note");
                        pos += dur;
                        max_pos = std::max(max_pos, pos);
                        voice_filled[voice] += dur;
                        continue;
                    }

                    auto pnodep = e.get_child_optional("pitch");
                    if (!pnodep) {
                        warn("unpitched note skipped, measure " +
                             std::to_string(measure_index));
                        if (!is_grace && !is_chord) pos += dur;
                        continue;
                    }
                    if (divisions <= 0)
                        throw ParseError("no divisions before first timed note");

                    NoteEvent n;
                    const int step = step_to_semitone(pnodep->get<std::string>("step"));
                    const int alter = pnodep->get<int>("alter", 0);
                    const int octave = pnodep->get<int>("octave");
                    n.pitch = std::clamp((octave + 1) * 12 + step + alter, 0, 127);
                    n.voice = voice;
                    n.part = part_index;
                    if (auto st = e.get_optional<int>("staff")) n.staff = *st;
                    n.measure_index = measure_index;
                    n.dynamic_level = cur_dynamic;
                    if (auto art = e.get_child_optional("notations.articulations")) {
                        for (const auto& [aname, _] : *art) {
                            if (aname == "staccato" || aname == "staccatissimo")
                                n.articulations |= kStaccato;
                            else if (aname == "accent" || aname == "strong-accent")
                                n.articulations |= kAccent;
                            else if (aname == "tenuto")
                                n.articulations |= kTenuto;
                        }
                    }
                    if (auto dyn = e.get_child_optional("notations.dynamics"))
                        for (const auto& [dname, _] : *dyn)
                            if (auto ord = dynamic_ordinal(dname)) n.dynamic_level = ord;

                    if (is_grace) {
                        n.grace = true;
                        grace_buf.push_back({n, voice});
                        continue;
                    }

                    const int64_t onset_div = is_chord ? prev_onset : pos;
                    if (!is_chord) {
                        prev_onset = pos;
                        pos += dur;
                        max_pos = std::max(max_pos, pos);
                        voice_filled[voice] += dur;
                        flush_graces(voice, onset_div);
                    }
                    n.onset = measure_start + static_cast<double>(onset_div) / divisions;
                    n.duration = static_cast<double>(dur) / divisions;

                    bool tie_start = false, tie_stop = false;
                    for (const auto& [tname, t] : e) {
                        if (tname == "tie") {
                            auto type = t.get<std::string>("<xmlattr>.type", "");
                            tie_start |= type == "start";
                            tie_stop |= type == "stop";
                        }
                    }

                    const auto key = std::make_pair(voice, n.pitch);
                    if (tie_stop) {
                        auto it = open_ties.find(key);
                        if (it != open_ties.end()) {
                            doc.notes[it->second].duration += n.duration;
                            if (!tie_start) open_ties.erase(it);
                            continue;
                        }
                        warn("tie stop without matching start, measure " +
                             std::to_string(measure_index));
                    }
                    doc.notes.push_back(n);
                    if (tie_start) open_ties[key] = doc.notes.size() - 1;
                }
            }

            // Any graces left anchor at the end of the measure.
            for (auto& g : grace_buf) {
                g.note.onset = measure_start + static_cast<double>(pos) / divisions;
                g.note.duration = 1.0 / divisions;
                g.note.measure_index = measure_index;
                doc.notes.push_back(g.note);
            }

            if (divisions > 0) {
                const double nominal = TimeSignature{0, num, den}.beats_per_measure();
                for (const auto& [v, filled] : voice_filled) {
                    const double beats = static_cast<double>(filled) / divisions;
                    if (beats > nominal + 1e-9)
                        warn("voice " + std::to_string(v) + " overfull in measure " +
                             std::to_string(measure_index) + " of part " +
                             std::to_string(part_index));
                }
                measure_start += static_cast<double>(max_pos) / divisions;
            }
        }
        if (!open_ties.empty())
            warn("unterminated tie chain(s) in part " + std::to_string(part_index));
    }

    if (doc.notes.empty()) throw EmptyPiece();
    doc.quantum = 1.0 / max_divisions;
    return canonicalize(std::move(doc));
}

PieceDoc parse_musicxml_file(const std::string& path,
                             std::vector<std::string>* warnings) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".mxl") {
        auto doc = parse_musicxml(mxl_rootfile(path), warnings);
        return doc;
    }
    std::ifstream f(path);
    if (!f) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_musicxml(ss.str(), warnings);
}

}  // namespace symr
