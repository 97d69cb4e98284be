#include "symr/midi.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>

namespace symr {

double ticks_to_seconds(int64_t tick, const TempoMap& map) {
    const int64_t tpq = map.ticks_per_quarter;
    // Accumulate nanosecond numerator with denominator tpq, divide once.
    __int128 num = 0;
    int64_t cur_tick = 0;
    int64_t cur_uspq = 500000;
    std::size_t i = 0;
    if (!map.entries.empty() && map.entries[0].tick == 0) {
        cur_uspq = map.entries[0].microseconds_per_quarter;
        i = 1;
    }
    while (i < map.entries.size() && map.entries[i].tick < tick) {
        num += static_cast<__int128>(map.entries[i].tick - cur_tick) * cur_uspq * 1000;
        cur_tick = map.entries[i].tick;
        cur_uspq = map.entries[i].microseconds_per_quarter;
        ++i;
    }
    num += static_cast<__int128>(tick - cur_tick) * cur_uspq * 1000;
    const __int128 ns = (num + tpq / 2) / tpq;  // round to nearest ns
    return static_cast<double>(static_cast<int64_t>(ns)) * 1e-9;
}

namespace {

struct Reader {
    std::span<const uint8_t> data;
    std::size_t pos = 0;

    bool eof() const { return pos >= data.size(); }
    std::size_t remaining() const { return data.size() - pos; }

    uint8_t u8() {
        if (eof()) throw ParseError("unexpected end of file", static_cast<long>(pos));
        return data[pos++];
    }
    uint8_t peek() const {
        if (eof()) throw ParseError("unexpected end of file", static_cast<long>(pos));
        return data[pos];
    }
    uint16_t u16() { return static_cast<uint16_t>(u8() << 8 | u8()); }
    uint32_t u32() {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | u8();
        return v;
    }
    uint32_t varlen() {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            uint8_t b = u8();
            v = v << 7 | (b & 0x7f);
            if (!(b & 0x80)) return v;
        }
        throw ParseError("variable-length quantity too long", static_cast<long>(pos));
    }
    void skip(std::size_t n) {
        if (remaining() < n) throw ParseError("chunk overruns file", static_cast<long>(pos));
        pos += n;
    }
    bool expect_tag(const char* tag) {
        if (remaining() < 4) return false;
        bool ok = std::equal(tag, tag + 4, data.begin() + pos);
        pos += 4;
        return ok;
    }
};

enum class EvKind { note_on, note_off, control };

struct Event {
    int64_t tick;
    int seq;  // merge-stable ordering
    EvKind kind;
    int channel;
    int a;  // pitch or controller number
    int b;  // velocity or controller value
};

}  // namespace

PieceDoc parse_smf(std::span<const uint8_t> bytes,
                   std::vector<std::string>* warnings) {
    Reader r{bytes};
    if (!r.expect_tag("MThd")) throw ParseError("missing MThd header", 0);
    uint32_t hlen = r.u32();
    if (hlen < 6) throw ParseError("bad header length", static_cast<long>(r.pos));
    uint16_t format = r.u16();
    uint16_t ntracks = r.u16();
    uint16_t division = r.u16();
    r.skip(hlen - 6);
    if (format > 1) throw UnsupportedFormat("SMF format " + std::to_string(format));
    if (division & 0x8000) throw UnsupportedFormat("SMPTE timing not supported");
    if (division == 0) throw ParseError("zero ticks per quarter", 8);

    TempoMap tempo;
    tempo.ticks_per_quarter = division;
    std::vector<Event> events;
    int seq = 0;
    int64_t max_tick = 0;

    for (int t = 0; t < ntracks && !r.eof(); ++t) {
        if (!r.expect_tag("MTrk"))
            throw ParseError("missing MTrk chunk", static_cast<long>(r.pos - 4));
        uint32_t tlen = r.u32();
        std::size_t track_end = r.pos + tlen;
        if (track_end > bytes.size())
            throw ParseError("track length overruns file", static_cast<long>(r.pos));

        int64_t tick = 0;
        uint8_t running = 0;
        std::vector<std::size_t> open;  // indices into events of unclosed note-ons
        while (r.pos < track_end) {
            tick += r.varlen();
            uint8_t status = r.peek();
            if (status & 0x80) {
                r.u8();
                if (status < 0xf0) running = status;
            } else {
                if (!(running & 0x80))
                    throw ParseError("data byte without running status",
                                     static_cast<long>(r.pos));
                status = running;
            }

            if (status == 0xff) {
                uint8_t type = r.u8();
                uint32_t len = r.varlen();
                if (type == 0x51 && len == 3) {
                    int64_t uspq = (int64_t)r.u8() << 16 | (int64_t)r.u8() << 8 | r.u8();
                    tempo.entries.push_back({tick, uspq});
                } else {
                    r.skip(len);
                }
            } else if (status == 0xf0 || status == 0xf7) {
                r.skip(r.varlen());
            } else {
                int chan = status & 0x0f;
                switch (status & 0xf0) {
                    case 0x80: {
                        int p = r.u8(), v = r.u8();
                        (void)v;
                        events.push_back({tick, seq++, EvKind::note_off, chan, p, 0});
                        break;
                    }
                    case 0x90: {
                        int p = r.u8(), v = r.u8();
                        events.push_back({tick, seq++,
                                          v == 0 ? EvKind::note_off : EvKind::note_on,
                                          chan, p, v});
                        break;
                    }
                    case 0xb0: {
                        int cc = r.u8(), val = r.u8();
                        if (cc == 64 || cc == 66 || cc == 67)
                            events.push_back({tick, seq++, EvKind::control, chan, cc, val});
                        break;
                    }
                    case 0xa0:
                    case 0xe0:
                        r.skip(2);
                        break;
                    case 0xc0:
                    case 0xd0:
                        r.skip(1);
                        break;
                    default:
                        throw ParseError("unexpected status byte",
                                         static_cast<long>(r.pos));
                }
            }
        }
        max_tick = std::max(max_tick, tick);
        (void)open;
    }

    std::sort(tempo.entries.begin(), tempo.entries.end(),
              [](const TempoMap::Entry& a, const TempoMap::Entry& b) {
                  return a.tick < b.tick;
              });
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) {
                         if (a.tick != b.tick) return a.tick < b.tick;
                         return a.seq < b.seq;
                     });

    PieceDoc doc;
    doc.modality = Modality::performance;

    // FIFO note pairing per (channel, pitch) on the merged stream.
    std::map<std::pair<int, int>, std::deque<std::pair<int64_t, int>>> pending;
    // Pedal run state per controller number.
    std::map<int, std::optional<int64_t>> pedal_down;
    auto pedal_kind = [](int cc) {
        if (cc == 64) return PedalEvent::Kind::sustain;
        if (cc == 66) return PedalEvent::Kind::sostenuto;
        return PedalEvent::Kind::una_corda;
    };

    for (const auto& ev : events) {
        switch (ev.kind) {
            case EvKind::note_on:
                pending[{ev.channel, ev.a}].push_back({ev.tick, ev.b});
                break;
            case EvKind::note_off: {
                auto& q = pending[{ev.channel, ev.a}];
                if (q.empty()) {
                    if (warnings)
                        warnings->push_back("note-off without note-on, pitch " +
                                            std::to_string(ev.a));
                    break;
                }
                auto [on_tick, vel] = q.front();
                q.pop_front();
                NoteEvent n;
                n.pitch = ev.a;
                n.onset = ticks_to_seconds(on_tick, tempo);
                n.duration = ticks_to_seconds(ev.tick, tempo) - n.onset;
                n.velocity = vel;
                doc.notes.push_back(n);
                break;
            }
            case EvKind::control: {
                auto& down = pedal_down[ev.a];
                if (ev.b >= 64) {
                    if (!down) down = ev.tick;
                } else if (down) {
                    PedalEvent p;
                    p.kind = pedal_kind(ev.a);
                    p.onset = ticks_to_seconds(*down, tempo);
                    p.duration = ticks_to_seconds(ev.tick, tempo) - p.onset;
                    if (p.duration > 0) doc.pedals.push_back(p);
                    down.reset();
                }
                break;
            }
        }
    }

    // Close anything still open at end of track.
    for (auto& [key, q] : pending) {
        while (!q.empty()) {
            auto [on_tick, vel] = q.front();
            q.pop_front();
            NoteEvent n;
            n.pitch = key.second;
            n.onset = ticks_to_seconds(on_tick, tempo);
            n.duration = ticks_to_seconds(max_tick, tempo) - n.onset;
            n.velocity = vel;
            doc.notes.push_back(n);
            if (warnings)
                warnings->push_back("dangling note-on closed at track end, pitch " +
                                    std::to_string(key.second));
        }
    }
    for (auto& [cc, down] : pedal_down) {
        if (down) {
            PedalEvent p;
            p.kind = pedal_kind(cc);
            p.onset = ticks_to_seconds(*down, tempo);
            p.duration = ticks_to_seconds(max_tick, tempo) - p.onset;
            if (p.duration > 0) doc.pedals.push_back(p);
        }
    }

    if (doc.notes.empty()) throw EmptyPiece();

    // One tick at the fastest tempo present.
    int64_t min_uspq = 500000;
    for (const auto& e : tempo.entries)
        min_uspq = std::min(min_uspq, e.microseconds_per_quarter);
    doc.quantum = static_cast<double>(min_uspq) * 1e-6 / division;

    return canonicalize(std::move(doc));
}

PieceDoc parse_smf_file(const std::string& path,
                        std::vector<std::string>* warnings) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    return parse_smf(bytes, warnings);
}

}  // namespace symr
