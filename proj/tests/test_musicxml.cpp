#include "doctest.h"

#include "symr/musicxml.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

using namespace symr;

namespace {

std::string header() {
    return R"(<?xml version="1.0" encoding="UTF-8"?>
<score-partwise version="3.1">
  <part-list><score-part id="P1"><part-name>Piano</part-name></score-part></part-list>
)";
}

std::string note(const std::string& step, int octave, int dur,
                 const std::string& extra = "", int voice = 1) {
    return "<note>" + extra + "<pitch><step>" + step + "</step><octave>" +
           std::to_string(octave) + "</octave></pitch><duration>" +
           std::to_string(dur) + "</duration><voice>" + std::to_string(voice) +
           "</voice></note>";
}

std::string attributes(int divisions) {
    return "<attributes><divisions>" + std::to_string(divisions) +
           "</divisions><key><fifths>0</fifths></key>"
           "<time><beats>4</beats><beat-type>4</beat-type></time></attributes>";
}

}  // namespace

TEST_CASE("single quarter note C4") {
    std::string xml = header() + "<part id=\"P1\"><measure number=\"1\">" +
                      attributes(1) + note("C", 4, 1) +
                      "</measure></part></score-partwise>";
    auto doc = parse_musicxml(xml);
    REQUIRE(doc.notes.size() == 1);
    CHECK(doc.modality == Modality::score);
    CHECK(doc.notes[0].pitch == 60);
    CHECK(doc.notes[0].onset == 0.0);
    CHECK(doc.notes[0].duration == 1.0);
    CHECK(doc.notes[0].voice == 1);
    CHECK(doc.notes[0].measure_index == 0);
    REQUIRE(doc.time_signatures.size() == 1);
    CHECK(doc.time_signatures[0].numerator == 4);
}

TEST_CASE("tied notes across a barline merge") {
    std::string tie_start =
        "<tie type=\"start\"/>";
    std::string tie_stop = "<tie type=\"stop\"/>";
    std::string xml =
        header() + "<part id=\"P1\"><measure number=\"1\">" + attributes(1) +
        note("C", 4, 3) +
        ("<note><pitch><step>C</step><octave>4</octave></pitch><duration>1"
         "</duration><voice>1</voice>" + tie_start + "</note>") +
        "</measure><measure number=\"2\">" +
        ("<note><pitch><step>C</step><octave>4</octave></pitch><duration>2"
         "</duration><voice>1</voice>" + tie_stop + "</note>") +
        "</measure></part></score-partwise>";
    auto doc = parse_musicxml(xml);
    REQUIRE(doc.notes.size() == 2);
    CHECK(doc.notes[1].onset == 3.0);
    CHECK(doc.notes[1].duration == 3.0);  // 1 beat tied to 2 beats
}

TEST_CASE("chord notes share an onset") {
    std::string xml = header() + "<part id=\"P1\"><measure number=\"1\">" +
                      attributes(2) + note("C", 4, 2) +
                      note("E", 4, 2, "<chord/>") + note("G", 4, 2) +
                      "</measure></part></score-partwise>";
    auto doc = parse_musicxml(xml);
    REQUIRE(doc.notes.size() == 3);
    CHECK(doc.notes[0].onset == 0.0);  // C4
    CHECK(doc.notes[1].onset == 0.0);  // E4, chord
    CHECK(doc.notes[0].pitch == 60);
    CHECK(doc.notes[1].pitch == 64);
    CHECK(doc.notes[2].onset == 1.0);  // G4 after the chord
}

TEST_CASE("backup realizes a second voice") {
    std::string xml = header() + "<part id=\"P1\"><measure number=\"1\">" +
                      attributes(1) + note("C", 5, 4, "", 1) +
                      "<backup><duration>4</duration></backup>" +
                      note("C", 3, 4, "", 2) +
                      "</measure></part></score-partwise>";
    auto doc = parse_musicxml(xml);
    REQUIRE(doc.notes.size() == 2);
    CHECK(doc.notes[0].onset == 0.0);
    CHECK(doc.notes[1].onset == 0.0);
    CHECK(doc.notes[0].voice == 2);  // C3 sorts first by pitch
    CHECK(doc.notes[1].voice == 1);
}

TEST_CASE("articulations, dynamics, accidentals") {
    std::string xml =
        header() + "<part id=\"P1\"><measure number=\"1\">" + attributes(1) +
        "<direction><direction-type><dynamics><ff/></dynamics></direction-type></direction>"
        "<note><pitch><step>F</step><alter>1</alter><octave>4</octave></pitch>"
        "<duration>1</duration><voice>1</voice>"
        "<notations><articulations><staccato/><accent/></articulations></notations>"
        "</note></measure></part></score-partwise>";
    auto doc = parse_musicxml(xml);
    REQUIRE(doc.notes.size() == 1);
    CHECK(doc.notes[0].pitch == 66);  // F#4
    CHECK((doc.notes[0].articulations & kStaccato));
    CHECK((doc.notes[0].articulations & kAccent));
    CHECK(!(doc.notes[0].articulations & kTenuto));
    CHECK(doc.notes[0].dynamic_level == 6);  // ff
}

TEST_CASE("grace note anchors to the next principal note") {
    std::string xml = header() + "<part id=\"P1\"><measure number=\"1\">" +
                      attributes(4) +
                      "<note><grace/><pitch><step>D</step><octave>4</octave></pitch>"
                      "<voice>1</voice></note>" +
                      note("C", 4, 4) + "</measure></part></score-partwise>";
    auto doc = parse_musicxml(xml);
    REQUIRE(doc.notes.size() == 2);
    const auto& grace = doc.notes[0].grace ? doc.notes[0] : doc.notes[1];
    CHECK(grace.onset == 0.0);
    CHECK(grace.duration == 0.25);  // one document quantum (divisions=4)
    CHECK(grace.grace);
}

TEST_CASE("score-timewise is rejected") {
    std::string xml =
        "<?xml version=\"1.0\"?><score-timewise></score-timewise>";
    CHECK_THROWS_AS(parse_musicxml(xml), UnsupportedFormat);
}

TEST_CASE("malformed XML throws ParseError") {
    CHECK_THROWS_AS(parse_musicxml("<score-partwise><unclosed>"), ParseError);
}

TEST_CASE("missing divisions throws ParseError") {
    std::string xml = header() + "<part id=\"P1\"><measure number=\"1\">" +
                      note("C", 4, 1) + "</measure></part></score-partwise>";
    CHECK_THROWS_AS(parse_musicxml(xml), ParseError);
}

// ---------------------------------------------------------------------------
// .mxl container

namespace {

void zip_put16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}
void zip_put32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

// Stored (uncompressed) zip with the given members.
std::string make_zip(const std::vector<std::pair<std::string, std::string>>& members) {
    std::string out, central;
    std::vector<uint32_t> offsets;
    for (const auto& [name, data] : members) {
        offsets.push_back(static_cast<uint32_t>(out.size()));
        const auto crc = static_cast<uint32_t>(
            crc32(0, reinterpret_cast<const Bytef*>(data.data()),
                  static_cast<uInt>(data.size())));
        zip_put32(out, 0x04034b50);
        zip_put16(out, 20);  // version needed
        zip_put16(out, 0);   // flags
        zip_put16(out, 0);   // method: stored
        zip_put16(out, 0);   // time
        zip_put16(out, 0);   // date
        zip_put32(out, crc);
        zip_put32(out, static_cast<uint32_t>(data.size()));
        zip_put32(out, static_cast<uint32_t>(data.size()));
        zip_put16(out, static_cast<uint16_t>(name.size()));
        zip_put16(out, 0);  // extra
        out += name;
        out += data;
    }
    const auto cd_off = static_cast<uint32_t>(out.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& [name, data] = members[i];
        const auto crc = static_cast<uint32_t>(
            crc32(0, reinterpret_cast<const Bytef*>(data.data()),
                  static_cast<uInt>(data.size())));
        zip_put32(central, 0x02014b50);
        zip_put16(central, 20);
        zip_put16(central, 20);
        zip_put16(central, 0);
        zip_put16(central, 0);
        zip_put16(central, 0);
        zip_put16(central, 0);
        zip_put32(central, crc);
        zip_put32(central, static_cast<uint32_t>(data.size()));
        zip_put32(central, static_cast<uint32_t>(data.size()));
        zip_put16(central, static_cast<uint16_t>(name.size()));
        zip_put16(central, 0);
        zip_put16(central, 0);
        zip_put16(central, 0);
        zip_put16(central, 0);
        zip_put32(central, 0);
        zip_put32(central, offsets[i]);
        central += name;
    }
    out += central;
    zip_put32(out, 0x06054b50);
    zip_put16(out, 0);
    zip_put16(out, 0);
    zip_put16(out, static_cast<uint16_t>(members.size()));
    zip_put16(out, static_cast<uint16_t>(members.size()));
    zip_put32(out, static_cast<uint32_t>(central.size()));
    zip_put32(out, cd_off);
    zip_put16(out, 0);
    return out;
}

}  // namespace

TEST_CASE("mxl container inflates to the rootfile") {
    std::string score = header() + "<part id=\"P1\"><measure number=\"1\">" +
                        attributes(1) + note("C", 4, 1) +
                        "</measure></part></score-partwise>";
    std::string container =
        R"(<?xml version="1.0"?><container><rootfiles>)"
        R"(<rootfile full-path="score.xml"/></rootfiles></container>)";
    std::string zip =
        make_zip({{"META-INF/container.xml", container}, {"score.xml", score}});

    auto path = std::filesystem::temp_directory_path() / "symr_test_container.mxl";
    {
        std::ofstream f(path, std::ios::binary);
        f << zip;
    }
    auto doc = parse_musicxml_file(path.string());
    REQUIRE(doc.notes.size() == 1);
    CHECK(doc.notes[0].pitch == 60);
    std::filesystem::remove(path);
}
