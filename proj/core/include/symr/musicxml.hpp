#ifndef SYMR_MUSICXML_HPP
#define SYMR_MUSICXML_HPP

#include <string>
#include <vector>

#include "symr/piece.hpp"

namespace symr {

/// Parses uncompressed partwise MusicXML into a score PieceDoc with
/// beat-based timing (quarter note = 1.0). All parts are merged into a
/// single note stream; part and staff are kept as note attributes.
/// Tied note chains become one note. Non-fatal issues (overfull voices,
/// stray tie stops) go to `warnings`.
PieceDoc parse_musicxml(const std::string& text,
                        std::vector<std::string>* warnings = nullptr);

/// Reads .xml/.musicxml directly, or .mxl by inflating the container
/// and reading its rootfile.
PieceDoc parse_musicxml_file(const std::string& path,
                             std::vector<std::string>* warnings = nullptr);

/// Extracts the rootfile XML from a compressed .mxl container.
std::string mxl_rootfile(const std::string& path);

}  // namespace symr

#endif
