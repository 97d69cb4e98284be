#ifndef SYMR_ERRORS_HPP
#define SYMR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace symr {

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file. `where` is a byte offset (MIDI) or line number (XML).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long where = -1)
        : Error(where >= 0 ? msg + " (at " + std::to_string(where) + ")" : msg),
          where_(where) {}
    long where() const { return where_; }

private:
    long where_;
};

class UnsupportedFormat : public Error {
public:
    using Error::Error;
};

// Scheme/modality combinations the representations do not define,
// e.g. MIDILike tokenization of a score.
class UnsupportedCombination : public Error {
public:
    using Error::Error;
};

class EmptyPiece : public Error {
public:
    EmptyPiece() : Error("piece contains no notes") {}
};

// Ungrammatical token sequence. `index` is the offending token position.
class DecodeError : public Error {
public:
    DecodeError(const std::string& msg, std::size_t index)
        : Error(msg + " (token " + std::to_string(index) + ")"), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

// Pearson correlation of a constant vector is undefined.
class ZeroVariance : public Error {
public:
    ZeroVariance() : Error("correlation undefined: zero variance") {}
};

}  // namespace symr

#endif
