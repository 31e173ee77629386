#pragma once

#include <stdexcept>
#include <string>

#include "strm/rational.hpp"

namespace strm {

struct SourcePos {
    int line = 0;   // 1-based; 0 means "no source position" (synthesized decls)
    int col = 0;
};

// User-facing error in a spec: syntax, name resolution, typing, or a pass
// refusing to transform. Carries a position when one is known.
struct SpecError : std::runtime_error {
    SourcePos pos;

    explicit SpecError(const std::string& msg) : std::runtime_error(msg) {}
    SpecError(SourcePos p, const std::string& msg)
        : std::runtime_error(p.line > 0 ? std::to_string(p.line) + ":" + std::to_string(p.col) + ": " + msg
                                        : msg),
          pos(p) {}
};

struct ParseError : SpecError {
    using SpecError::SpecError;
};

// Arithmetic fault during evaluation (or during constant folding, which uses
// the same operations): integer division by zero, Int64 overflow, and the like.
struct EvalFault : std::runtime_error {
    std::string where;   // stream/trigger name when known
    Rational time;       // evaluation instant when known
    bool has_time = false;

    explicit EvalFault(const std::string& msg) : std::runtime_error(msg) {}
    EvalFault(const std::string& msg, std::string where_, Rational t)
        : std::runtime_error(msg + " (in " + where_ + " at t=" + t.str() + ")"),
          where(std::move(where_)),
          time(t),
          has_time(true) {}
};

}  // namespace strm
