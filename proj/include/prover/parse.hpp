#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "prover/term.hpp"

namespace prover {

struct ParseError : std::runtime_error {
    ParseError(std::string msg, std::size_t offset, std::vector<std::string> expected);

    std::size_t offset;                 // byte offset into the input
    std::vector<std::string> expected;  // token spellings that would have parsed
};

// Parses the infix grammar
//   term := iff
//   iff  := imp ('<=>' iff)?          right-assoc
//   imp  := or ('==>' imp)?           right-assoc
//   or   := and ('\/' and)*           left-assoc
//   and  := not ('/\' not)*           left-assoc
//   not  := '~' not | atom
//   atom := 'T' | 'F' | ident | '(' term ')'
// with ident = [a-z][a-z0-9_]*. Throws ParseError on malformed input.
Term parse_term(const std::string& input);

}  // namespace prover
