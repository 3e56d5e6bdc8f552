#pragma once

#include <string>

#include "prover/term.hpp"

namespace prover {

// A named, closed statement. `theory` groups theorems into namespaces; every
// variable in `statement` is prefixed with "<theory>_". `index` is the
// position within the generated corpus file.
struct Theorem {
    std::string name;
    Term statement;
    std::string theory;
    int index = 0;
};

}  // namespace prover
