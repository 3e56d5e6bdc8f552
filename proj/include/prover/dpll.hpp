#pragma once

#include "prover/term.hpp"

namespace prover {

enum class DpllResult { Proved, Refuted, FuelOut };

// Decides validity of t by refutation: Tseitin-transform ~t to CNF (one aux
// variable per distinct subterm), then DPLL with unit propagation. Every
// variable assignment — decision or propagated — costs one unit of fuel, so
// runtime is an exact deterministic function of the input. Branching is on
// the lowest-numbered unassigned variable, true first.
DpllResult dpll_tautology(const Term& t, long fuel);

}  // namespace prover
