#include "prover/dpll.hpp"

#include <unordered_map>
#include <vector>

namespace prover {

namespace {

// Literals are var+1 (positive) or -(var+1).
struct Cnf {
    int nvars = 0;
    std::vector<std::vector<int>> clauses;
    std::unordered_map<Term, int, TermHash> var_of;  // subterm -> variable

    int fresh() { return nvars++; }

    int var_for(const Term& t) {
        auto it = var_of.find(t);
        if (it != var_of.end()) return it->second;
        int v = fresh();
        var_of.emplace(t, v);
        return v;
    }

    // Returns the literal representing t, emitting defining clauses once per
    // distinct subterm.
    int encode(const Term& t) {
        auto it = var_of.find(t);
        if (it != var_of.end()) return it->second + 1;
        switch (t.kind()) {
            case TermKind::Var:
                return var_for(t) + 1;
            case TermKind::True: {
                int v = var_for(t);
                clauses.push_back({v + 1});
                return v + 1;
            }
            case TermKind::False: {
                int v = var_for(t);
                clauses.push_back({-(v + 1)});
                return v + 1;
            }
            case TermKind::Not: {
                int a = encode(t.left());
                int v = var_for(t) + 1;
                clauses.push_back({-v, -a});
                clauses.push_back({v, a});
                return v;
            }
            case TermKind::And: {
                int a = encode(t.left());
                int b = encode(t.right());
                int v = var_for(t) + 1;
                clauses.push_back({-v, a});
                clauses.push_back({-v, b});
                clauses.push_back({v, -a, -b});
                return v;
            }
            case TermKind::Or: {
                int a = encode(t.left());
                int b = encode(t.right());
                int v = var_for(t) + 1;
                clauses.push_back({-v, a, b});
                clauses.push_back({v, -a});
                clauses.push_back({v, -b});
                return v;
            }
            case TermKind::Imp: {
                int a = encode(t.left());
                int b = encode(t.right());
                int v = var_for(t) + 1;
                clauses.push_back({-v, -a, b});
                clauses.push_back({v, a});
                clauses.push_back({v, -b});
                return v;
            }
            default: {  // Iff
                int a = encode(t.left());
                int b = encode(t.right());
                int v = var_for(t) + 1;
                clauses.push_back({-v, -a, b});
                clauses.push_back({-v, a, -b});
                clauses.push_back({v, a, b});
                clauses.push_back({v, -a, -b});
                return v;
            }
        }
    }
};

struct Solver {
    const std::vector<std::vector<int>>& clauses;
    std::vector<int8_t> assign;  // -1 unassigned / 0 / 1
    long fuel;
    bool fuel_out = false;

    Solver(const Cnf& cnf, long f)
        : clauses(cnf.clauses), assign(cnf.nvars, -1), fuel(f) {}

    // Returns false on conflict (or fuel exhaustion; check fuel_out).
    bool set(int lit, std::vector<int>& trail) {
        int v = lit > 0 ? lit - 1 : -lit - 1;
        int8_t val = lit > 0;
        if (assign[v] != -1) return assign[v] == val;
        if (fuel-- <= 0) {
            fuel_out = true;
            return false;
        }
        assign[v] = val;
        trail.push_back(v);
        return true;
    }

    void undo(std::vector<int>& trail, std::size_t mark) {
        while (trail.size() > mark) {
            assign[trail.back()] = -1;
            trail.pop_back();
        }
    }

    // Exhaustive unit propagation; false on conflict.
    bool propagate(std::vector<int>& trail) {
        bool again = true;
        while (again) {
            again = false;
            for (const auto& cl : clauses) {
                int unassigned = 0;
                int unit = 0;
                bool sat = false;
                for (int lit : cl) {
                    int v = lit > 0 ? lit - 1 : -lit - 1;
                    if (assign[v] == -1) {
                        ++unassigned;
                        unit = lit;
                    } else if (assign[v] == (lit > 0)) {
                        sat = true;
                        break;
                    }
                }
                if (sat) continue;
                if (unassigned == 0) return false;  // falsified clause
                if (unassigned == 1) {
                    if (!set(unit, trail)) return false;
                    again = true;
                }
            }
        }
        return true;
    }

    bool solve(std::vector<int>& trail) {
        std::size_t mark = trail.size();
        if (!propagate(trail)) {
            undo(trail, mark);
            return false;
        }
        int pick = -1;
        for (std::size_t v = 0; v < assign.size(); ++v)
            if (assign[v] == -1) {
                pick = static_cast<int>(v);
                break;
            }
        if (pick == -1) return true;  // no conflict, fully assigned

        for (int8_t val : {int8_t(1), int8_t(0)}) {
            std::size_t mark2 = trail.size();
            if (set(val ? pick + 1 : -(pick + 1), trail) && solve(trail)) return true;
            undo(trail, mark2);
            if (fuel_out) break;
        }
        undo(trail, mark);
        return false;
    }
};

}  // namespace

DpllResult dpll_tautology(const Term& t, long fuel) {
    Cnf cnf;
    int root = cnf.encode(t);
    cnf.clauses.push_back({-root});  // assert ~t, search for a countermodel

    Solver solver(cnf, fuel);
    std::vector<int> trail;
    bool sat = solver.solve(trail);
    if (solver.fuel_out) return DpllResult::FuelOut;
    return sat ? DpllResult::Refuted : DpllResult::Proved;
}

}  // namespace prover
