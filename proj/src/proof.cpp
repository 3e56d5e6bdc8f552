#include "prover/proof.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "prover/parse.hpp"

namespace prover {

namespace {

std::string tactic_line(const ProofNode& node) {
    std::string s = tactic_name(node.tactic);
    switch (arg_kind(node.tactic)) {
        case ArgKind::None:
            break;
        case ArgKind::SingleTerm:
            s += " [" + (node.term_arg ? node.term_arg->to_string() : "") + "]";
            break;
        default: {
            s += " [";
            for (std::size_t i = 0; i < node.theorem_args.size(); ++i) {
                if (i) s += ", ";
                s += node.theorem_args[i];
            }
            s += "]";
        }
    }
    return s;
}

void emit(const ProofNode& node, int depth, std::string& out) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    out += pad + tactic_line(node) + "\n";
    if (node.children.size() == 1) {
        emit(node.children[0], depth, out);
    } else if (node.children.size() >= 2) {
        for (const ProofNode& c : node.children) {
            out += pad + ">- (\n";
            emit(c, depth + 1, out);
            out += pad + ")\n";
        }
    }
}

}  // namespace

std::string ProofScript::to_text() const {
    std::string out = "Theorem " + theorem_name + ": " + statement.to_string() + "\n";
    out += "Proof\n";
    emit(root, 1, out);
    out += "QED\n";
    return out;
}

int proof_size(const ProofNode& root) {
    int n = 1;
    for (const ProofNode& c : root.children) n += proof_size(c);
    return n;
}

std::vector<Action> proof_chain_actions(const MdpState& state) {
    int empty = -1;
    for (std::size_t i = 0; i < state.fringes.size(); ++i)
        if (state.fringes[i].goals.empty()) {
            empty = static_cast<int>(i);
            break;
        }
    if (empty < 0) throw std::logic_error("proof_chain_actions: state holds no proof");

    std::vector<Action> actions;
    for (int cur = empty; state.fringes[cur].parent;) {
        actions.push_back(*state.fringes[cur].parent);
        cur = actions.back().fringe_idx;
    }
    std::reverse(actions.begin(), actions.end());
    // Chain fringe k becomes fringe k of the replayed episode: fringe
    // contents are a pure function of the parent fringe and the action, so
    // goal indices carry over unchanged.
    for (std::size_t k = 0; k < actions.size(); ++k) actions[k].fringe_idx = static_cast<int>(k);
    return actions;
}

ProofScript reconstruct_proof(const MdpState& state, const Theorem& target,
                              const std::vector<Theorem>& library, long fuel) {
    int empty = -1;
    for (std::size_t i = 0; i < state.fringes.size(); ++i)
        if (state.fringes[i].goals.empty()) {
            empty = static_cast<int>(i);
            break;
        }
    if (empty < 0) throw std::logic_error("reconstruct_proof: state holds no proof");

    std::vector<int> chain;
    for (int cur = empty;;) {
        chain.push_back(cur);
        const auto& parent = state.fringes[cur].parent;
        if (!parent) break;
        cur = parent->fringe_idx;
    }
    std::reverse(chain.begin(), chain.end());  // fringe 0 ... empty fringe

    // Rebuild proofs back to front: by the time a goal is processed, the
    // proofs of everything it spawned are already known. Duplicate goal
    // values overwrite earlier entries — any complete proof of the value is
    // interchangeable.
    std::vector<std::pair<Goal, ProofNode>> proofs;
    auto lookup = [&](const Goal& g) -> const ProofNode* {
        for (const auto& [goal, node] : proofs)
            if (goal == g) return &node;
        return nullptr;
    };

    for (int k = static_cast<int>(chain.size()) - 2; k >= 0; --k) {
        const Action& act = *state.fringes[chain[k + 1]].parent;
        const Goal& g = state.fringes[chain[k]].goals[act.goal_idx];

        std::vector<Term> term_args;
        if (act.term_arg) term_args.push_back(*act.term_arg);
        std::vector<Theorem> thm_args;
        ProofNode node;
        node.tactic = act.tactic;
        node.term_arg = act.term_arg;
        for (int idx : act.theorem_args) {
            thm_args.push_back(library.at(static_cast<std::size_t>(idx)));
            node.theorem_args.push_back(thm_args.back().name);
        }

        TacticOutcome out = apply_tactic(g, act.tactic, term_args, thm_args, fuel);
        if (!out.is_subgoals())
            throw std::logic_error("reconstruct_proof: recorded tactic no longer succeeds");
        for (const Goal& sub : out.subgoals) {
            const ProofNode* child = lookup(sub);
            if (!child)
                throw std::logic_error("reconstruct_proof: subgoal has no recorded proof");
            node.children.push_back(*child);
        }

        bool replaced = false;
        for (auto& [goal, existing] : proofs)
            if (goal == g) {
                existing = node;
                replaced = true;
                break;
            }
        if (!replaced) proofs.emplace_back(g, std::move(node));
    }

    const ProofNode* root = lookup(state.main_goal);
    if (!root) throw std::logic_error("reconstruct_proof: main goal never resolved");
    return ProofScript{target.name, target.statement, *root};
}

namespace {

struct Lines {
    std::vector<std::string> items;
    std::size_t pos = 0;

    explicit Lines(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t a = line.find_first_not_of(" \t");
            if (a == std::string::npos) continue;  // blank
            std::size_t b = line.find_last_not_of(" \t");
            items.push_back(line.substr(a, b - a + 1));
        }
    }

    bool at_end() const { return pos >= items.size(); }
    const std::string& peek() const {
        if (at_end()) throw std::runtime_error("proof script: unexpected end of input");
        return items[pos];
    }
    std::string next() {
        std::string s = peek();
        ++pos;
        return s;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw std::runtime_error("proof script line " + std::to_string(pos + 1) + ": " + msg);
    }
};

std::vector<std::string> split_args(const std::string& inner, Lines& in) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= inner.size()) {
        std::size_t comma = inner.find(',', start);
        std::string piece = inner.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        std::size_t a = piece.find_first_not_of(" \t");
        if (a != std::string::npos) {
            std::size_t b = piece.find_last_not_of(" \t");
            parts.push_back(piece.substr(a, b - a + 1));
        } else if (comma != std::string::npos) {
            in.fail("empty argument");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return parts;
}

ProofNode parse_node(Lines& in) {
    std::string line = in.next();

    std::size_t sp = line.find_first_of(" [");
    std::string name = line.substr(0, sp);
    auto tid = tactic_from_name(name);
    if (!tid) in.fail("unknown tactic '" + name + "'");

    ProofNode node;
    node.tactic = *tid;

    std::size_t lb = line.find('[');
    if (lb != std::string::npos) {
        std::size_t rb = line.rfind(']');
        if (rb == std::string::npos || rb < lb) in.fail("unterminated argument list");
        std::vector<std::string> args = split_args(line.substr(lb + 1, rb - lb - 1), in);
        switch (arg_kind(*tid)) {
            case ArgKind::None:
                if (!args.empty()) in.fail(name + " takes no arguments");
                break;
            case ArgKind::SingleTerm:
                if (args.size() != 1) in.fail(name + " takes one term argument");
                node.term_arg = parse_term(args[0]);
                break;
            case ArgKind::SingleTheorem:
                if (args.size() != 1) in.fail(name + " takes one theorem argument");
                node.theorem_args = std::move(args);
                break;
            case ArgKind::TheoremList:
                node.theorem_args = std::move(args);
                break;
        }
    } else if (arg_kind(*tid) == ArgKind::SingleTerm || arg_kind(*tid) == ArgKind::SingleTheorem) {
        in.fail(name + " requires an argument list");
    }

    if (in.at_end()) in.fail("script ended inside a proof");
    if (in.peek().rfind(">- (", 0) == 0) {
        while (!in.at_end() && in.peek().rfind(">- (", 0) == 0) {
            in.next();
            node.children.push_back(parse_node(in));
            if (in.next() != ")") in.fail("expected ')' closing a branch");
        }
    } else if (in.peek() != ")" && in.peek() != "QED") {
        node.children.push_back(parse_node(in));
    }
    return node;
}

}  // namespace

ProofScript parse_proof_script(const std::string& text) {
    Lines in(text);
    std::string header = in.next();
    if (header.rfind("Theorem ", 0) != 0)
        in.fail("expected 'Theorem <name>: <statement>'");
    std::size_t colon = header.find(':');
    if (colon == std::string::npos) in.fail("missing ':' in theorem header");
    std::string name = header.substr(8, colon - 8);
    std::size_t a = name.find_first_not_of(" \t");
    if (a == std::string::npos) in.fail("missing theorem name");
    std::size_t b = name.find_last_not_of(" \t");
    name = name.substr(a, b - a + 1);

    Term statement = parse_term(header.substr(colon + 1));

    if (in.next() != "Proof") in.fail("expected 'Proof'");
    ProofNode root = parse_node(in);
    if (in.next() != "QED") in.fail("expected 'QED'");
    return ProofScript{std::move(name), std::move(statement), std::move(root)};
}

namespace {

struct Replayer {
    const std::vector<Theorem>& library;
    long fuel;
    int steps = 0;
    std::string error;

    const Theorem* find(const std::string& name) {
        for (const Theorem& t : library)
            if (t.name == name) return &t;
        return nullptr;
    }

    bool run(const ProofNode& node, const Goal& goal) {
        ++steps;
        std::vector<Term> term_args;
        if (node.term_arg) term_args.push_back(*node.term_arg);
        std::vector<Theorem> thm_args;
        for (const std::string& name : node.theorem_args) {
            const Theorem* t = find(name);
            if (!t) {
                error = "step " + std::to_string(steps) + ": unknown theorem '" + name + "'";
                return false;
            }
            thm_args.push_back(*t);
        }

        TacticOutcome out;
        try {
            out = apply_tactic(goal, node.tactic, term_args, thm_args, fuel);
        } catch (const std::exception& e) {
            error = "step " + std::to_string(steps) + " (" + tactic_name(node.tactic) +
                    ") on '" + goal.to_string() + "': " + e.what();
            return false;
        }
        if (!out.is_subgoals()) {
            error = "step " + std::to_string(steps) + " (" + tactic_name(node.tactic) +
                    ") on '" + goal.to_string() + "' did not produce subgoals";
            return false;
        }
        if (out.subgoals.size() != node.children.size()) {
            error = "step " + std::to_string(steps) + " (" + tactic_name(node.tactic) +
                    ") on '" + goal.to_string() + "': expected " +
                    std::to_string(node.children.size()) + " subgoals, got " +
                    std::to_string(out.subgoals.size());
            return false;
        }
        for (std::size_t i = 0; i < out.subgoals.size(); ++i)
            if (!run(node.children[i], out.subgoals[i])) return false;
        return true;
    }
};

}  // namespace

ReplayResult replay_script(const ProofScript& script, const std::vector<Theorem>& library,
                           long fuel) {
    Replayer r{library, fuel, 0, {}};
    bool ok = r.run(script.root, Goal(script.statement));
    return ReplayResult{ok, r.error, r.steps};
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\\' || c == '"') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string export_search_graph(const MdpState& state) {
    // Mark the provenance chain of the first empty fringe, if any.
    std::vector<bool> on_path(state.fringes.size(), false);
    for (std::size_t i = 0; i < state.fringes.size(); ++i)
        if (state.fringes[i].goals.empty()) {
            int cur = static_cast<int>(i);
            for (;;) {
                on_path[cur] = true;
                const auto& parent = state.fringes[cur].parent;
                if (!parent) break;
                cur = parent->fringe_idx;
            }
            break;
        }

    std::ostringstream os;
    os << "digraph search {\n";
    os << "  rankdir=TB;\n";
    os << "  node [shape=box, style=filled, fontname=\"monospace\"];\n";
    for (std::size_t i = 0; i < state.fringes.size(); ++i) {
        const Fringe& f = state.fringes[i];
        std::string label = "f" + std::to_string(i);
        if (f.goals.empty()) {
            label += "\\n(proved)";
        } else {
            for (const Goal& g : f.goals) {
                std::string s = g.to_string();
                if (s.size() > 40) s = s.substr(0, 37) + "...";
                label += "\\n" + dot_escape(s);
            }
        }
        os << "  f" << i << " [label=\"" << label << "\", fillcolor=\""
           << (on_path[i] ? "lightblue" : "lightcoral") << "\"];\n";
    }
    for (std::size_t i = 0; i < state.fringes.size(); ++i) {
        const auto& parent = state.fringes[i].parent;
        if (!parent) continue;
        os << "  f" << parent->fringe_idx << " -> f" << i << " [label=\""
           << tactic_name(parent->tactic) << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace prover
