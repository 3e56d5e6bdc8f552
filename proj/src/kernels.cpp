#include "prover/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace prover::kern {

namespace {

const Ops* lookup(const std::string& name) {
    if (name == "scalar") return &scalar_ops();
    if (name == "avx2") return avx2_ops();
    return nullptr;
}

const Ops* initial() {
    if (const char* env = std::getenv("FRINGE_KERNELS")) {
        const Ops* o = lookup(env);
        if (!o)
            throw std::runtime_error("FRINGE_KERNELS=" + std::string(env) +
                                     " is not available on this machine");
        return o;
    }
    if (const Ops* o = avx2_ops()) return o;
    return &scalar_ops();
}

const Ops*& active() {
    static const Ops* cur = initial();
    return cur;
}

}  // namespace

const Ops& ops() { return *active(); }

void select(const std::string& name) {
    const Ops* o = lookup(name);
    if (!o) throw std::runtime_error("kernel implementation '" + name + "' not available");
    active() = o;
}

}  // namespace prover::kern
