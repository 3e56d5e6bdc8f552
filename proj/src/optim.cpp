#include "prover/optim.hpp"

#include <cmath>
#include <sstream>

#include "prover/kernels.hpp"

namespace prover::ad {

void RmsProp::step(ParamStore& params, const GradStore& grads) {
    for (const auto& [name, g] : grads.entries()) {
        std::vector<double>& p = params.get(name);
        if (p.size() != g.size())
            throw std::invalid_argument("RmsProp: gradient shape mismatch for " + name);
        auto& acc = acc_[name];
        if (acc.empty()) acc.assign(p.size(), 0.0);
        kern::ops().rmsprop(p.data(), acc.data(), g.data(), static_cast<int>(p.size()),
                            cfg_.lr, cfg_.decay, cfg_.eps);
    }
}

FdReport finite_diff_check(ParamStore& params, const std::function<double()>& f,
                           const GradStore& analytic, int n_coords, Rng& rng,
                           double step, double tolerance) {
    // Flatten coordinate space for uniform sampling.
    std::vector<std::pair<std::string, std::size_t>> layout;  // (name, size)
    std::size_t total = 0;
    for (const auto& [name, v] : params.entries()) {
        layout.emplace_back(name, v.size());
        total += v.size();
    }

    FdReport rep;
    if (total == 0) return rep;

    for (int c = 0; c < n_coords; ++c) {
        std::size_t flat = rng.below(total);
        std::string name;
        std::size_t idx = 0;
        for (const auto& [nm, sz] : layout) {
            if (flat < sz) {
                name = nm;
                idx = flat;
                break;
            }
            flat -= sz;
        }

        double& coord = params.get(name)[idx];
        double saved = coord;
        coord = saved + step;
        double fp = f();
        coord = saved - step;
        double fm = f();
        coord = saved;

        double fd = (fp - fm) / (2.0 * step);
        const std::vector<double>* gv = analytic.find(name);
        double an = gv ? (*gv)[idx] : 0.0;

        double rel;
        if (std::abs(fd) < 1e-7 && std::abs(an) < 1e-7)
            rel = 0.0;
        else
            rel = std::abs(fd - an) / std::max(std::abs(fd), std::abs(an));

        ++rep.coords_checked;
        if (rel > rep.max_rel_err) {
            rep.max_rel_err = rel;
            rep.worst_param = name;
            rep.worst_index = static_cast<int>(idx);
        }
        if (rel > tolerance) {
            std::ostringstream os;
            os << name << "[" << idx << "]: analytic=" << an << " fd=" << fd
               << " rel=" << rel;
            rep.failures.push_back(os.str());
        }
    }
    return rep;
}

}  // namespace prover::ad
