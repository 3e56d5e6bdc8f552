#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "prover/rng.hpp"
#include "prover/tape.hpp"

namespace prover::ad {

struct RmsPropConfig {
    double lr = 5e-5;
    double decay = 0.99;
    double eps = 1e-8;
};

// acc <- decay*acc + (1-decay)*g^2 ; p <- p - lr*g/sqrt(acc+eps)
class RmsProp {
public:
    explicit RmsProp(RmsPropConfig cfg = {}) : cfg_(cfg) {}

    void step(ParamStore& params, const GradStore& grads);

    const RmsPropConfig& config() const { return cfg_; }
    // Exposed for checkpointing.
    std::map<std::string, std::vector<double>>& accumulators() { return acc_; }
    const std::map<std::string, std::vector<double>>& accumulators() const { return acc_; }

private:
    RmsPropConfig cfg_;
    std::map<std::string, std::vector<double>> acc_;
};

struct FdReport {
    double max_rel_err = 0.0;
    std::string worst_param;
    int worst_index = -1;
    int coords_checked = 0;
    std::vector<std::string> failures;  // human-readable, one per coordinate over tolerance

    bool ok() const { return failures.empty(); }
};

// Central-difference check of `analytic` (gradients of f at the current
// parameter values) on n_coords randomly chosen coordinates. f is re-run
// with individual coordinates nudged by ±step; parameters are restored
// afterwards. Relative error per coordinate is |fd-an|/max(|fd|,|an|),
// treated as 0 when both magnitudes are below 1e-7.
FdReport finite_diff_check(ParamStore& params, const std::function<double()>& f,
                           const GradStore& analytic, int n_coords, Rng& rng,
                           double step = 1e-5, double tolerance = 1e-4);

}  // namespace prover::ad
