#pragma once

/*
 * Partition comparison, entropies, and the power-law scaling fits that
 * summarize how quantum the walk on an ensemble of networks is.
 */

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/community.hpp"
#include "qwalk/generators.hpp"

namespace qwalk {

// Normalized mutual information, natural logs: 2 I(X;Y) / (H(X) + H(Y)).
// Conventions for the 0/0 corner: both partitions trivial -> 1, exactly one
// trivial -> 0.
double nmi(const Partition& x, const Partition& y);

double shannon_entropy(const Eigen::VectorXd& p);

// H_q = ln(sum_i p_i^q) / (1 - q); q = 1 falls back to Shannon. Natural logs,
// non-increasing in q.
double renyi_entropy(const Eigen::VectorXd& p, double q);

struct FitResult {
    double kappa1 = 0.0;    // prefactor of eps ~ kappa1 * <d>^(-kappa2)
    double kappa2 = 0.0;
    double kappa3 = 0.0;    // node-degree scaling of the quantum correction
    double residual = 0.0;  // rms residual in log space
};

std::string fit_result_to_json(const FitResult& r);

// Least squares of log eps on log <d>; kappa1 = exp(intercept),
// kappa2 = -slope. Requires >= 3 distinct mean degrees.
FitResult fit_power_law(const std::vector<double>& mean_degrees,
                        const std::vector<double>& epsilons);

// Sweeps the generator over the mean degrees, averaging the degree-form eps
// of the raw degree sequence (isolated nodes included) over `seeds_per_point`
// replicates, then fits the power law.
FitResult fit_quantumness_vs_degree(GenModel model, int n,
                                    const std::vector<double>& mean_degrees,
                                    int seeds_per_point, std::uint64_t seed);

// Slope of log(p_qc / p_c) against log d over nodes with d >= 2 and a
// positive ratio; kappa3 = -slope. Requires >= 2 distinct degrees there.
FitResult fit_kappa3(const Eigen::VectorXd& p_c, const Eigen::VectorXd& p_qc,
                     const Eigen::VectorXd& degrees);

}  // namespace qwalk
