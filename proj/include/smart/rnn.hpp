// Random neural network critic: state, product-form stationary solution and
// the clamped fixed-point solver for the neuron excitation probabilities q.

#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "smart/errors.hpp"

#include "json.hpp"

namespace smart {

// Dense row-major square matrix, just enough for the weight algebra here.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// One neuron per candidate decision. Weights are spike emission rates in
// spikes/second; the diagonal of both matrices is kept at zero (a neuron
// never signals itself).
struct RnnState {
    std::size_t n = 0;
    Matrix w_plus;                        // excitatory rates w+(i,j)
    Matrix w_minus;                       // inhibitory rates w-(i,j)
    std::vector<double> r;                // firing rates, > 0
    std::vector<double> lambda_plus_ext;  // exogenous excitatory Poisson rates
    std::vector<double> lambda_minus_ext; // exogenous inhibitory Poisson rates
    std::vector<double> q;                // cached excitation probabilities
    bool q_solved = false;                // q holds a converged solve

    bool operator==(const RnnState&) const = default;
};

enum class RatePolicy { SumOfWeights };

// Uniform off-diagonal weights, Lambda=1, lambda=0, q seeded at the solver's
// 0.5 starting point. Rates follow the policy; SumOfWeights makes the
// renormalization target consistent from the first update.
RnnState make_rnn(std::size_t n, double init_weight, RatePolicy policy = RatePolicy::SumOfWeights);
RnnState make_rnn(std::size_t n, double init_weight, std::vector<double> rates);

struct FixedPointResult {
    std::vector<double> q;
    std::size_t iterations = 0;
};

// Clamped fixed-point iteration
//   q_i <- min[1, (sum_j q_j w+(j,i) + Lambda_i) / (r_i + sum_j q_j w-(j,i) + lambda_i)]
// from q^0 = 0.5, until the max-norm step falls below tol. Caches q in the
// state. Throws ConvergenceError with the last iterate if max_iter is hit.
FixedPointResult solve_fixed_point(RnnState& state, double tol = 1e-9,
                                   std::size_t max_iter = 10000);

// Stationary probability Pr[k] = prod_i (1-q_i) q_i^{k_i} from the cached q.
// Throws DegenerateDistributionError when any q_i has been clamped to 1.
double stationary_probability(const RnnState& state, std::span<const std::uint32_t> k);

// Rescales every row of both weight matrices so that
// sum_k w+(i,k) + w-(i,k) = r_i again. r is the fixed target, never re-derived.
void renormalize(RnnState& state);

void to_json(nlohmann::json& j, const RnnState& state);
void from_json(const nlohmann::json& j, RnnState& state);

}  // namespace smart
