#include "smart/rnn.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace smart {

namespace {

RnnState make_uniform(std::size_t n, double init_weight) {
    if (n < 2) {
        throw InvalidDimensionError("rnn needs at least 2 neurons, got " + std::to_string(n));
    }
    if (!(init_weight > 0.0)) {
        throw InvalidDimensionError("init_weight must be positive");
    }
    RnnState s;
    s.n = n;
    s.w_plus = Matrix(n, n, init_weight);
    s.w_minus = Matrix(n, n, init_weight);
    for (std::size_t i = 0; i < n; ++i) {
        s.w_plus(i, i) = 0.0;
        s.w_minus(i, i) = 0.0;
    }
    s.lambda_plus_ext.assign(n, 1.0);
    s.lambda_minus_ext.assign(n, 0.0);
    s.q.assign(n, 0.5);
    return s;
}

}  // namespace

RnnState make_rnn(std::size_t n, double init_weight, RatePolicy policy) {
    (void)policy;  // single policy enumerator; explicit rates use the overload
    RnnState s = make_uniform(n, init_weight);
    s.r.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            sum += s.w_plus(i, k) + s.w_minus(i, k);
        }
        s.r[i] = sum;
    }
    return s;
}

RnnState make_rnn(std::size_t n, double init_weight, std::vector<double> rates) {
    RnnState s = make_uniform(n, init_weight);
    if (rates.size() != n) {
        throw InvalidDimensionError("rate vector size does not match neuron count");
    }
    for (double ri : rates) {
        if (!(ri > 0.0)) {
            throw InvalidDimensionError("firing rates must be positive");
        }
    }
    s.r = std::move(rates);
    return s;
}

FixedPointResult solve_fixed_point(RnnState& state, double tol, std::size_t max_iter) {
    if (!(tol > 0.0) || max_iter == 0) {
        throw InvalidInputError("solver needs tol > 0 and max_iter > 0");
    }
    const std::size_t n = state.n;
    std::vector<double> cur(n, 0.5);
    std::vector<double> next(n, 0.0);

    double residual = 0.0;
    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double excite = state.lambda_plus_ext[i];
            double inhibit = state.lambda_minus_ext[i];
            for (std::size_t j = 0; j < n; ++j) {
                excite += cur[j] * state.w_plus(j, i);
                inhibit += cur[j] * state.w_minus(j, i);
            }
            double qi = excite / (state.r[i] + inhibit);
            if (qi > 1.0) qi = 1.0;  // the clamp applies inside every iteration
            assert(qi >= 0.0 && qi <= 1.0);
            residual = std::max(residual, std::abs(qi - cur[i]));
            next[i] = qi;
        }
        cur.swap(next);
        if (residual < tol) {
            state.q = cur;
            state.q_solved = true;
            return FixedPointResult{std::move(cur), iter};
        }
    }
    throw ConvergenceError("fixed point did not converge after " + std::to_string(max_iter) +
                               " iterations (residual " + std::to_string(residual) + ")",
                           std::move(cur), residual, max_iter);
}

double stationary_probability(const RnnState& state, std::span<const std::uint32_t> k) {
    if (!state.q_solved) {
        throw Error("stationary_probability requires a converged solve");
    }
    if (k.size() != state.n) {
        throw InvalidDimensionError("state vector size does not match neuron count");
    }
    double p = 1.0;
    for (std::size_t i = 0; i < state.n; ++i) {
        const double qi = state.q[i];
        if (qi >= 1.0) {
            throw DegenerateDistributionError("q[" + std::to_string(i) +
                                              "] = 1, stationary distribution degenerate");
        }
        p *= (1.0 - qi) * std::pow(qi, static_cast<double>(k[i]));
    }
    return p;
}

void renormalize(RnnState& state) {
    const std::size_t n = state.n;
    for (std::size_t i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (std::size_t kk = 0; kk < n; ++kk) {
            row_sum += state.w_plus(i, kk) + state.w_minus(i, kk);
        }
        if (row_sum == 0.0) {
            throw DegenerateRowError("row " + std::to_string(i) + " has all-zero weights");
        }
        const double scale = state.r[i] / row_sum;
        for (std::size_t kk = 0; kk < n; ++kk) {
            state.w_plus(i, kk) *= scale;
            state.w_minus(i, kk) *= scale;
        }
    }
}

void to_json(nlohmann::json& j, const RnnState& state) {
    j = nlohmann::json{{"n", state.n},
                       {"w_plus", state.w_plus.data()},
                       {"w_minus", state.w_minus.data()},
                       {"r", state.r},
                       {"lambda_plus_ext", state.lambda_plus_ext},
                       {"lambda_minus_ext", state.lambda_minus_ext},
                       {"q", state.q}};
}

void from_json(const nlohmann::json& j, RnnState& state) {
    state.n = j.at("n").get<std::size_t>();
    const auto wp = j.at("w_plus").get<std::vector<double>>();
    const auto wm = j.at("w_minus").get<std::vector<double>>();
    if (wp.size() != state.n * state.n || wm.size() != state.n * state.n) {
        throw InvalidDimensionError("weight matrix size does not match n*n");
    }
    state.w_plus = Matrix(state.n, state.n);
    state.w_minus = Matrix(state.n, state.n);
    state.w_plus.data() = wp;
    state.w_minus.data() = wm;
    state.r = j.at("r").get<std::vector<double>>();
    state.lambda_plus_ext = j.at("lambda_plus_ext").get<std::vector<double>>();
    state.lambda_minus_ext = j.at("lambda_minus_ext").get<std::vector<double>>();
    state.q = j.at("q").get<std::vector<double>>();
    if (state.r.size() != state.n || state.lambda_plus_ext.size() != state.n ||
        state.lambda_minus_ext.size() != state.n || state.q.size() != state.n) {
        throw InvalidDimensionError("vector field size does not match n");
    }
    state.q_solved = false;
}

}  // namespace smart
