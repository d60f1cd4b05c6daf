#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace co2bench {

// Blind input estimation for the model
//   y(t) = sum_{k=1..n} q(k) * o(t-k) + e(t),   t = 1..N,
// where the FIR response q and the input o are both unknown, but o is known
// to be piecewise constant: o = H x for an event matrix H built from segment
// boundaries (door events) and a level vector x.

// One day of measurements. events holds segment end positions in 1-indexed
// sample counts, strictly increasing with events.back() == y.size().
struct BlindIdProblem {
    Eigen::VectorXd y;
    std::vector<int> events;
    int order = 30; // FIR length n
};

void validate_problem(const BlindIdProblem& prob);

// N x p block-ones matrix: column k is 1 on samples (T_{k-1}, T_k].
Eigen::MatrixXd build_event_matrix(const std::vector<int>& events, int n_samples);

// N x n convolution regressor for a known input: O[t,k] = o(t-k), zero where
// t-k < 1. Columns are delayed copies, so (O q)(t) is the FIR output.
Eigen::MatrixXd build_regressor(const Eigen::VectorXd& o, int order);

// N x (n*p) lifted regressor [S^1 H, S^2 H, ..., S^n H] with S the one-step
// delay, so Phi * vec_rows(q x^T) == build_regressor(H x, n) * q exactly.
// Throws std::invalid_argument when n*p > N (more unknowns than samples).
Eigen::MatrixXd build_phi(const std::vector<int>& events, int n_samples, int order);

// FIR output of the piecewise-constant input defined by (x, events).
Eigen::VectorXd predict_output(const Eigen::VectorXd& q, const Eigen::VectorXd& x,
                               const std::vector<int>& events);

// Segment lengths T_k - T_{k-1}, used as integer-snap weights.
std::vector<double> segment_lengths(const std::vector<int>& events);

enum class ScaleMode { unit_q_norm, integer_snap };
const char* scale_mode_name(ScaleMode m);

// Fixes the scale indeterminacy of (q, x) -> (c q, x / c).
//  * unit_q_norm: ||q|| = 1, sign chosen so mean(x) >= 0.
//  * integer_snap: after unit normalization, rescales x by the c > 0 that
//    minimizes sum_k w_k (c x_k - round(c x_k))^2 over a log grid, pushing
//    levels toward whole numbers (headcounts). Weights default to 1.
// c_range optionally pins the snap sweep to [first, second] when the caller
// knows the plausible scale (e.g. from room physics); {0, 0} keeps the
// default sweep over peak levels 0.5 .. 28. Throws NumericalError when q is
// all zero and std::invalid_argument for a backwards or negative range.
std::pair<Eigen::VectorXd, Eigen::VectorXd> resolve_scale(const Eigen::VectorXd& q,
                                                          const Eigen::VectorXd& x, ScaleMode mode,
                                                          const std::vector<double>& weights = {},
                                                          std::pair<double, double> c_range = {0.0,
                                                                                               0.0});

struct BlindIdResult {
    Eigen::VectorXd q;     // FIR coefficients, length order
    Eigen::VectorXd x;     // segment levels, length p
    Eigen::VectorXd y_hat; // fitted output
    ScaleMode scale_mode = ScaleMode::unit_q_norm;
    bool converged = true;
    int iterations = 1;
    // Kernel method extras; NaN / zero for the direct method.
    double log_marginal_likelihood = std::numeric_limits<double>::quiet_NaN();
    double lambda = 0.0, alpha = 0.0, sigma2 = 0.0;
};

// Direct overparameterized estimate: solves y ~= Phi theta by least squares,
// reshapes theta to an order x p matrix and takes its best rank-1 factors
// (leading singular pair). Unbiased by construction but ignores both the
// smoothness of q and the sign of x. Throws IdentifiabilityError when Phi is
// rank deficient.
BlindIdResult baseline_identify(const BlindIdProblem& prob);

// Exponentially decaying kernel K[s,t] = lambda * alpha^max(s,t) (1-indexed),
// the covariance prior that favors smooth, stable impulse responses.
// Throws std::domain_error unless alpha is in (0,1) and lambda >= 0.
Eigen::MatrixXd stable_spline_gram(int order, double lambda, double alpha);

// Exact factor B with B B^T == K, built from the increment structure of the
// kernel (no Cholesky round-off, works for singular K too).
Eigen::MatrixXd stable_spline_factor(int order, double lambda, double alpha);

// Non-negative least squares min ||A x - b|| s.t. x >= 0 (active set).
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

struct HyperGrid {
    std::vector<double> lambdas;
    std::vector<double> alphas;
    std::vector<double> sigma2s;
};

// n log-spaced points from a to b inclusive.
std::vector<double> logspace(double a, double b, int n);

struct ScanPoint {
    double lambda = 0.0, alpha = 0.0, sigma2 = 0.0;
    double log_ml = -std::numeric_limits<double>::infinity();
};

struct ScanResult {
    ScanPoint best;
    // log-ML of each accepted improvement during the grid sweep, in sweep
    // order; nondecreasing by construction of the argmax.
    std::vector<double> accepted_log_ml;
};

// Evaluates the Gaussian-process log marginal likelihood of y over the grid
// and picks the maximizer (first point wins ties; sweep order is fixed, so
// the parallel and serial paths return bit-identical results). Works from the
// sufficient statistics G = O^T O, b = O^T y, yy = y^T y of a regressor O.
ScanResult scan_hyperparams(const Eigen::MatrixXd& G, const Eigen::VectorXd& b, double yy,
                            int n_samples, const HyperGrid& grid, bool parallel);

// Posterior mean of q under the kernel prior at fixed hyperparameters.
Eigen::VectorXd kernel_posterior_mean(const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                                      double lambda, double alpha, double sigma2);

struct KernelOptions {
    HyperGrid grid;        // empty vectors select the defaults below
    int max_iterations = 25;
    double tol = 1e-6;     // relative change of the fitted output
    bool parallel = true;  // OpenMP over the hyperparameter grid
};

HyperGrid default_hyper_grid(double sigma2_scale);

// Alternating estimate under the decay prior: (i) empirical-Bayes GP
// regression for q given the current input, (ii) non-negative least squares
// for the levels x given q, until the fitted output settles. Deterministic;
// never throws on slow convergence (the result carries converged = false).
BlindIdResult kernel_identify(const BlindIdProblem& prob, const KernelOptions& opts = {});

nlohmann::ordered_json result_to_json(const BlindIdResult& r, const BlindIdProblem& prob);

} // namespace co2bench
