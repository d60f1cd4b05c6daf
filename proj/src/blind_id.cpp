#include "co2bench/blind_id.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "co2bench/errors.hpp"

namespace co2bench {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void validate_problem(const BlindIdProblem& prob) {
    const int N = static_cast<int>(prob.y.size());
    if (N < 2) throw std::invalid_argument("blind id problem: need at least two samples");
    if (prob.order < 1) throw std::invalid_argument("blind id problem: order must be at least 1");
    if (prob.order > N) throw std::invalid_argument("blind id problem: order exceeds sample count");
    if (prob.events.empty() || prob.events.front() < 1 || prob.events.back() != N)
        throw std::invalid_argument("blind id problem: events must end at the sample count");
    for (std::size_t k = 1; k < prob.events.size(); ++k)
        if (prob.events[k] <= prob.events[k - 1])
            throw std::invalid_argument("blind id problem: events must be strictly increasing");
}

Eigen::MatrixXd build_event_matrix(const std::vector<int>& events, int n_samples) {
    if (events.empty() || events.front() < 1 || events.back() != n_samples)
        throw std::invalid_argument("build_event_matrix: events must be in [1, N] and end at N");
    const int p = static_cast<int>(events.size());
    MatrixXd H = MatrixXd::Zero(n_samples, p);
    int seg_start = 0; // 0-based first row of the current segment
    for (int k = 0; k < p; ++k) {
        if (k > 0 && events[k] <= events[k - 1])
            throw std::invalid_argument("build_event_matrix: events must be strictly increasing");
        for (int t = seg_start; t < events[k]; ++t) H(t, k) = 1.0;
        seg_start = events[k];
    }
    return H;
}

Eigen::MatrixXd build_regressor(const Eigen::VectorXd& o, int order) {
    if (order < 1) throw std::invalid_argument("build_regressor: order must be at least 1");
    const int N = static_cast<int>(o.size());
    MatrixXd O = MatrixXd::Zero(N, order);
    for (int c = 0; c < order; ++c)
        for (int r = c + 1; r < N; ++r) O(r, c) = o(r - c - 1);
    return O;
}

Eigen::MatrixXd build_phi(const std::vector<int>& events, int n_samples, int order) {
    const int p = static_cast<int>(events.size());
    if (order < 1) throw std::invalid_argument("build_phi: order must be at least 1");
    if (order * p > n_samples)
        throw std::invalid_argument("build_phi: order * segments exceeds the sample count (" +
                                    std::to_string(order) + " * " + std::to_string(p) + " > " +
                                    std::to_string(n_samples) + ")");
    const MatrixXd H = build_event_matrix(events, n_samples);
    MatrixXd Phi = MatrixXd::Zero(n_samples, order * p);
    // Block j holds H delayed by j rows; block j of vec_rows(q x^T) is q_j x.
    for (int j = 1; j <= order; ++j)
        Phi.block(j, (j - 1) * p, n_samples - j, p) = H.topRows(n_samples - j);
    return Phi;
}

Eigen::VectorXd predict_output(const Eigen::VectorXd& q, const Eigen::VectorXd& x,
                               const std::vector<int>& events) {
    const int N = events.empty() ? 0 : events.back();
    if (static_cast<int>(events.size()) != x.size())
        throw std::invalid_argument("predict_output: one level per segment required");
    const int n = static_cast<int>(q.size());
    // Piecewise-constant input, then direct convolution.
    VectorXd o(N);
    int seg_start = 0;
    for (std::size_t k = 0; k < events.size(); ++k) {
        for (int t = seg_start; t < events[k]; ++t) o(t) = x(static_cast<int>(k));
        seg_start = events[k];
    }
    VectorXd y = VectorXd::Zero(N);
    for (int t = 0; t < N; ++t) {
        const int kmax = std::min(n, t);
        double acc = 0.0;
        for (int k = 1; k <= kmax; ++k) acc += q(k - 1) * o(t - k);
        y(t) = acc;
    }
    return y;
}

std::vector<double> segment_lengths(const std::vector<int>& events) {
    std::vector<double> w(events.size());
    int prev = 0;
    for (std::size_t k = 0; k < events.size(); ++k) {
        w[k] = static_cast<double>(events[k] - prev);
        prev = events[k];
    }
    return w;
}

const char* scale_mode_name(ScaleMode m) {
    return m == ScaleMode::unit_q_norm ? "unit_q_norm" : "integer_snap";
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> resolve_scale(const Eigen::VectorXd& q,
                                                          const Eigen::VectorXd& x, ScaleMode mode,
                                                          const std::vector<double>& weights,
                                                          std::pair<double, double> c_range) {
    const double qn = q.norm();
    if (qn == 0.0) throw NumericalError("resolve_scale: q is identically zero");
    VectorXd qu = q / qn;
    VectorXd xu = x * qn;
    if (xu.size() > 0 && xu.mean() < 0.0) {
        qu = -qu;
        xu = -xu;
    }
    if (mode == ScaleMode::unit_q_norm) return {qu, xu};

    if (!weights.empty() && static_cast<Eigen::Index>(weights.size()) != x.size())
        throw std::invalid_argument("resolve_scale: one weight per segment required");
    const bool custom_range = c_range.first != 0.0 || c_range.second != 0.0;
    if (custom_range && !(c_range.first > 0.0 && c_range.second > c_range.first))
        throw std::invalid_argument("resolve_scale: c_range must satisfy 0 < lo < hi");
    const double mx = xu.cwiseAbs().maxCoeff();
    if (mx == 0.0) return {qu, xu}; // nothing to snap, levels are all zero

    // Log sweep of the scale factor. The default window [0.5, 28] * mx^-1
    // spans "largest level is one-half" up to "largest level is twenty-eight".
    // The cap matters: unbounded, ever-larger scales approximate any level
    // vector arbitrarily well with big integers, so the sweep must stay
    // inside plausible room headcounts (or the caller's tighter c_range).
    const int n_grid = 2000;
    const double c_lo = custom_range ? c_range.first : 0.5 / mx;
    const double span = custom_range ? c_range.second / c_range.first : 56.0;
    const double ratio = std::pow(span, 1.0 / (n_grid - 1));
    double best_c = c_lo, best_cost = std::numeric_limits<double>::infinity();
    double c = c_lo;
    for (int g = 0; g < n_grid; ++g, c *= ratio) {
        double cost = 0.0;
        for (Eigen::Index k = 0; k < xu.size(); ++k) {
            const double v = c * xu(k);
            const double d = v - std::round(v);
            cost += (weights.empty() ? 1.0 : weights[static_cast<std::size_t>(k)]) * d * d;
        }
        if (cost < best_cost) {
            best_cost = cost;
            best_c = c;
        }
    }
    return {qu / best_c, xu * best_c};
}

BlindIdResult baseline_identify(const BlindIdProblem& prob) {
    validate_problem(prob);
    const int N = static_cast<int>(prob.y.size());
    const int n = prob.order;
    const int p = static_cast<int>(prob.events.size());

    const MatrixXd Phi = build_phi(prob.events, N, n);
    Eigen::ColPivHouseholderQR<MatrixXd> qr(Phi);
    if (qr.rank() < n * p)
        throw IdentifiabilityError("baseline_identify: lifted regressor is rank deficient (rank " +
                                   std::to_string(qr.rank()) + " of " + std::to_string(n * p) +
                                   "); too few samples or degenerate events");
    const VectorXd theta = qr.solve(prob.y);

    BlindIdResult res;
    res.scale_mode = ScaleMode::unit_q_norm;
    if (theta.norm() == 0.0) {
        res.q = VectorXd::Zero(n);
        res.x = VectorXd::Zero(p);
        res.y_hat = VectorXd::Zero(N);
        return res;
    }
    // Rows of Theta are the per-lag chunks q_j * x.
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        Theta(theta.data(), n, p);
    Eigen::JacobiSVD<MatrixXd> svd(Theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
    res.q = svd.matrixU().col(0);
    res.x = svd.singularValues()(0) * svd.matrixV().col(0);
    if (res.x.size() > 0 && res.x.mean() < 0.0) {
        res.q = -res.q;
        res.x = -res.x;
    }
    res.y_hat = predict_output(res.q, res.x, prob.events);
    return res;
}

Eigen::MatrixXd stable_spline_gram(int order, double lambda, double alpha) {
    if (order < 1) throw std::invalid_argument("stable_spline_gram: order must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("stable_spline_gram: alpha must lie in (0,1)");
    if (!(lambda >= 0.0)) throw std::domain_error("stable_spline_gram: lambda must be >= 0");
    std::vector<double> pow_a(static_cast<std::size_t>(order) + 1, 1.0);
    for (int i = 1; i <= order; ++i) pow_a[static_cast<std::size_t>(i)] = pow_a[i - 1] * alpha;
    MatrixXd K(order, order);
    for (int r = 0; r < order; ++r)
        for (int c = 0; c < order; ++c) K(r, c) = lambda * pow_a[static_cast<std::size_t>(std::max(r, c) + 1)];
    return K;
}

Eigen::MatrixXd stable_spline_factor(int order, double lambda, double alpha) {
    if (order < 1) throw std::invalid_argument("stable_spline_factor: order must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("stable_spline_factor: alpha must lie in (0,1)");
    if (!(lambda >= 0.0)) throw std::domain_error("stable_spline_factor: lambda must be >= 0");
    // K[s,t] = lambda*alpha^max(s,t) = min(u_s, u_t) for u_s = lambda*alpha^s,
    // the Gram matrix of a Brownian path sampled at decreasing times u_s. Its
    // factor has sqrt of the time increments below the anti-diagonal.
    std::vector<double> u(static_cast<std::size_t>(order) + 1, 0.0); // u[i] = lambda*alpha^(order+1-i)
    for (int i = 1; i <= order; ++i)
        u[static_cast<std::size_t>(i)] = lambda * std::pow(alpha, order + 1 - i);
    MatrixXd B = MatrixXd::Zero(order, order);
    for (int c = 0; c < order; ++c) {
        const double inc = std::sqrt(std::max(0.0, u[static_cast<std::size_t>(c + 1)] - u[static_cast<std::size_t>(c)]));
        for (int r = 0; r + c <= order - 1; ++r) B(r, c) = inc;
    }
    return B;
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    if (A.rows() != b.size()) throw std::invalid_argument("nnls: dimension mismatch");
    const int p = static_cast<int>(A.cols());
    VectorXd x = VectorXd::Zero(p);
    std::vector<bool> active(static_cast<std::size_t>(p), false); // true = in the positive set
    VectorXd w = A.transpose() * b;
    const double tol = 1e-12 * (w.size() > 0 ? std::max(1.0, w.cwiseAbs().maxCoeff()) : 1.0);

    auto solve_on_set = [&](const std::vector<int>& idx) {
        MatrixXd As(A.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t j = 0; j < idx.size(); ++j) As.col(static_cast<Eigen::Index>(j)) = A.col(idx[j]);
        return VectorXd(As.colPivHouseholderQr().solve(b));
    };

    int outer = 0;
    const int outer_max = 3 * p + 30;
    while (outer++ < outer_max) {
        // Most violated optimality condition among the clamped variables.
        int j_best = -1;
        double w_best = tol;
        for (int j = 0; j < p; ++j) {
            if (!active[static_cast<std::size_t>(j)] && w(j) > w_best) {
                w_best = w(j);
                j_best = j;
            }
        }
        if (j_best < 0) break;
        active[static_cast<std::size_t>(j_best)] = true;

        for (int inner = 0; inner < outer_max; ++inner) {
            std::vector<int> idx;
            for (int j = 0; j < p; ++j)
                if (active[static_cast<std::size_t>(j)]) idx.push_back(j);
            const VectorXd z = solve_on_set(idx);
            bool feasible = true;
            for (Eigen::Index j = 0; j < z.size(); ++j) feasible = feasible && z(j) > 0.0;
            if (feasible) {
                x.setZero();
                for (std::size_t j = 0; j < idx.size(); ++j) x(idx[j]) = z(static_cast<Eigen::Index>(j));
                break;
            }
            // Step back along x -> z until the first variable hits zero.
            double step = 1.0;
            for (std::size_t j = 0; j < idx.size(); ++j) {
                const double zj = z(static_cast<Eigen::Index>(j));
                if (zj <= 0.0) {
                    const double xj = x(idx[j]);
                    step = std::min(step, xj / (xj - zj));
                }
            }
            VectorXd x_new = x;
            for (std::size_t j = 0; j < idx.size(); ++j)
                x_new(idx[j]) = x(idx[j]) + step * (z(static_cast<Eigen::Index>(j)) - x(idx[j]));
            for (std::size_t j = 0; j < idx.size(); ++j) {
                if (x_new(idx[j]) <= tol) {
                    x_new(idx[j]) = 0.0;
                    active[static_cast<std::size_t>(idx[j])] = false;
                }
            }
            x = x_new;
        }
        w = A.transpose() * (b - A * x);
    }
    return x;
}

std::vector<double> logspace(double a, double b, int n) {
    if (n < 2 || a <= 0.0 || b <= a) throw std::invalid_argument("logspace: need n >= 2, 0 < a < b");
    std::vector<double> v(static_cast<std::size_t>(n));
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = std::exp(la + (lb - la) * i / (n - 1));
    v.front() = a;
    v.back() = b;
    return v;
}

namespace {

// log marginal likelihood of y ~ N(0, sigma2 I + O K O^T) from the
// sufficient statistics, via the matrix inversion and determinant lemmas:
// only order-sized factorizations are needed.
double log_marginal(const MatrixXd& G, const VectorXd& b, double yy, int n_samples,
                    const MatrixXd& B, double sigma2) {
    const int n = static_cast<int>(G.rows());
    const MatrixXd M =
        sigma2 * MatrixXd::Identity(n, n) + B.transpose() * G * B;
    Eigen::LLT<MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const VectorXd beta = B.transpose() * b;
    const VectorXd u = llt.solve(beta);
    const double quad = std::max(0.0, (yy - beta.dot(u)) / sigma2);
    double logdet_m = 0.0;
    for (int i = 0; i < n; ++i) logdet_m += std::log(llt.matrixLLT()(i, i));
    logdet_m *= 2.0;
    const double logdet = (n_samples - n) * std::log(sigma2) + logdet_m;
    constexpr double kLog2Pi = 1.8378770664093453;
    return -0.5 * (quad + logdet + n_samples * kLog2Pi);
}

} // namespace

ScanResult scan_hyperparams(const Eigen::MatrixXd& G, const Eigen::VectorXd& b, double yy,
                            int n_samples, const HyperGrid& grid, bool parallel) {
    if (grid.lambdas.empty() || grid.alphas.empty() || grid.sigma2s.empty())
        throw std::invalid_argument("scan_hyperparams: empty grid");
    const int n = static_cast<int>(G.rows());
    const int nl = static_cast<int>(grid.lambdas.size());
    const int na = static_cast<int>(grid.alphas.size());
    const int ns = static_cast<int>(grid.sigma2s.size());
    const int total = nl * na * ns;
    std::vector<double> ml(static_cast<std::size_t>(total));

    auto eval_point = [&](int m) {
        const int il = m / (na * ns);
        const int ia = (m / ns) % na;
        const int is = m % ns;
        const MatrixXd B = stable_spline_factor(n, grid.lambdas[static_cast<std::size_t>(il)],
                                                grid.alphas[static_cast<std::size_t>(ia)]);
        ml[static_cast<std::size_t>(m)] =
            log_marginal(G, b, yy, n_samples, B, grid.sigma2s[static_cast<std::size_t>(is)]);
    };

    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int m = 0; m < total; ++m) eval_point(m);
    } else {
        for (int m = 0; m < total; ++m) eval_point(m);
    }

    // Each grid point is evaluated independently, so the reduction below is
    // identical no matter how the loop above was scheduled.
    ScanResult res;
    int best_m = -1;
    for (int m = 0; m < total; ++m) {
        if (ml[static_cast<std::size_t>(m)] > res.best.log_ml) {
            res.best.log_ml = ml[static_cast<std::size_t>(m)];
            best_m = m;
            res.accepted_log_ml.push_back(res.best.log_ml);
        }
    }
    if (best_m < 0)
        throw NumericalError("scan_hyperparams: no grid point gave a finite marginal likelihood");
    res.best.lambda = grid.lambdas[static_cast<std::size_t>(best_m / (na * ns))];
    res.best.alpha = grid.alphas[static_cast<std::size_t>((best_m / ns) % na)];
    res.best.sigma2 = grid.sigma2s[static_cast<std::size_t>(best_m % ns)];
    return res;
}

Eigen::VectorXd kernel_posterior_mean(const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                                      double lambda, double alpha, double sigma2) {
    const int n = static_cast<int>(G.rows());
    const MatrixXd B = stable_spline_factor(n, lambda, alpha);
    const MatrixXd M = sigma2 * MatrixXd::Identity(n, n) + B.transpose() * G * B;
    Eigen::LLT<MatrixXd> llt(M);
    if (llt.info() != Eigen::Success)
        throw NumericalError("kernel_posterior_mean: normal matrix is not positive definite");
    return B * llt.solve(B.transpose() * b);
}

HyperGrid default_hyper_grid(double sigma2_scale) {
    HyperGrid g;
    g.lambdas = logspace(1e-4, 1e4, 16);
    g.alphas = logspace(0.5, 0.99, 12);
    g.sigma2s.resize(9);
    for (int k = -4; k <= 4; ++k)
        g.sigma2s[static_cast<std::size_t>(k + 4)] = sigma2_scale * std::pow(2.0, k);
    return g;
}

namespace {

// Columns of the level regressor: FIR response of each segment indicator.
MatrixXd level_regressor(const VectorXd& q, const MatrixXd& H) {
    const int N = static_cast<int>(H.rows());
    const int p = static_cast<int>(H.cols());
    const int n = static_cast<int>(q.size());
    MatrixXd W = MatrixXd::Zero(N, p);
    for (int c = 0; c < p; ++c) {
        for (int t = 0; t < N; ++t) {
            const int kmax = std::min(n, t);
            double acc = 0.0;
            for (int k = 1; k <= kmax; ++k) acc += q(k - 1) * H(t - k, c);
            W(t, c) = acc;
        }
    }
    return W;
}

} // namespace

BlindIdResult kernel_identify(const BlindIdProblem& prob, const KernelOptions& opts) {
    validate_problem(prob);
    const int N = static_cast<int>(prob.y.size());
    const int n = prob.order;
    const int p = static_cast<int>(prob.events.size());
    const VectorXd& y = prob.y;
    const double yy = y.squaredNorm();

    BlindIdResult res;
    res.scale_mode = ScaleMode::unit_q_norm;
    if (yy == 0.0) {
        res.q = VectorXd::Zero(n);
        res.x = VectorXd::Zero(p);
        res.y_hat = VectorXd::Zero(N);
        return res;
    }

    const MatrixXd H = build_event_matrix(prob.events, N);

    // Starting levels: segment means of the output, clipped to be feasible.
    VectorXd x(p);
    {
        int seg_start = 0;
        for (int k = 0; k < p; ++k) {
            const int len = prob.events[static_cast<std::size_t>(k)] - seg_start;
            x(k) = std::max(0.0, y.segment(seg_start, len).mean());
            seg_start = prob.events[static_cast<std::size_t>(k)];
        }
        if (x.maxCoeff() <= 0.0) x.setOnes();
    }

    // Noise-scale anchor from a lightly ridged ordinary FIR fit.
    double sigma2_scale;
    {
        const MatrixXd O = build_regressor(H * x, n);
        const MatrixXd G = O.transpose() * O;
        const VectorXd b = O.transpose() * y;
        const double ridge = 1e-8 * std::max(G.trace() / n, 1e-30);
        const VectorXd q0 = (G + ridge * MatrixXd::Identity(n, n)).ldlt().solve(b);
        const double rss = (y - O * q0).squaredNorm();
        sigma2_scale = std::max({rss / std::max(N - n, 1), 1e-8 * yy / N, 1e-12});
    }
    const HyperGrid grid = (opts.grid.lambdas.empty() || opts.grid.alphas.empty() ||
                            opts.grid.sigma2s.empty())
                               ? default_hyper_grid(sigma2_scale)
                               : opts.grid;

    VectorXd q = VectorXd::Zero(n);
    VectorXd y_prev = VectorXd::Zero(N);
    res.converged = false;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        res.iterations = it;
        const MatrixXd O = build_regressor(H * x, n);
        const MatrixXd G = O.transpose() * O;
        const VectorXd b = O.transpose() * y;
        const ScanResult scan = scan_hyperparams(G, b, yy, N, grid, opts.parallel);
        q = kernel_posterior_mean(G, b, scan.best.lambda, scan.best.alpha, scan.best.sigma2);
        res.log_marginal_likelihood = scan.best.log_ml;
        res.lambda = scan.best.lambda;
        res.alpha = scan.best.alpha;
        res.sigma2 = scan.best.sigma2;

        const MatrixXd W = level_regressor(q, H);
        x = nnls(W, y);
        const VectorXd y_hat = W * x;

        const double denom = std::max(y_prev.norm(), 1e-30);
        if (it > 1 && (y_hat - y_prev).norm() / denom < opts.tol) {
            res.converged = true;
            y_prev = y_hat;
            break;
        }
        y_prev = y_hat;
    }

    if (q.norm() == 0.0) {
        // Nothing identifiable survived; report the degenerate fit as-is.
        res.q = q;
        res.x = x;
        res.y_hat = y_prev;
        return res;
    }
    std::tie(res.q, res.x) = resolve_scale(q, x, ScaleMode::unit_q_norm);
    res.y_hat = y_prev;
    return res;
}

nlohmann::ordered_json result_to_json(const BlindIdResult& r, const BlindIdProblem& prob) {
    nlohmann::ordered_json j;
    j["order"] = r.q.size();
    j["events"] = prob.events;
    j["scale_mode"] = scale_mode_name(r.scale_mode);
    j["q"] = std::vector<double>(r.q.data(), r.q.data() + r.q.size());
    j["x"] = std::vector<double>(r.x.data(), r.x.data() + r.x.size());
    j["diagnostics"] = {{"converged", r.converged},
                        {"iterations", r.iterations},
                        {"log_marginal_likelihood", std::isfinite(r.log_marginal_likelihood)
                                                        ? nlohmann::ordered_json(r.log_marginal_likelihood)
                                                        : nlohmann::ordered_json(nullptr)},
                        {"lambda", r.lambda},
                        {"alpha", r.alpha},
                        {"sigma2", r.sigma2}};
    return j;
}

} // namespace co2bench
