#include "pickmix/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "pickmix/errors.hpp"
#include "pickmix/parallel.hpp"

namespace pickmix {

namespace {

constexpr int kMaxHalvings = 20;

// Points are stored as columns (dim x n) inside this file.
using Points = Eigen::MatrixXd;

void check_positive_offdiag(const DistanceMatrix& D) {
    const auto n = D.d.rows();
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < j; ++i)
            if (!(D.d(i, j) > 0.0))
                throw SingularError("zero distance between rows " + std::to_string(i) + " and " +
                                    std::to_string(j) + "; collapse duplicates first");
}

double stress_cols(const Eigen::MatrixXd& D, const Points& X, double inv_total) {
    const auto n = X.cols();
    double sum = 0.0;
    for (Eigen::Index j = 1; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double emb = (X.col(i) - X.col(j)).norm();
            const double diff = D(i, j) - emb;
            sum += diff * diff / D(i, j);
        }
    }
    return sum * inv_total;
}

Points gradient_cols(const Eigen::MatrixXd& D, const Points& X, double inv_total) {
    const auto n = X.cols();
    Points G = Points::Zero(X.rows(), n);
    for (Eigen::Index j = 1; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const Eigen::VectorXd delta = X.col(i) - X.col(j);
            const double emb = delta.norm();
            if (emb == 0.0) continue;
            const double coef = -2.0 * inv_total * (D(i, j) - emb) / (D(i, j) * emb);
            G.col(i) += coef * delta;
            G.col(j) -= coef * delta;
        }
    }
    return G;
}

double inverse_total(const Eigen::MatrixXd& D) {
    double total = 0.0;
    const auto n = D.rows();
    for (Eigen::Index j = 1; j < n; ++j)
        for (Eigen::Index i = 0; i < j; ++i) total += D(i, j);
    return 1.0 / total;
}

struct DescentResult {
    Points x;
    std::vector<double> trace;
    int iterations = 0;
    bool converged = false;
};

// Preconditioned gradient descent: direction -(scale_i * grad_i) per point,
// trial step cfg.step_factor halved until the objective strictly decreases.
template <typename Objective, typename Gradient>
DescentResult descend(Points x, Objective&& f, Gradient&& grad, const Eigen::VectorXd& point_scale,
                      const SammonConfig& cfg) {
    DescentResult r;
    double fx = f(x);
    r.trace.push_back(fx);
    for (int it = 0; it < cfg.max_iters; ++it) {
        if (fx == 0.0) {
            r.converged = true;
            break;
        }
        Points dir = -grad(x);
        for (Eigen::Index c = 0; c < dir.cols(); ++c) dir.col(c) *= point_scale(c);
        if (dir.squaredNorm() == 0.0) {
            r.converged = true;
            break;
        }
        double step = cfg.step_factor;
        bool accepted = false;
        Points trial;
        double f_trial = fx;
        for (int h = 0; h <= kMaxHalvings; ++h, step *= 0.5) {
            trial = x + step * dir;
            f_trial = f(trial);
            if (f_trial < fx) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            r.converged = true;  // no representable descent left
            break;
        }
        const double rel = (fx - f_trial) / fx;
        x = std::move(trial);
        fx = f_trial;
        r.trace.push_back(fx);
        ++r.iterations;
        if (rel < cfg.rel_tol) {
            r.converged = true;
            break;
        }
    }
    r.x = std::move(x);
    return r;
}

double median_positive(std::vector<double> values) {
    values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !(v > 0.0); }),
                 values.end());
    if (values.empty()) return 0.0;
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

// Separates points that classical MDS placed on top of each other.
void jitter_coincident(Points& X) {
    const auto n = X.cols();
    const double rms = rms_pairwise_distance(X.transpose());
    const double unit = 1e-9 * (rms > 0.0 ? rms : 1.0);
    for (Eigen::Index j = 1; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            if ((X.col(i) - X.col(j)).norm() <= 1e-12 * unit) {
                X(0, j) += unit * double(j + 1);
                break;
            }
        }
    }
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }
    std::uint32_t find(std::uint32_t a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;  // root is always the group minimum
    }

private:
    std::vector<std::uint32_t> parent_;
};

}  // namespace

void SammonConfig::validate() const {
    if (dim < 1) throw ConfigError("manifold dim must be positive");
    if (max_iters < 1) throw ConfigError("max_iters must be positive");
    if (!(step_factor > 0.0)) throw ConfigError("step_factor must be positive");
    if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be positive");
    if (!(floor_factor > 0.0)) throw ConfigError("floor_factor must be positive");
}

std::size_t PartManifold::duplicate_count() const {
    std::size_t dup = 0;
    for (std::size_t i = 0; i < duplicate_map.size(); ++i)
        if (duplicate_map[i] != i) ++dup;
    return dup;
}

DistanceMatrix build_distance_matrix(std::span<const LightFieldDescriptor> descriptors) {
    const auto n = descriptors.size();
    if (n < 2) throw SizeError("need at least 2 shapes, got " + std::to_string(n));
    DistanceMatrix D{Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n))};
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j)
            D.d(Eigen::Index(i), Eigen::Index(j)) = shape_distance(descriptors[i], descriptors[j]);
    });
    for (Eigen::Index i = 0; i < Eigen::Index(n); ++i)
        for (Eigen::Index j = i + 1; j < Eigen::Index(n); ++j) D.d(j, i) = D.d(i, j);
    return D;
}

double collapse_floor(const DistanceMatrix& D, double floor_factor) {
    std::vector<double> upper;
    const auto n = D.d.rows();
    upper.reserve(std::size_t(n * (n - 1) / 2));
    for (Eigen::Index j = 1; j < n; ++j)
        for (Eigen::Index i = 0; i < j; ++i) upper.push_back(D.d(i, j));
    return floor_factor * median_positive(std::move(upper));
}

CollapsedDistances collapse_duplicates(const DistanceMatrix& D, double floor) {
    const auto n = D.n();
    UnionFind uf(n);
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (D(i, j) < floor || D(i, j) == 0.0)
                uf.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));

    CollapsedDistances out;
    out.representative.resize(n);
    out.reduced_row.resize(n);
    std::vector<std::uint32_t> reps;
    for (std::uint32_t i = 0; i < n; ++i) {
        out.representative[i] = uf.find(i);
        if (out.representative[i] == i) reps.push_back(i);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        auto it = std::lower_bound(reps.begin(), reps.end(), out.representative[i]);
        out.reduced_row[i] = static_cast<std::uint32_t>(it - reps.begin());
    }
    const auto m = Eigen::Index(reps.size());
    out.reduced.d.resize(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b) out.reduced.d(a, b) = D(reps[a], reps[b]);
    return out;
}

double sammon_stress(const DistanceMatrix& D, const Eigen::MatrixXd& coords) {
    if (Eigen::Index(D.n()) != coords.rows())
        throw DimensionError("coords rows do not match distance matrix size");
    check_positive_offdiag(D);
    const Points X = coords.transpose();
    return stress_cols(D.d, X, inverse_total(D.d));
}

Eigen::MatrixXd sammon_gradient(const DistanceMatrix& D, const Eigen::MatrixXd& coords) {
    if (Eigen::Index(D.n()) != coords.rows())
        throw DimensionError("coords rows do not match distance matrix size");
    check_positive_offdiag(D);
    const Points X = coords.transpose();
    return gradient_cols(D.d, X, inverse_total(D.d)).transpose();
}

Eigen::MatrixXd classical_mds(const DistanceMatrix& D, int dim) {
    const auto n = D.d.rows();
    const Eigen::MatrixXd sq = D.d.array().square().matrix();
    const Eigen::MatrixXd J =
        Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / double(n));
    const Eigen::MatrixXd B = -0.5 * J * sq * J;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
    if (solver.info() != Eigen::Success) throw SingularError("eigendecomposition failed");

    Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(n, dim);
    const Eigen::Index usable = std::min<Eigen::Index>(dim, n);
    for (Eigen::Index k = 0; k < usable; ++k) {
        const Eigen::Index src = n - 1 - k;  // eigenvalues ascend
        const double lambda = std::max(solver.eigenvalues()(src), 0.0);
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        coords.col(k) = v * std::sqrt(lambda);
    }
    return coords;
}

double rms_pairwise_distance(const Eigen::MatrixXd& coords) {
    const auto n = coords.rows();
    if (n < 2) return 0.0;
    const Points X = coords.transpose();
    double ss = 0.0;
    for (Eigen::Index j = 1; j < n; ++j)
        for (Eigen::Index i = 0; i < j; ++i) ss += (X.col(i) - X.col(j)).squaredNorm();
    return std::sqrt(ss / (double(n) * double(n - 1) / 2.0));
}

PartManifold normalize_manifold(PartManifold m) {
    if (m.coords.rows() < 2) throw SizeError("normalization needs at least 2 points");
    const double rms = rms_pairwise_distance(m.coords);
    if (!(rms > 0.0)) throw DegenerateError("all embedded points coincide");
    m.coords /= rms;
    m.scale *= rms;
    return m;
}

PartManifold build_manifold(const DistanceMatrix& D, const SammonConfig& cfg, std::string part) {
    cfg.validate();
    const auto n = D.n();
    if (n < 2) throw SizeError("need at least 2 shapes, got " + std::to_string(n));

    const auto collapsed = collapse_duplicates(D, collapse_floor(D, cfg.floor_factor));
    const auto& R = collapsed.reduced;
    const auto m = R.d.rows();

    PartManifold out;
    out.part = std::move(part);
    out.dim = cfg.dim;
    out.duplicate_map = collapsed.representative;

    if (m == 1) {
        // Every shape is the same point (e.g. a part no shape has).
        out.coords = Eigen::MatrixXd::Zero(Eigen::Index(n), cfg.dim);
        out.stress = 0.0;
        out.stress_trace = {0.0};
        return out;
    }

    Points X = classical_mds(R, cfg.dim).transpose();
    jitter_coincident(X);

    const double inv_total = inverse_total(R.d);
    Eigen::VectorXd point_scale(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < m; ++j)
            if (j != i) s += 1.0 / R.d(i, j);
        point_scale(i) = 1.0 / (2.0 * inv_total * s);
    }

    auto result = descend(
        std::move(X), [&](const Points& P) { return stress_cols(R.d, P, inv_total); },
        [&](const Points& P) { return gradient_cols(R.d, P, inv_total); }, point_scale, cfg);

    out.stress = result.trace.back();
    out.stress_trace = std::move(result.trace);
    out.iterations = result.iterations;
    out.converged = result.converged;

    out.coords.resize(Eigen::Index(n), cfg.dim);
    for (std::size_t s = 0; s < n; ++s)
        out.coords.row(Eigen::Index(s)) = result.x.col(collapsed.reduced_row[s]).transpose();
    return normalize_manifold(std::move(out));
}

double out_of_sample_objective(const PartManifold& m, std::span<const double> normalized_dists,
                               const Eigen::VectorXd& x, double floor) {
    double f = 0.0;
    for (Eigen::Index i = 0; i < m.coords.rows(); ++i) {
        const double delta = normalized_dists[std::size_t(i)];
        const double emb = (x - m.coords.row(i).transpose()).norm();
        f += (delta - emb) * (delta - emb) / std::max(delta, floor);
    }
    return f;
}

Eigen::VectorXd out_of_sample_embed(const PartManifold& m, std::span<const double> dists,
                                    const SammonConfig& cfg) {
    const auto n = m.coords.rows();
    if (n == 0) throw EmptyManifoldError("manifold '" + m.part + "' has no points");
    if (dists.size() != std::size_t(n))
        throw DimensionError("expected " + std::to_string(n) + " distances, got " +
                             std::to_string(dists.size()));

    std::vector<double> delta(dists.begin(), dists.end());
    for (auto& d : delta) {
        if (!(d >= 0.0)) throw DimensionError("distances must be non-negative");
        d /= m.scale;
    }
    double floor = cfg.floor_factor * median_positive(delta);
    if (!(floor > 0.0)) floor = 1.0;

    std::vector<double> weight(delta.size());
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        weight[i] = 1.0 / std::max(delta[i], floor);
        weight_sum += weight[i];
    }

    // Two starts: the least-squares classical MDS placement and the closest
    // anchor displaced by its target distance along axis 0.
    const Eigen::RowVectorXd mean = m.coords.colwise().mean();
    const Eigen::MatrixXd centered = m.coords.rowwise() - mean;
    double mean_sq_delta = 0.0;
    double mean_sq_radius = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        mean_sq_delta += delta[std::size_t(i)] * delta[std::size_t(i)];
        mean_sq_radius += centered.row(i).squaredNorm();
    }
    mean_sq_delta /= double(n);
    mean_sq_radius /= double(n);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i)
        rhs(i) = 0.5 * (centered.row(i).squaredNorm() - mean_sq_radius -
                        delta[std::size_t(i)] * delta[std::size_t(i)] + mean_sq_delta);
    Points gower = (centered.completeOrthogonalDecomposition().solve(rhs) + mean.transpose());

    const auto best = std::size_t(std::min_element(delta.begin(), delta.end()) - delta.begin());
    Points anchor = m.coords.row(Eigen::Index(best)).transpose();
    anchor(0, 0) += delta[best];

    const Eigen::MatrixXd Y = m.coords.transpose();
    auto objective = [&](const Points& x) {
        double f = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double emb = (x.col(0) - Y.col(i)).norm();
            const double r = delta[std::size_t(i)] - emb;
            f += r * r * weight[std::size_t(i)];
        }
        return f;
    };
    auto gradient = [&](const Points& x) {
        Points g = Points::Zero(x.rows(), 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::VectorXd diff = x.col(0) - Y.col(i);
            const double emb = diff.norm();
            if (emb == 0.0) continue;
            g.col(0) += -2.0 * weight[std::size_t(i)] * (delta[std::size_t(i)] - emb) / emb * diff;
        }
        return g;
    };
    Eigen::VectorXd scale(1);
    scale(0) = 1.0 / (2.0 * weight_sum);
    auto from_gower = descend(std::move(gower), objective, gradient, scale, cfg);
    auto from_anchor = descend(std::move(anchor), objective, gradient, scale, cfg);
    return objective(from_anchor.x) < objective(from_gower.x) ? from_anchor.x.col(0)
                                                              : from_gower.x.col(0);
}

Eigen::MatrixXd project_2d(const PartManifold& m) {
    const auto n = m.coords.rows();
    if (n < 3) throw SizeError("2D projection needs at least 3 points");
    const Eigen::RowVectorXd mean = m.coords.colwise().mean();
    const Eigen::MatrixXd centered = m.coords.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, 2);
    const auto d = cov.rows();
    for (Eigen::Index k = 0; k < std::min<Eigen::Index>(2, d); ++k) {
        Eigen::VectorXd axis = solver.eigenvectors().col(d - 1 - k);
        Eigen::Index arg = 0;
        axis.cwiseAbs().maxCoeff(&arg);
        if (axis(arg) < 0.0) axis = -axis;
        out.col(k) = centered * axis;
    }
    return out;
}

}  // namespace pickmix
