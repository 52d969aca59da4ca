#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pickmix/descriptor.hpp"

namespace pickmix {

/// Symmetric, non-negative, zero diagonal.
struct DistanceMatrix {
    Eigen::MatrixXd d;

    std::size_t n() const { return static_cast<std::size_t>(d.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
};

struct SammonConfig {
    int dim = 128;
    int max_iters = 500;
    double step_factor = 0.3;
    double rel_tol = 1e-7;
    /// Collapse floor as a fraction of the median positive distance.
    double floor_factor = 1e-9;
    /// Carried in the index fingerprint; no stage currently draws from it.
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const SammonConfig&) const = default;
};

struct PartManifold {
    std::string part;
    int dim = 0;
    /// One row per shape; duplicates share bit-identical rows.
    Eigen::MatrixXd coords;
    /// Divisor taking original descriptor distances into these coordinates.
    double scale = 1.0;
    /// Shape index -> index of its duplicate group's representative.
    std::vector<std::uint32_t> duplicate_map;
    double stress = 0.0;
    std::vector<double> stress_trace;
    int iterations = 0;
    bool converged = true;

    std::size_t size() const { return static_cast<std::size_t>(coords.rows()); }
    std::size_t duplicate_count() const;
};

/// Throws SizeError for fewer than two descriptors.
DistanceMatrix build_distance_matrix(std::span<const LightFieldDescriptor> descriptors);

struct CollapsedDistances {
    DistanceMatrix reduced;
    /// Original index -> original index of its group representative (group minimum).
    std::vector<std::uint32_t> representative;
    /// Original index -> row in `reduced`.
    std::vector<std::uint32_t> reduced_row;
};

/// floor_factor times the median positive off-diagonal entry (0 when none is positive).
double collapse_floor(const DistanceMatrix& D, double floor_factor);

/// Union-find over pairs closer than `floor`. Zero distances always merge.
CollapsedDistances collapse_duplicates(const DistanceMatrix& D, double floor);

/// Sammon error: (1/sum_{i<j} D) * sum_{i<j} (D - D')^2 / D.
/// Throws SingularError on a non-positive off-diagonal D entry.
double sammon_stress(const DistanceMatrix& D, const Eigen::MatrixXd& coords);

/// Exact gradient of sammon_stress. Pairs embedded at the same point
/// contribute zero (a valid subgradient).
Eigen::MatrixXd sammon_gradient(const DistanceMatrix& D, const Eigen::MatrixXd& coords);

/// Top-`dim` classical MDS coordinates (negative eigenvalues clamped to zero).
Eigen::MatrixXd classical_mds(const DistanceMatrix& D, int dim);

/// Collapse duplicates, initialize by classical MDS, minimize the Sammon
/// error by preconditioned gradient descent with backtracking, re-expand and
/// normalize. Non-convergence within max_iters is reported via `converged`.
PartManifold build_manifold(const DistanceMatrix& D, const SammonConfig& cfg,
                            std::string part = {});

double rms_pairwise_distance(const Eigen::MatrixXd& coords);

/// Divides coordinates by their RMS pairwise distance and folds the divisor into `scale`.
PartManifold normalize_manifold(PartManifold m);

/// Objective minimized by out_of_sample_embed, in normalized units.
double out_of_sample_objective(const PartManifold& m, std::span<const double> normalized_dists,
                               const Eigen::VectorXd& x, double floor);

/// Places a new point from its original-space distances to every manifold row.
/// Distances are divided by m.scale internally.
Eigen::VectorXd out_of_sample_embed(const PartManifold& m, std::span<const double> dists,
                                    const SammonConfig& cfg);

/// PCA onto the top two principal axes; each axis is signed so that its
/// largest-magnitude loading is positive. Throws SizeError for n < 3.
Eigen::MatrixXd project_2d(const PartManifold& m);

}  // namespace pickmix
