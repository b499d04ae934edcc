// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#include "faceanim/frame.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace faceanim {

namespace {

Eigen::Vector3d centroid_of(const std::vector<Eigen::Vector3d>& points) {
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (const auto& p : points) c += p;
    return c / static_cast<double>(points.size());
}

double bounding_box_diagonal(const std::vector<Eigen::Vector3d>& points) {
    Eigen::Vector3d lo = points.front();
    Eigen::Vector3d hi = points.front();
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
}

void check_finite(const FeaturePointFrame& frame) {
    for (const auto& p : frame.points) {
        if (!p.allFinite()) throw DegenerateFrame("frame contains non-finite coordinates");
    }
}

} // namespace

Eigen::VectorXd flatten_points(const std::vector<Eigen::Vector3d>& points) {
    Eigen::VectorXd out(3 * static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.segment<3>(3 * static_cast<Eigen::Index>(i)) = points[i];
    }
    return out;
}

std::vector<Eigen::Vector3d> unflatten_points(const Eigen::VectorXd& coords) {
    if (coords.size() % 3 != 0) {
        throw DimensionMismatch("coordinate vector length is not a multiple of 3");
    }
    std::vector<Eigen::Vector3d> points(static_cast<std::size_t>(coords.size() / 3));
    for (std::size_t i = 0; i < points.size(); ++i) {
        points[i] = coords.segment<3>(3 * static_cast<Eigen::Index>(i));
    }
    return points;
}

Normalizer make_normalizer(const FeaturePointFrame& neutral, bool remove_rotation) {
    if (neutral.points.empty()) throw DegenerateFrame("neutral frame has no points");
    check_finite(neutral);
    Normalizer norm;
    norm.reference_centroid = centroid_of(neutral.points);
    norm.reference_scale = bounding_box_diagonal(neutral.points);
    if (!(norm.reference_scale > 0.0)) {
        throw DegenerateFrame("neutral frame points coincide; scale undefined");
    }
    norm.remove_rotation = remove_rotation;
    norm.reference_shape.resize(3, static_cast<Eigen::Index>(neutral.points.size()));
    for (std::size_t i = 0; i < neutral.points.size(); ++i) {
        norm.reference_shape.col(static_cast<Eigen::Index>(i)) =
            (neutral.points[i] - norm.reference_centroid) / norm.reference_scale;
    }
    return norm;
}

NormalizedFrame normalize_frame(const Normalizer& norm, const FeaturePointFrame& frame) {
    if (static_cast<Eigen::Index>(frame.points.size()) != norm.reference_shape.cols()) {
        throw DimensionMismatch("frame has " + std::to_string(frame.points.size()) +
                                " points, normalizer expects " +
                                std::to_string(norm.reference_shape.cols()));
    }
    check_finite(frame);

    NormalizedFrame result;
    result.pose.centroid = centroid_of(frame.points);

    Eigen::Matrix3Xd Q(3, static_cast<Eigen::Index>(frame.points.size()));
    double max_spread = 0.0;
    for (std::size_t i = 0; i < frame.points.size(); ++i) {
        const Eigen::Vector3d q = frame.points[i] - result.pose.centroid;
        max_spread = std::max(max_spread, q.norm());
        Q.col(static_cast<Eigen::Index>(i)) = q / norm.reference_scale;
    }
    if (max_spread < 1e-14 * norm.reference_scale) {
        throw DegenerateFrame("all frame points coincide");
    }

    if (norm.remove_rotation) {
        // Orthogonal Procrustes: rotation minimizing ||R Q - reference||_F.
        const Eigen::Matrix3d M = norm.reference_shape * Q.transpose();
        Eigen::JacobiSVD<Eigen::Matrix3d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::Matrix3d R = svd.matrixU() * svd.matrixV().transpose();
        if (R.determinant() < 0.0) {
            Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
            flip(2, 2) = -1.0;
            R = svd.matrixU() * flip * svd.matrixV().transpose();
        }
        result.pose.rotation = R;
        Q = R * Q;
    }

    result.coords.resize(3 * Q.cols());
    for (Eigen::Index i = 0; i < Q.cols(); ++i) {
        result.coords.segment<3>(3 * i) = Q.col(i);
    }
    return result;
}

FeaturePointFrame denormalize_frame(const Normalizer& norm, const Eigen::VectorXd& coords,
                                    const RemovedPose& pose, long time_index) {
    if (coords.size() % 3 != 0) {
        throw DimensionMismatch("coordinate vector length is not a multiple of 3");
    }
    FeaturePointFrame frame;
    frame.time_index = time_index;
    frame.points.resize(static_cast<std::size_t>(coords.size() / 3));
    const Eigen::Matrix3d R_inv = pose.rotation.transpose();
    for (std::size_t i = 0; i < frame.points.size(); ++i) {
        const Eigen::Vector3d v = coords.segment<3>(3 * static_cast<Eigen::Index>(i));
        frame.points[i] = R_inv * v * norm.reference_scale + pose.centroid;
    }
    return frame;
}

FeaturePointFrame denormalize_frame(const Normalizer& norm, const Eigen::VectorXd& coords,
                                    long time_index) {
    RemovedPose pose;
    pose.centroid = norm.reference_centroid;
    return denormalize_frame(norm, coords, pose, time_index);
}

} // namespace faceanim
