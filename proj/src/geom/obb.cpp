// Copyright 2025 The Aeroprint Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aeroprint/geom/obb.hpp"

#include <Eigen/Eigenvalues>
#include <limits>

namespace aeroprint::geom {

bool OrientedBoundingBox::contains(const Vec3& p, double slack) const {
  const Vec3 d = axes.transpose() * (p - center);
  return (d.cwiseAbs() - extents).maxCoeff() <= slack;
}

OrientedBoundingBox compute_obb(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) throw EmptyMesh("compute_obb: empty mesh");

  // Area-weighted surface covariance; falls back to vertex covariance when
  // the surface is degenerate.
  Vec3 mean = Vec3::Zero();
  double total_area = 0;
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const double a = mesh.face_area(static_cast<int>(f));
    mean += a * mesh.face_centroid(static_cast<int>(f));
    total_area += a;
  }
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  if (total_area > tol::kArea) {
    mean /= total_area;
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
      const auto& t = mesh.faces[f];
      const double a = mesh.face_area(static_cast<int>(f));
      // Exact second moment of a triangle about `mean`.
      const Vec3 p0 = mesh.vertices[t[0]] - mean;
      const Vec3 p1 = mesh.vertices[t[1]] - mean;
      const Vec3 p2 = mesh.vertices[t[2]] - mean;
      const Vec3 c = (p0 + p1 + p2) / 3.0;
      Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
      m += p0 * p0.transpose() + p1 * p1.transpose() + p2 * p2.transpose();
      m += 9.0 * c * c.transpose();
      cov += (a / 12.0) * m;
    }
  } else {
    mean = Vec3::Zero();
    for (const auto& v : mesh.vertices) mean += v;
    mean /= static_cast<double>(mesh.vertices.size());
    for (const auto& v : mesh.vertices) cov += (v - mean) * (v - mean).transpose();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  Eigen::Matrix3d axes = eig.eigenvectors();
  if (axes.determinant() < 0) axes.col(0) = -axes.col(0);

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& v : mesh.vertices) {
    const Vec3 d = axes.transpose() * (v - mean);
    lo = lo.cwiseMin(d);
    hi = hi.cwiseMax(d);
  }
  OrientedBoundingBox box;
  box.axes = axes;
  box.extents = (hi - lo) / 2.0;
  box.center = mean + axes * ((hi + lo) / 2.0);
  return box;
}

}  // namespace aeroprint::geom
