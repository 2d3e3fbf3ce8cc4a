#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgpcl/hull.hpp"
#include "dgpcl/rng.hpp"
#include "dgpcl/testfns.hpp"

namespace dgpcl {

struct Triangulation {
  std::vector<std::vector<int>> simplices;    // d+1 vertex indices each
  std::vector<std::vector<int>> hull_facets;  // d vertex indices each
  std::vector<Eigen::VectorXd> hull_normals;  // unit, away from the hull centroid
};

namespace tricands_detail {

inline double simplex_volume(const Eigen::MatrixXd& x, const std::vector<int>& verts) {
  const Eigen::Index d = x.cols();
  Eigen::MatrixXd edges(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    edges.col(j) = (x.row(verts[static_cast<std::size_t>(j + 1)]) - x.row(verts[0])).transpose();
  }
  double fact = 1.0;
  for (Eigen::Index j = 2; j <= d; ++j) fact *= static_cast<double>(j);
  return std::abs(edges.determinant()) / fact;
}

// Boundary (d-1)-faces: faces incident to exactly one simplex are the
// convex-hull facets of the design itself.
inline void attach_boundary(Triangulation& tri, const Eigen::MatrixXd& x) {
  std::map<std::vector<int>, int> face_count;
  for (const auto& s : tri.simplices) {
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
      std::vector<int> face;
      face.reserve(s.size() - 1);
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (j != drop) face.push_back(s[j]);
      }
      ++face_count[face];
    }
  }
  const Eigen::VectorXd centroid = x.colwise().mean().transpose();
  const double tol = 1e-12 * std::max(1.0, x.cwiseAbs().maxCoeff());
  for (const auto& [face, count] : face_count) {
    if (count != 1) continue;
    Eigen::VectorXd normal = hull_detail::facet_normal(x, face, tol);
    const Eigen::VectorXd base = x.row(face[0]).transpose();
    const double side = normal.dot(centroid - base);
    if (std::abs(side) <= tol) throw DegenerateHull("delaunay: centroid on hull facet plane");
    if (side > 0.0) normal = -normal;
    tri.hull_facets.push_back(face);
    tri.hull_normals.push_back(std::move(normal));
  }
}

inline Triangulation build(const Eigen::MatrixXd& lifted, const Eigen::MatrixXd& x) {
  const Eigen::Index d = x.cols();
  Triangulation tri;
  const std::vector<HullFacet> hull = convex_hull(lifted);
  for (const HullFacet& f : hull) {
    // A Delaunay cell is a downward facet with a full-dimensional projection.
    // Walls project to zero-volume simplices; their exact normals carry zero
    // lift component, but roundoff there can reach ~1e-7 with either sign.
    if (f.normal(d) >= -1e-12) continue;
    if (simplex_volume(x, f.vertices) <= 1e-12) continue;
    tri.simplices.push_back(f.vertices);
  }
  if (tri.simplices.empty()) throw DegenerateHull("delaunay: no lower-hull facets");
  attach_boundary(tri, x);
  return tri;
}

}  // namespace tricands_detail

// Delaunay triangulation via the paraboloid lift: append sum x_h^2, take the
// convex hull one dimension up, and keep the downward-facing facets. A
// degenerate (cospherical/coplanar) configuration is retried with fresh
// deterministic jitters of the lift coordinate, escalating from 1e-9 to 1e-6,
// before giving up; clustered designs can re-trigger marginal coplanarity on
// any single draw, so one roll is not enough.
inline Triangulation delaunay(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (d < 1) throw std::invalid_argument("delaunay: need at least one dimension");
  if (d > 8)
    throw std::invalid_argument("delaunay: d = " + std::to_string(d) +
                                " exceeds the supported limit of 8 dimensions");
  if (n < d + 1)
    throw std::invalid_argument("delaunay: triangulation undefined with fewer than d+1 points");

  // Exactly d+1 points form the one simplex directly; the lifted hull below
  // needs d+2 points to span its space.
  if (n == d + 1) {
    Triangulation tri;
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    tri.simplices.push_back(std::move(all));
    if (tricands_detail::simplex_volume(x, tri.simplices[0]) <= 1e-12)
      throw std::runtime_error("delaunay: degenerate design (zero-volume simplex)");
    tricands_detail::attach_boundary(tri, x);
    return tri;
  }

  Eigen::MatrixXd lifted(n, d + 1);
  lifted.leftCols(d) = x;
  lifted.col(d) = x.rowwise().squaredNorm();

  try {
    return tricands_detail::build(lifted, x);
  } catch (const DegenerateHull&) {
    RngEngine jitter_rng(mix64(0x6a1b2c3d4e5f6071ULL));
    std::string last;
    for (double magnitude : {1e-9, 1e-8, 1e-7, 1e-6}) {
      Eigen::MatrixXd jittered = lifted;
      for (Eigen::Index i = 0; i < n; ++i) {
        jittered(i, d) += runif(jitter_rng, -magnitude, magnitude);
      }
      try {
        return tricands_detail::build(jittered, x);
      } catch (const DegenerateHull& e) {
        last = e.what();
      }
    }
    throw std::runtime_error(std::string("delaunay: degenerate design after jitter retry (") +
                             last + ")");
  }
}

enum class CandidateOrigin { internal, fringe };

struct CandidateSet {
  Eigen::MatrixXd x;
  std::vector<CandidateOrigin> origin;
  std::vector<int> source;  // simplex index (internal) or hull-facet index (fringe)

  Eigen::Index size() const { return x.rows(); }
};

inline CandidateSet internal_candidates(const Triangulation& tri, const Eigen::MatrixXd& x) {
  CandidateSet cands;
  cands.x.resize(static_cast<Eigen::Index>(tri.simplices.size()), x.cols());
  for (std::size_t j = 0; j < tri.simplices.size(); ++j) {
    Eigen::RowVectorXd bary = Eigen::RowVectorXd::Zero(x.cols());
    for (int v : tri.simplices[j]) bary += x.row(v);
    cands.x.row(static_cast<Eigen::Index>(j)) =
        bary / static_cast<double>(tri.simplices[j].size());
    cands.origin.push_back(CandidateOrigin::internal);
    cands.source.push_back(static_cast<int>(j));
  }
  return cands;
}

// Fringe candidates sit a fraction alpha of the way from each hull-facet
// midpoint to the domain boundary along the outward normal.
inline CandidateSet fringe_candidates(const Triangulation& tri, const Eigen::MatrixXd& x,
                                      double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("fringe_candidates: alpha must lie in [0,1]");
  const Eigen::Index d = x.cols();
  const Eigen::VectorXd centroid = x.colwise().mean().transpose();
  CandidateSet cands;
  cands.x.resize(static_cast<Eigen::Index>(tri.hull_facets.size()), d);
  for (std::size_t j = 0; j < tri.hull_facets.size(); ++j) {
    const std::vector<int>& face = tri.hull_facets[j];
    const Eigen::VectorXd& v = tri.hull_normals[j];
    if (std::abs(v.norm() - 1.0) > 1e-9)
      throw std::logic_error("fringe_candidates: non-unit facet normal");
    Eigen::VectorXd mid = Eigen::VectorXd::Zero(d);
    for (int idx : face) mid += x.row(idx).transpose();
    mid /= static_cast<double>(face.size());
    if (v.dot(centroid - mid) > 1e-12)
      throw std::logic_error("fringe_candidates: inward facet normal");

    // First exit of the ray mid + s*v from the unit cube.
    double s_star = std::numeric_limits<double>::infinity();
    for (Eigen::Index h = 0; h < d; ++h) {
      if (v(h) > 1e-15) s_star = std::min(s_star, (1.0 - mid(h)) / v(h));
      else if (v(h) < -1e-15) s_star = std::min(s_star, (0.0 - mid(h)) / v(h));
    }
    if (!std::isfinite(s_star)) throw std::logic_error("fringe_candidates: zero normal");
    s_star = std::max(0.0, s_star);

    Eigen::VectorXd cand = mid + alpha * s_star * v;
    cands.x.row(static_cast<Eigen::Index>(j)) =
        cand.array().max(0.0).min(1.0).matrix().transpose();
    cands.origin.push_back(CandidateOrigin::fringe);
    cands.source.push_back(static_cast<int>(j));
  }
  return cands;
}

inline CandidateSet concat(const CandidateSet& a, const CandidateSet& b) {
  CandidateSet out;
  out.x.resize(a.size() + b.size(), a.x.cols() > 0 ? a.x.cols() : b.x.cols());
  if (a.size() > 0) out.x.topRows(a.size()) = a.x;
  if (b.size() > 0) out.x.bottomRows(b.size()) = b.x;
  out.origin = a.origin;
  out.origin.insert(out.origin.end(), b.origin.begin(), b.origin.end());
  out.source = a.source;
  out.source.insert(out.source.end(), b.source.begin(), b.source.end());
  return out;
}

// Contour-targeted reduction to exactly n_max candidates. Design points are
// ranked by closeness of their response to the limit state; walking that
// ranking (cycling as needed), each point retains one random unretained
// candidate incident to it until a tenth of the budget is filled, and the
// remainder tops up uniformly at random. Candidate order is preserved.
inline CandidateSet targeted_subsample(const CandidateSet& cands, const Triangulation& tri,
                                       const Eigen::VectorXd& y, const Threshold& threshold,
                                       int n_max, RngEngine& rng) {
  if (n_max < 1) throw std::invalid_argument("targeted_subsample: n_max must be positive");
  const Eigen::Index big_n = cands.size();
  if (big_n <= n_max) return cands;

  const Eigen::Index n = y.size();
  std::vector<std::vector<int>> adjacent(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < big_n; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const std::vector<int>& verts = cands.origin[ks] == CandidateOrigin::internal
                                        ? tri.simplices[static_cast<std::size_t>(cands.source[ks])]
                                        : tri.hull_facets[static_cast<std::size_t>(cands.source[ks])];
    for (int v : verts) adjacent[static_cast<std::size_t>(v)].push_back(static_cast<int>(k));
  }

  std::vector<int> ranking(static_cast<std::size_t>(n));
  std::iota(ranking.begin(), ranking.end(), 0);
  std::sort(ranking.begin(), ranking.end(), [&](int a, int b) {
    const double da = std::abs(y(a) - threshold.g);
    const double db = std::abs(y(b) - threshold.g);
    if (da != db) return da < db;
    return a < b;
  });

  std::vector<char> retained(static_cast<std::size_t>(big_n), 0);
  const int quota = (n_max + 9) / 10;
  int collected = 0;
  bool progress = true;
  while (collected < quota && progress) {
    progress = false;
    for (int i : ranking) {
      std::vector<int> open;
      for (int k : adjacent[static_cast<std::size_t>(i)]) {
        if (!retained[static_cast<std::size_t>(k)]) open.push_back(k);
      }
      if (open.empty()) continue;
      retained[static_cast<std::size_t>(open[runif_index(rng, open.size())])] = 1;
      ++collected;
      progress = true;
      if (collected >= quota) break;
    }
  }

  std::vector<int> open_pool;
  for (Eigen::Index k = 0; k < big_n; ++k) {
    if (!retained[static_cast<std::size_t>(k)]) open_pool.push_back(static_cast<int>(k));
  }
  int fill = n_max - collected;
  for (int j = 0; j < fill; ++j) {
    const std::size_t pick =
        static_cast<std::size_t>(j) + runif_index(rng, open_pool.size() - static_cast<std::size_t>(j));
    std::swap(open_pool[static_cast<std::size_t>(j)], open_pool[pick]);
    retained[static_cast<std::size_t>(open_pool[static_cast<std::size_t>(j)])] = 1;
  }

  CandidateSet out;
  out.x.resize(n_max, cands.x.cols());
  Eigen::Index row = 0;
  for (Eigen::Index k = 0; k < big_n; ++k) {
    if (!retained[static_cast<std::size_t>(k)]) continue;
    out.x.row(row++) = cands.x.row(k);
    out.origin.push_back(cands.origin[static_cast<std::size_t>(k)]);
    out.source.push_back(cands.source[static_cast<std::size_t>(k)]);
  }
  return out;
}

}  // namespace dgpcl
