#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace dgpcl {

// Raised when the input is affinely degenerate or a point sits exactly on a
// facet plane; callers may perturb and retry.
struct DegenerateHull : std::runtime_error {
  explicit DegenerateHull(const std::string& what) : std::runtime_error(what) {}
};

struct HullFacet {
  std::vector<int> vertices;
  Eigen::VectorXd normal;
  double offset;
};

namespace hull_detail {

// Unit normal of the affine span of (v1-v0, ..., v_{m-1}-v0) in R^m; the
// span must have rank m-1.
inline Eigen::VectorXd facet_normal(const Eigen::MatrixXd& pts, const std::vector<int>& verts,
                                    double tol) {
  const Eigen::Index m = pts.cols();
  const Eigen::Index k = static_cast<Eigen::Index>(verts.size()) - 1;
  if (k == 0) {
    Eigen::VectorXd n = Eigen::VectorXd::Zero(m);
    n(0) = 1.0;
    return n;
  }
  Eigen::MatrixXd a(m, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    a.col(j) = (pts.row(verts[static_cast<std::size_t>(j + 1)]) -
                pts.row(verts[0])).transpose();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (std::abs(r(j, j)) < tol) throw DegenerateHull("degenerate facet: rank-deficient span");
  }
  const Eigen::MatrixXd q = qr.householderQ();
  return q.col(m - 1);
}

struct Facet {
  std::vector<int> vertices;       // sorted, m of them
  Eigen::VectorXd normal;          // unit, outward
  double offset;                   // normal . x = offset on the plane
  std::vector<int> neighbors;      // facet ids across each ridge
  std::vector<int> conflicts;      // points strictly above
  bool alive = true;
};

inline double signed_dist(const Facet& f, const Eigen::VectorXd& p) {
  return f.normal.dot(p) - f.offset;
}

}  // namespace hull_detail

// Convex hull of n points in R^m by incremental insertion with conflict
// lists. Exact coplanarity (within tol relative to the data scale) raises
// DegenerateHull rather than guessing an orientation.
inline std::vector<HullFacet> convex_hull(const Eigen::MatrixXd& pts) {
  using hull_detail::Facet;
  const Eigen::Index n = pts.rows();
  const Eigen::Index m = pts.cols();
  if (m < 1) throw std::invalid_argument("convex_hull: need at least 1 dimension");
  if (n < m + 1) throw DegenerateHull("convex_hull: need at least m+1 points");

  const double scale = std::max(1.0, pts.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;

  // Initial simplex: greedily extend with the point farthest from the
  // current affine subspace (distance via orthogonalized basis).
  std::vector<int> init;
  init.push_back(0);
  Eigen::MatrixXd basis(m, 0);
  while (static_cast<Eigen::Index>(init.size()) < m + 1) {
    const Eigen::VectorXd origin = pts.row(init[0]).transpose();
    double best_dist = -1.0;
    int best = -1;
    for (int i = 0; i < n; ++i) {
      if (std::find(init.begin(), init.end(), i) != init.end()) continue;
      Eigen::VectorXd v = pts.row(i).transpose() - origin;
      v -= basis * (basis.transpose() * v);
      const double dist = v.norm();
      if (dist > best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    if (best < 0 || best_dist < tol * 10.0)
      throw DegenerateHull("convex_hull: points do not affinely span the space");
    init.push_back(best);
    Eigen::VectorXd v = pts.row(best).transpose() - origin;
    v -= basis * (basis.transpose() * v);
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = v / v.norm();
  }

  Eigen::VectorXd interior = Eigen::VectorXd::Zero(m);
  for (int v : init) interior += pts.row(v).transpose();
  interior /= static_cast<double>(init.size());

  std::vector<Facet> facets;
  auto make_facet = [&](std::vector<int> verts) {
    std::sort(verts.begin(), verts.end());
    Facet f;
    f.vertices = std::move(verts);
    f.normal = hull_detail::facet_normal(pts, f.vertices, tol);
    f.offset = f.normal.dot(pts.row(f.vertices[0]).transpose());
    const double d_int = hull_detail::signed_dist(f, interior);
    if (std::abs(d_int) < tol)
      throw DegenerateHull("convex_hull: interior point on facet plane");
    if (d_int > 0.0) {
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
    f.neighbors.assign(f.vertices.size(), -1);
    return f;
  };

  // Ridge key: the facet's vertices minus one. Neighbor slot i corresponds
  // to dropping vertices[i].
  using Ridge = std::vector<int>;
  std::map<Ridge, std::pair<int, int>> ridge_owner;  // facet id, slot
  auto link_ridges = [&](int fid) {
    Facet& f = facets[static_cast<std::size_t>(fid)];
    for (std::size_t i = 0; i < f.vertices.size(); ++i) {
      Ridge r;
      r.reserve(f.vertices.size() - 1);
      for (std::size_t j = 0; j < f.vertices.size(); ++j) {
        if (j != i) r.push_back(f.vertices[j]);
      }
      auto it = ridge_owner.find(r);
      if (it == ridge_owner.end()) {
        ridge_owner.emplace(std::move(r), std::make_pair(fid, static_cast<int>(i)));
      } else {
        const auto [ofid, oslot] = it->second;
        f.neighbors[i] = ofid;
        facets[static_cast<std::size_t>(ofid)].neighbors[static_cast<std::size_t>(oslot)] = fid;
        ridge_owner.erase(it);
      }
    }
  };

  for (std::size_t drop = 0; drop < init.size(); ++drop) {
    std::vector<int> verts;
    for (std::size_t i = 0; i < init.size(); ++i) {
      if (i != drop) verts.push_back(init[i]);
    }
    facets.push_back(make_facet(std::move(verts)));
    link_ridges(static_cast<int>(facets.size()) - 1);
  }
  if (!ridge_owner.empty()) throw std::logic_error("convex_hull: unmatched initial ridges");

  // Conflict assignment; coplanar outside points are degeneracies.
  for (int p = 0; p < n; ++p) {
    if (std::find(init.begin(), init.end(), p) != init.end()) continue;
    double best = -std::numeric_limits<double>::infinity();
    int best_f = -1;
    for (std::size_t fid = 0; fid < facets.size(); ++fid) {
      const double dist = hull_detail::signed_dist(facets[fid], pts.row(p).transpose());
      if (dist > best) {
        best = dist;
        best_f = static_cast<int>(fid);
      }
    }
    if (best > tol) {
      facets[static_cast<std::size_t>(best_f)].conflicts.push_back(p);
    } else if (best > -tol) {
      throw DegenerateHull("convex_hull: point on hull boundary (coplanar)");
    }
  }

  std::vector<int> pending;
  for (std::size_t fid = 0; fid < facets.size(); ++fid) {
    if (!facets[fid].conflicts.empty()) pending.push_back(static_cast<int>(fid));
  }

  while (!pending.empty()) {
    const int fid = pending.back();
    pending.pop_back();
    Facet& f = facets[static_cast<std::size_t>(fid)];
    if (!f.alive || f.conflicts.empty()) continue;

    int apex = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int p : f.conflicts) {
      const double dist = hull_detail::signed_dist(f, pts.row(p).transpose());
      if (dist > best) {
        best = dist;
        apex = p;
      }
    }

    // Visible region: flood fill from fid over facets the apex sees.
    const Eigen::VectorXd apex_pt = pts.row(apex).transpose();
    std::vector<int> visible;
    std::vector<char> seen(facets.size(), 0);
    std::vector<int> stack{fid};
    seen[static_cast<std::size_t>(fid)] = 1;
    std::vector<std::pair<int, int>> horizon;  // (visible facet id, slot)
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      visible.push_back(cur);
      const Facet& cf = facets[static_cast<std::size_t>(cur)];
      for (std::size_t slot = 0; slot < cf.neighbors.size(); ++slot) {
        const int nb = cf.neighbors[slot];
        if (nb < 0) throw std::logic_error("convex_hull: missing neighbor");
        const Facet& nf = facets[static_cast<std::size_t>(nb)];
        const double dist = hull_detail::signed_dist(nf, apex_pt);
        if (dist > tol) {
          if (!seen[static_cast<std::size_t>(nb)]) {
            seen[static_cast<std::size_t>(nb)] = 1;
            stack.push_back(nb);
          }
        } else if (dist >= -tol) {
          throw DegenerateHull("convex_hull: apex coplanar with neighboring facet");
        } else {
          horizon.emplace_back(cur, static_cast<int>(slot));
        }
      }
    }

    // Pool the conflict points of the visible region before deleting it.
    std::vector<int> orphan;
    for (int vid : visible) {
      Facet& vf = facets[static_cast<std::size_t>(vid)];
      for (int p : vf.conflicts) {
        if (p != apex) orphan.push_back(p);
      }
      vf.alive = false;
      vf.conflicts.clear();
    }
    std::sort(orphan.begin(), orphan.end());
    orphan.erase(std::unique(orphan.begin(), orphan.end()), orphan.end());

    // One new facet per horizon ridge, glued to the surviving neighbor.
    std::vector<int> created;
    ridge_owner.clear();
    for (const auto& [vid, slot] : horizon) {
      const Facet& vf = facets[static_cast<std::size_t>(vid)];
      std::vector<int> verts;
      for (std::size_t j = 0; j < vf.vertices.size(); ++j) {
        if (static_cast<int>(j) != slot) verts.push_back(vf.vertices[j]);
      }
      const int outside_neighbor = vf.neighbors[static_cast<std::size_t>(slot)];
      verts.push_back(apex);
      facets.push_back(make_facet(std::move(verts)));
      const int new_id = static_cast<int>(facets.size()) - 1;
      created.push_back(new_id);

      // Glue across the horizon ridge: the slot opposite the apex in the
      // new facet borders the old outside neighbor.
      Facet& nf = facets[static_cast<std::size_t>(new_id)];
      const auto apex_pos = static_cast<std::size_t>(
          std::find(nf.vertices.begin(), nf.vertices.end(), apex) - nf.vertices.begin());
      nf.neighbors[apex_pos] = outside_neighbor;
      Facet& of = facets[static_cast<std::size_t>(outside_neighbor)];
      bool linked = false;
      for (std::size_t oslot = 0; oslot < of.neighbors.size(); ++oslot) {
        if (of.neighbors[oslot] == vid) {
          of.neighbors[oslot] = new_id;
          linked = true;
          break;
        }
      }
      if (!linked) throw std::logic_error("convex_hull: horizon glue failed");

      // Ridges among the new facets (those containing the apex) pair up
      // through the shared map.
      for (std::size_t i = 0; i < nf.vertices.size(); ++i) {
        if (nf.vertices[i] == apex) continue;
        Ridge r;
        for (std::size_t j = 0; j < nf.vertices.size(); ++j) {
          if (j != i) r.push_back(nf.vertices[j]);
        }
        auto it = ridge_owner.find(r);
        if (it == ridge_owner.end()) {
          ridge_owner.emplace(std::move(r), std::make_pair(new_id, static_cast<int>(i)));
        } else {
          const auto [ofid, oslot] = it->second;
          nf.neighbors[i] = ofid;
          facets[static_cast<std::size_t>(ofid)].neighbors[static_cast<std::size_t>(oslot)] =
              new_id;
          ridge_owner.erase(it);
        }
      }
    }
    if (!ridge_owner.empty()) throw std::logic_error("convex_hull: unmatched horizon ridges");

    // Reassign orphaned conflict points to the new facets.
    for (int p : orphan) {
      const Eigen::VectorXd pp = pts.row(p).transpose();
      double pbest = -std::numeric_limits<double>::infinity();
      int pbest_f = -1;
      for (int cid : created) {
        const double dist = hull_detail::signed_dist(facets[static_cast<std::size_t>(cid)], pp);
        if (dist > pbest) {
          pbest = dist;
          pbest_f = cid;
        }
      }
      if (pbest > tol) {
        facets[static_cast<std::size_t>(pbest_f)].conflicts.push_back(p);
      } else if (pbest > -tol) {
        throw DegenerateHull("convex_hull: point on hull boundary (coplanar)");
      }
    }
    for (int cid : created) {
      if (!facets[static_cast<std::size_t>(cid)].conflicts.empty()) pending.push_back(cid);
    }
  }

  std::vector<HullFacet> out;
  for (const Facet& f : facets) {
    if (f.alive) out.push_back({f.vertices, f.normal, f.offset});
  }

  // Containment audit: every input point must lie on or below every facet.
  // Catches conflict-list bookkeeping lapses as a retryable degeneracy.
  for (int p = 0; p < n; ++p) {
    const Eigen::VectorXd pp = pts.row(p).transpose();
    for (const HullFacet& f : out) {
      if (f.normal.dot(pp) - f.offset > 10.0 * tol)
        throw DegenerateHull("convex_hull: containment audit failed");
    }
  }
  return out;
}

}  // namespace dgpcl
