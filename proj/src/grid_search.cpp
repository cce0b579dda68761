#include "hfo/grid_search.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "hfo/errors.hpp"

namespace hfo {

namespace {

std::vector<double> axis(double lo, double hi, double h) {
  std::vector<double> v;
  const auto n = static_cast<long>(std::floor((hi - lo) / h + 1e-9));
  v.reserve(static_cast<std::size_t>(n) + 2);
  for (long k = 0; k <= n; ++k) v.push_back(lo + static_cast<double>(k) * h);
  if (v.back() < hi) v.push_back(hi);
  return v;
}

struct Best {
  double value = std::numeric_limits<double>::infinity();
  long long index = -1;
};

}  // namespace

GridSearchResult grid_search_box_qp(const Mat3& M, const Vec3& b, const InputBox& box,
                                    double resolution, Exec exec) {
  if (!(resolution > 0.0)) {
    throw InvalidParameter("grid resolution must be positive");
  }
  box.validate();
  const auto g0 = axis(box.lo(0), box.hi(0), resolution);
  const auto g1 = axis(box.lo(1), box.hi(1), resolution);
  const auto g2 = axis(box.lo(2), box.hi(2), resolution);
  const auto n0 = static_cast<long long>(g0.size());
  const auto n1 = static_cast<long long>(g1.size());
  const auto n2 = static_cast<long long>(g2.size());

  // One best per outer slab, reduced in slab order afterwards.
  std::vector<Best> slab(static_cast<std::size_t>(n0));
  const auto scan = [&](long long i) {
    Best best;
    const double u0 = g0[i];
    for (long long k1 = 0; k1 < n1; ++k1) {
      const double u1 = g1[k1];
      for (long long k2 = 0; k2 < n2; ++k2) {
        const Vec3 u(u0, u1, g2[k2]);
        const double v = 0.5 * u.dot(M * u) + b.dot(u);
        if (v < best.value) {
          best.value = v;
          best.index = (i * n1 + k1) * n2 + k2;
        }
      }
    }
    slab[static_cast<std::size_t>(i)] = best;
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n0; ++i) scan(i);
  } else {
    for (long long i = 0; i < n0; ++i) scan(i);
  }

  Best best;
  for (const auto& s : slab) {
    if (s.value < best.value) best = s;
  }
  GridSearchResult r;
  r.value = best.value;
  r.evaluated = n0 * n1 * n2;
  const long long k2 = best.index % n2;
  const long long k1 = (best.index / n2) % n1;
  const long long k0 = best.index / (n1 * n2);
  r.argmin = Vec3(g0[k0], g1[k1], g2[k2]);
  return r;
}

GridSearchResult grid_search_optimal_input(const QuadObjective& obj, const Mat63& H,
                                           const Vec6& d, double resolution, Exec exec) {
  const Mat3 M = obj.Q_u + H.transpose() * obj.Q_y * H;
  const Vec3 b = H.transpose() * (obj.Q_y * (d - obj.y_hat));
  return grid_search_box_qp(M, b, obj.box, resolution, exec);
}

}  // namespace hfo
