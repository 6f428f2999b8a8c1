#include "accurt/problems.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace accurt {

namespace {

double diffusion_x(double x, double y) {
  const bool inner = x >= 0.25 && x <= 0.75 && y >= 0.25 && y <= 0.75;
  return inner ? 1000.0 : 1.0;
}

double face_value(double left, double right, FaceAverage avg) {
  if (avg == FaceAverage::arithmetic) return 0.5 * (left + right);
  return 2.0 * left * right / (left + right);
}

}  // namespace

SparseMatrix convection_diffusion_matrix(Index nx, double peclet, const ConvDiffOptions& options) {
  if (nx < 4) throw InvalidArgument("convection_diffusion_matrix: nx must be >= 4");
  if (!(peclet >= 0)) throw InvalidArgument("convection_diffusion_matrix: Pe must be >= 0");
  const Index m = nx - 2;
  const double h = 1.0 / static_cast<double>(nx - 1);
  auto coord = [h](Index i) { return static_cast<double>(i) * h; };
  auto row_of = [m](Index i, Index j) { return static_cast<int>((j - 1) * m + (i - 1)); };

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(5 * m * m));
  // Convection weight between neighbouring nodes p and q along one axis:
  // Pe h (v(p) + v(q)) / 4 after scaling by h^2.
  const double conv_scale = peclet * h / 4.0;

  for (Index j = 1; j <= m; ++j) {
    for (Index i = 1; i <= m; ++i) {
      const double x = coord(i);
      const double y = coord(j);
      const int row = row_of(i, j);
      double diagonal = 0.0;

      struct Neighbour {
        Index i, j;
        bool along_x;
        int sign;
      };
      const Neighbour neighbours[] = {
          {i - 1, j, true, -1}, {i + 1, j, true, +1}, {i, j - 1, false, -1}, {i, j + 1, false, +1}};
      for (const auto& nb : neighbours) {
        const double xn = coord(nb.i);
        const double yn = coord(nb.j);
        const bool interior = nb.i >= 1 && nb.i <= m && nb.j >= 1 && nb.j <= m;
        double off = 0.0;
        if (options.include_diffusion) {
          const double scale = nb.along_x ? 1.0 : 0.5;
          const double d = face_value(scale * diffusion_x(x, y), scale * diffusion_x(xn, yn),
                                      options.face_average);
          diagonal += d;
          off -= d;
        }
        if (options.include_convection && peclet != 0.0) {
          const double v_here = nb.along_x ? x + y : x - y;
          const double v_there = nb.along_x ? xn + yn : xn - yn;
          off += nb.sign * conv_scale * (v_here + v_there);
        }
        if (interior && off != 0.0) entries.emplace_back(row, row_of(nb.i, nb.j), off);
      }
      if (diagonal != 0.0) entries.emplace_back(row, row, diagonal);
    }
  }
  return SparseMatrix::from_triplets(m * m, entries);
}

Vector conv_diff_initial(Index nx) {
  if (nx < 4) throw InvalidArgument("conv_diff_initial: nx must be >= 4");
  const Index m = nx - 2;
  const double h = 1.0 / static_cast<double>(nx - 1);
  Vector v(m * m);
  for (Index j = 1; j <= m; ++j) {
    for (Index i = 1; i <= m; ++i) {
      v((j - 1) * m + (i - 1)) = std::sin(std::numbers::pi * static_cast<double>(i) * h) *
                                 std::sin(std::numbers::pi * static_cast<double>(j) * h);
    }
  }
  return v / v.norm();
}

double MaxwellGeometry::relative_permittivity(double x, double y, double z) const {
  const double w = specimen_half_width;
  if (std::abs(x) > w || std::abs(y) > w || std::abs(z) > w) return 1.0;
  const double r2 = void_radius * void_radius;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      for (int c = -1; c <= 1; ++c) {
        const double dx = x - void_spacing * a;
        const double dy = y - void_spacing * b;
        const double dz = z - void_spacing * c;
        if (dx * dx + dy * dy + dz * dz <= r2) return 1.0;
      }
    }
  }
  return specimen_permittivity;
}

YeeLayout::YeeLayout(Index cells_per_axis)
    : cells_(cells_per_axis),
      points_(cells_per_axis + 1),
      block_(points_ * points_ * points_) {
  if (cells_per_axis < 8 || cells_per_axis % 2 != 0) {
    throw InvalidArgument("YeeLayout: cells per axis must be even and >= 8, got " +
                          std::to_string(cells_per_axis));
  }
}

bool YeeLayout::active(Component c, Index i, Index j, Index k) const {
  const Index n = cells_;
  auto cell = [n](Index q) { return q >= 0 && q < n; };
  auto inner = [n](Index q) { return q >= 1 && q < n; };
  auto node = [n](Index q) { return q >= 0 && q <= n; };
  switch (c) {
    case Hx: return node(i) && cell(j) && cell(k);
    case Hy: return cell(i) && node(j) && cell(k);
    case Hz: return cell(i) && cell(j) && node(k);
    case Ex: return cell(i) && inner(j) && inner(k);
    case Ey: return inner(i) && cell(j) && inner(k);
    case Ez: return inner(i) && inner(j) && cell(k);
  }
  return false;
}

std::array<double, 3> YeeLayout::position(Component c, Index i, Index j, Index k,
                                          double half_width) const {
  const double h = 2.0 * half_width / static_cast<double>(cells_);
  double off[3] = {0.0, 0.0, 0.0};
  switch (c) {
    case Hx: off[1] = off[2] = 0.5; break;
    case Hy: off[0] = off[2] = 0.5; break;
    case Hz: off[0] = off[1] = 0.5; break;
    case Ex: off[0] = 0.5; break;
    case Ey: off[1] = 0.5; break;
    case Ez: off[2] = 0.5; break;
  }
  return {-half_width + (static_cast<double>(i) + off[0]) * h,
          -half_width + (static_cast<double>(j) + off[1]) * h,
          -half_width + (static_cast<double>(k) + off[2]) * h};
}

Index YeeLayout::active_count() const {
  Index count = 0;
  for (int c = 0; c < 6; ++c) {
    for (Index k = 0; k < points_; ++k) {
      for (Index j = 0; j < points_; ++j) {
        for (Index i = 0; i < points_; ++i) count += active(static_cast<Component>(c), i, j, k);
      }
    }
  }
  return count;
}

MaxwellProblem maxwell_yee_matrix(Index cells_per_axis, const MaxwellGeometry& geometry) {
  const YeeLayout layout(cells_per_axis);
  using C = YeeLayout::Component;
  const Index n = layout.cells();
  const double h = 2.0 * geometry.half_width / static_cast<double>(n);
  const double inv_h = 1.0 / h;

  Vector eps = Vector::Ones(layout.size());
  for (int c = C::Ex; c <= C::Ez; ++c) {
    const auto comp = static_cast<C>(c);
    for (Index k = 0; k <= n; ++k) {
      for (Index j = 0; j <= n; ++j) {
        for (Index i = 0; i <= n; ++i) {
          if (!layout.active(comp, i, j, k)) continue;
          const auto p = layout.position(comp, i, j, k, geometry.half_width);
          eps(layout.index(comp, i, j, k)) = geometry.relative_permittivity(p[0], p[1], p[2]);
        }
      }
    }
  }
  const double mu = 1.0;

  // Discrete curl C mapping E to H locations; the H-to-E curl is C^T.
  // Each H row gets (+/-) 1/h couplings to its four surrounding E edges.
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(8 * 3 * n * n * (n + 1)));
  auto couple = [&](C hc, Index hi, Index hj, Index hk, C ec, Index ei, Index ej, Index ek,
                    double sign) {
    if (!layout.active(ec, ei, ej, ek)) return;
    const int row = static_cast<int>(layout.index(hc, hi, hj, hk));
    const int col = static_cast<int>(layout.index(ec, ei, ej, ek));
    const double curl = sign * inv_h;
    // H' = -(1/mu) C E  ->  A_HE = C / mu;  E' = (1/eps) C^T H  ->  A_EH = -C^T / eps.
    entries.emplace_back(row, col, curl / mu);
    entries.emplace_back(col, row, -curl / eps(col));
  };

  for (Index k = 0; k <= n; ++k) {
    for (Index j = 0; j <= n; ++j) {
      for (Index i = 0; i <= n; ++i) {
        if (layout.active(C::Hx, i, j, k)) {
          // (curl E)_x = dEz/dy - dEy/dz
          couple(C::Hx, i, j, k, C::Ez, i, j + 1, k, +1.0);
          couple(C::Hx, i, j, k, C::Ez, i, j, k, -1.0);
          couple(C::Hx, i, j, k, C::Ey, i, j, k + 1, -1.0);
          couple(C::Hx, i, j, k, C::Ey, i, j, k, +1.0);
        }
        if (layout.active(C::Hy, i, j, k)) {
          // (curl E)_y = dEx/dz - dEz/dx
          couple(C::Hy, i, j, k, C::Ex, i, j, k + 1, +1.0);
          couple(C::Hy, i, j, k, C::Ex, i, j, k, -1.0);
          couple(C::Hy, i, j, k, C::Ez, i + 1, j, k, -1.0);
          couple(C::Hy, i, j, k, C::Ez, i, j, k, +1.0);
        }
        if (layout.active(C::Hz, i, j, k)) {
          // (curl E)_z = dEy/dx - dEx/dy
          couple(C::Hz, i, j, k, C::Ey, i + 1, j, k, +1.0);
          couple(C::Hz, i, j, k, C::Ey, i, j, k, -1.0);
          couple(C::Hz, i, j, k, C::Ex, i, j + 1, k, -1.0);
          couple(C::Hz, i, j, k, C::Ex, i, j, k, +1.0);
        }
      }
    }
  }

  MaxwellProblem problem;
  problem.a = SparseMatrix::from_triplets(layout.size(), entries);
  problem.scaling.resize(layout.size());
  for (Index q = 0; q < layout.size(); ++q) {
    problem.scaling(q) = q < 3 * (layout.size() / 6) ? 1.0 / std::sqrt(mu) : 1.0 / std::sqrt(eps(q));
  }
  return problem;
}

Vector maxwell_initial(Index cells_per_axis) {
  const YeeLayout layout(cells_per_axis);
  using C = YeeLayout::Component;
  const Index c = cells_per_axis / 2;
  Vector v = Vector::Zero(layout.size());
  v(layout.index(C::Ex, c - 1, c, c)) = 1.0;
  v(layout.index(C::Ex, c, c, c)) = 1.0;
  v(layout.index(C::Ey, c, c - 1, c)) = 1.0;
  v(layout.index(C::Ey, c, c, c)) = 1.0;
  return v / v.norm();
}

}  // namespace accurt
