#pragma once

// Test operators: a 2-D convection-diffusion operator with a discontinuous
// diffusion coefficient and a 3-D lossless Maxwell (Yee) operator, together
// with their initial vectors.

#include <array>

#include "accurt/sparse_matrix.hpp"

namespace accurt {

/// Face value of a diffusion coefficient between two grid nodes.
enum class FaceAverage { arithmetic, harmonic };

struct ConvDiffOptions {
  FaceAverage face_average = FaceAverage::arithmetic;
  bool include_diffusion = true;
  bool include_convection = true;
};

/// Five-point central differences for
///   L[u] = -(D1 u_x)_x - (D2 u_y)_y + Pe (1/2 (v1 u_x + v2 u_y) + 1/2 ((v1 u)_x + (v2 u)_y))
/// on the unit square with u = 0 on the boundary, D1 = 1000 on [0.25, 0.75]^2
/// and 1 elsewhere, D2 = D1 / 2, v1 = x + y, v2 = x - y.
///
/// `nx` counts grid points per axis including the two boundary points, so the
/// matrix has (nx - 2)^2 rows, ordered with x fastest. The operator is scaled
/// by h^2 (h = 1 / (nx - 1)), i.e. the matrix holds the stencil weights in grid
/// units. The split form of the convection term gives an exactly
/// skew-symmetric contribution.
SparseMatrix convection_diffusion_matrix(Index nx, double peclet,
                                         const ConvDiffOptions& options = {});

/// sin(pi x) sin(pi y) on the interior nodes, normalized to unit 2-norm.
Vector conv_diff_initial(Index nx);

/// Geometry of the Maxwell test: a cube [-6.05, 6.05]^3 of air holding a
/// dielectric block [-4.55, 4.55]^3 with relative permittivity 5, perforated
/// by 27 spherical air voids of radius 1.4 centred at 3.03 (i, j, k),
/// i, j, k in {-1, 0, 1}. Permeability is 1 everywhere.
struct MaxwellGeometry {
  double half_width = 6.05;
  double specimen_half_width = 4.55;
  double specimen_permittivity = 5.0;
  double void_radius = 1.4;
  double void_spacing = 3.03;

  double relative_permittivity(double x, double y, double z) const;
};

/// Index map of the Yee unknowns for a cube of N cells per axis. Each of the
/// six field components Hx, Hy, Hz, Ex, Ey, Ez owns one slot per grid vertex
/// index (i, j, k) in [0, N]^3, giving 6 (N + 1)^3 unknowns; H comes first,
/// then E, each component block ordered with i fastest. Slots that do not
/// correspond to an edge or face inside the cube, and tangential E on the
/// perfectly conducting boundary, are inert: their rows and columns are zero.
class YeeLayout {
 public:
  enum Component { Hx = 0, Hy, Hz, Ex, Ey, Ez };

  explicit YeeLayout(Index cells_per_axis);

  Index cells() const { return cells_; }
  Index size() const { return 6 * block_; }
  Index index(Component c, Index i, Index j, Index k) const {
    return c * block_ + i + points_ * (j + points_ * k);
  }
  /// Whether slot (c, i, j, k) is a live unknown of the PEC problem.
  bool active(Component c, Index i, Index j, Index k) const;
  /// Position of the slot's edge or face midpoint in physical coordinates.
  std::array<double, 3> position(Component c, Index i, Index j, Index k,
                                 double half_width) const;
  Index active_count() const;

 private:
  Index cells_;
  Index points_;
  Index block_;
};

struct MaxwellProblem {
  SparseMatrix a;
  /// Diagonal D with D^{-1} A D skew-symmetric: 1/sqrt(mu) on H slots,
  /// 1/sqrt(eps) on E slots.
  Vector scaling;
};

/// Semi-discrete lossless Maxwell system y' = -A y on the Yee grid, with
/// H' = -curl E / mu and E' = curl H / eps. Permittivity is sampled at the
/// E edge midpoints. `cells_per_axis` must be even and >= 8.
MaxwellProblem maxwell_yee_matrix(Index cells_per_axis,
                                  const MaxwellGeometry& geometry = {});

/// Unit vector that is nonzero only on the four Ex and Ey edges touching the
/// centre vertex of the cube.
Vector maxwell_initial(Index cells_per_axis);

}  // namespace accurt
