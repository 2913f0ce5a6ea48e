#include "micropolar/operators.hpp"

#include <cmath>

namespace micropolar {

namespace {

// Cell value with reflection ghosts outside [0, nx) x [0, ny).
double extended(const ScalarField& s, int i, int j, double sign) {
  const Grid& g = s.grid();
  double factor = 1.0;
  if (i < 0) {
    i = 0;
    factor *= sign;
  } else if (i >= g.nx()) {
    i = g.nx() - 1;
    factor *= sign;
  }
  if (j < 0) {
    j = 0;
    factor *= sign;
  } else if (j >= g.ny()) {
    j = g.ny() - 1;
    factor *= sign;
  }
  return factor * s(i, j);
}

double ghost_sign(Ghost ghost) { return ghost == Ghost::Dirichlet ? -1.0 : 1.0; }

}  // namespace

VectorField gradient(const ScalarField& s) {
  const Grid& g = s.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  VectorField out(g);
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) out.x(i, j) = (s(i, j) - s(i - 1, j)) / g.dx();
    out.x(0, j) = out.x(1, j);
    out.x(nx, j) = out.x(nx - 1, j);
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 1; j < ny; ++j) out.y(i, j) = (s(i, j) - s(i, j - 1)) / g.dy();
    out.y(i, 0) = out.y(i, 1);
    out.y(i, ny) = out.y(i, ny - 1);
  }
  return out;
}

VectorField gradient_interior(const ScalarField& s) {
  VectorField out = gradient(s);
  out.zero_boundary();
  return out;
}

ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  ScalarField out(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      out(i, j) = (v.x(i + 1, j) - v.x(i, j)) / g.dx() +
                  (v.y(i, j + 1) - v.y(i, j)) / g.dy();
  return out;
}

NodeField cell_to_node(const ScalarField& s, Ghost ghost) {
  const Grid& g = s.grid();
  const double sign = ghost_sign(ghost);
  NodeField out(g);
  for (int j = 0; j <= g.ny(); ++j)
    for (int i = 0; i <= g.nx(); ++i)
      out(i, j) = 0.25 * (extended(s, i - 1, j - 1, sign) +
                          extended(s, i, j - 1, sign) +
                          extended(s, i - 1, j, sign) + extended(s, i, j, sign));
  return out;
}

VectorField curl_of_stream(const NodeField& psi) {
  const Grid& g = psi.grid();
  VectorField out(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i <= g.nx(); ++i)
      out.x(i, j) = (psi(i, j + 1) - psi(i, j)) / g.dy();
  for (int j = 0; j <= g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      out.y(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.dx();
  return out;
}

VectorField curl_of_scalar(const ScalarField& w) {
  return curl_of_stream(cell_to_node(w, Ghost::Dirichlet));
}

ScalarField curl_of_vector(const VectorField& v) {
  const Grid& g = v.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  auto vy = [&](int i, int j) {
    if (i < 0) return -v.y(0, j);
    if (i >= nx) return -v.y(nx - 1, j);
    return v.y(i, j);
  };
  auto vx = [&](int i, int j) {
    if (j < 0) return -v.x(i, 0);
    if (j >= ny) return -v.x(i, ny - 1);
    return v.x(i, j);
  };
  NodeField zeta(g);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      zeta(i, j) = (vy(i, j) - vy(i - 1, j)) / g.dx() -
                   (vx(i, j) - vx(i, j - 1)) / g.dy();
  ScalarField out(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out(i, j) = 0.25 * (zeta(i, j) + zeta(i + 1, j) + zeta(i, j + 1) +
                          zeta(i + 1, j + 1));
  return out;
}

ScalarField laplacian(const ScalarField& s, Ghost ghost) {
  const Grid& g = s.grid();
  const double sign = ghost_sign(ghost);
  const double idx2 = 1.0 / (g.dx() * g.dx());
  const double idy2 = 1.0 / (g.dy() * g.dy());
  ScalarField out(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double c = s(i, j);
      out(i, j) = (extended(s, i + 1, j, sign) - 2.0 * c +
                   extended(s, i - 1, j, sign)) *
                      idx2 +
                  (extended(s, i, j + 1, sign) - 2.0 * c +
                   extended(s, i, j - 1, sign)) *
                      idy2;
    }
  return out;
}

VectorField laplacian_vec(const VectorField& v) {
  const Grid& g = v.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const double idx2 = 1.0 / (g.dx() * g.dx());
  const double idy2 = 1.0 / (g.dy() * g.dy());
  VectorField out(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const double c = v.x(i, j);
      const double north = j + 1 < ny ? v.x(i, j + 1) : -c;
      const double south = j > 0 ? v.x(i, j - 1) : -c;
      out.x(i, j) = (v.x(i + 1, j) - 2.0 * c + v.x(i - 1, j)) * idx2 +
                    (north - 2.0 * c + south) * idy2;
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double c = v.y(i, j);
      const double east = i + 1 < nx ? v.y(i + 1, j) : -c;
      const double west = i > 0 ? v.y(i - 1, j) : -c;
      out.y(i, j) = (east - 2.0 * c + west) * idx2 +
                    (v.y(i, j + 1) - 2.0 * c + v.y(i, j - 1)) * idy2;
    }
  return out;
}

VectorField face_average(const ScalarField& s) {
  const Grid& g = s.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  VectorField out(g);
  for (int j = 0; j < ny; ++j) {
    out.x(0, j) = s(0, j);
    for (int i = 1; i < nx; ++i) out.x(i, j) = 0.5 * (s(i - 1, j) + s(i, j));
    out.x(nx, j) = s(nx - 1, j);
  }
  for (int i = 0; i < nx; ++i) {
    out.y(i, 0) = s(i, 0);
    for (int j = 1; j < ny; ++j) out.y(i, j) = 0.5 * (s(i, j - 1) + s(i, j));
    out.y(i, ny) = s(i, ny - 1);
  }
  return out;
}

CenterVector center_average(const VectorField& v) {
  const Grid& g = v.grid();
  CenterVector out{ScalarField(g), ScalarField(g)};
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      out.x(i, j) = 0.5 * (v.x(i, j) + v.x(i + 1, j));
      out.y(i, j) = 0.5 * (v.y(i, j) + v.y(i, j + 1));
    }
  return out;
}

double inner_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "inner_product");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum * a.grid().cell_volume();
}

double inner_product(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid(), b.grid(), "inner_product");
  const Grid& g = a.grid();
  double sum = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i <= g.nx(); ++i) {
      const double w = g.is_boundary_xface(i) ? 0.5 : 1.0;
      sum += w * a.x(i, j) * b.x(i, j);
    }
  for (int j = 0; j <= g.ny(); ++j) {
    const double w = g.is_boundary_yface(j) ? 0.5 : 1.0;
    for (int i = 0; i < g.nx(); ++i) sum += w * a.y(i, j) * b.y(i, j);
  }
  return sum * g.cell_volume();
}

double integrate(const ScalarField& s) {
  double sum = 0.0;
  for (double v : s.values()) sum += v;
  return sum * s.grid().cell_volume();
}

double l2_norm(const ScalarField& s) { return std::sqrt(inner_product(s, s)); }
double l2_norm(const VectorField& v) { return std::sqrt(inner_product(v, v)); }

double l2_norm_interior(const VectorField& v) {
  const Grid& g = v.grid();
  double sum = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i) sum += v.x(i, j) * v.x(i, j);
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) sum += v.y(i, j) * v.y(i, j);
  return std::sqrt(sum * g.cell_volume());
}

double dirichlet_form(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "dirichlet_form");
  const Grid& g = a.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const double idx2 = 1.0 / (g.dx() * g.dx());
  const double idy2 = 1.0 / (g.dy() * g.dy());
  double sum = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i)
      sum += (a(i, j) - a(i - 1, j)) * (b(i, j) - b(i - 1, j)) * idx2;
    // half-cell ghost edges at the west and east walls
    sum += 2.0 * (a(0, j) * b(0, j) + a(nx - 1, j) * b(nx - 1, j)) * idx2;
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 1; j < ny; ++j)
      sum += (a(i, j) - a(i, j - 1)) * (b(i, j) - b(i, j - 1)) * idy2;
    sum += 2.0 * (a(i, 0) * b(i, 0) + a(i, ny - 1) * b(i, ny - 1)) * idy2;
  }
  return sum * g.cell_volume();
}

double dirichlet_form(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid(), b.grid(), "dirichlet_form");
  const Grid& g = a.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const double idx2 = 1.0 / (g.dx() * g.dx());
  const double idy2 = 1.0 / (g.dy() * g.dy());
  double sum = 0.0;
  // x-components: normal direction edges, then tangential with wall ghosts.
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i <= nx; ++i)
      sum += (a.x(i, j) - a.x(i - 1, j)) * (b.x(i, j) - b.x(i - 1, j)) * idx2;
  for (int i = 1; i < nx; ++i) {
    for (int j = 1; j < ny; ++j)
      sum += (a.x(i, j) - a.x(i, j - 1)) * (b.x(i, j) - b.x(i, j - 1)) * idy2;
    sum += 2.0 * (a.x(i, 0) * b.x(i, 0) + a.x(i, ny - 1) * b.x(i, ny - 1)) *
           idy2;
  }
  // y-components.
  for (int j = 1; j <= ny; ++j)
    for (int i = 0; i < nx; ++i)
      sum += (a.y(i, j) - a.y(i, j - 1)) * (b.y(i, j) - b.y(i, j - 1)) * idy2;
  for (int j = 1; j < ny; ++j) {
    for (int i = 1; i < nx; ++i)
      sum += (a.y(i, j) - a.y(i - 1, j)) * (b.y(i, j) - b.y(i - 1, j)) * idx2;
    sum += 2.0 * (a.y(0, j) * b.y(0, j) + a.y(nx - 1, j) * b.y(nx - 1, j)) *
           idx2;
  }
  return sum * g.cell_volume();
}

}  // namespace micropolar
