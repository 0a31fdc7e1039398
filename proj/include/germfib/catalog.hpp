#pragma once

// Built-in germs with short notes on what they illustrate.

#include <string>
#include <vector>

#include "germfib/germ_io.hpp"

namespace germfib {

struct CatalogEntry {
  std::string name;
  std::string note;
  std::string text;  // germ-file source
};

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"xy_z2",
       "radial homogeneous (1,1,1; d=2); Disc G = {0} x R+ u R x {0}; M(G) off G^-1(Disc G) has 8 components",
       "name: xy_z2\n"
       "vars: x y z\n"
       "G1 = x*y\n"
       "G2 = z^2\n"
       "flags: image_boundary_in_sing \"Im G is the half-plane v >= 0; its boundary line is G({z = 0})\"\n"},
      {"ex31_n3",
       "(x1, x2^2 - x3^2) on R^3: Sing G is the x1-axis, Disc G = R x {0}",
       "name: ex31_n3\n"
       "vars: x1 x2 x3\n"
       "G1 = x1\n"
       "G2 = x2^2 - x3^2\n"},
      {"ex31_n4",
       "(x1, x2^2 + x3^2 - x4^2) on R^4: M(Psi_G) = Sing G, sphere fibration by the rho-regularity criterion",
       "name: ex31_n4\n"
       "vars: x1 x2 x3 x4\n"
       "G1 = x1\n"
       "G2 = x2^2 + x3^2 - x4^2\n"},
      {"fgbar_quadric",
       "f * conj(g) with f = z1^2 + z2^2, g = z1^2 - z2^2 (an ICIS pair); Disc is positive dimensional",
       "name: fgbar_quadric\n"
       "cvars: z1 z2\n"
       "f = z1^2 + z2^2\n"
       "g = z1^2 - z2^2\n"
       "flags: icis \"(f, g) has an isolated singularity at 0\" coprime \"f and g share no factor\"\n"},
      {"product_cone_line",
       "product of the cone x1^2 + x2^2 - x3^2 with the invertible germ x4 in separate variables",
       "name: product_cone_line\n"
       "vars: x1 x2 x3 x4\n"
       "G1 = x1^2 + x2^2 - x3^2\n"
       "G2 = x4\n"},
      {"xy_z2_cubic",
       "(x y, z^2 + x^3 + y^3): no radial weights; Disc G is the curve (t^2, 2 t^3), not a union of rays",
       "name: xy_z2_cubic\n"
       "vars: x y z\n"
       "G1 = x*y\n"
       "G2 = z^2 + x^3 + y^3\n"},
      {"linear_r3",
       "linear projection (x1, x2) on R^3: a submersion, Sing G and Disc G empty",
       "name: linear_r3\n"
       "vars: x1 x2 x3\n"
       "G1 = x1\n"
       "G2 = x2\n"},
      {"linear_r4",
       "linear projection (x1, x2) on R^4",
       "name: linear_r4\n"
       "vars: x1 x2 x3 x4\n"
       "G1 = x1\n"
       "G2 = x2\n"},
      {"polar_z1_conj_z2",
       "z1 * conj(z2): polar weighted-homogeneous with weights (2,1), degree 1; Disc = {0}",
       "name: polar_z1_conj_z2\n"
       "cvars: z1 z2\n"
       "F = z1*conj(z2)\n"},
      {"polar_brieskorn",
       "z1^2 conj(z1) + z2^3 conj(z2): polar weighted-homogeneous with weights (2,1), degree 2",
       "name: polar_brieskorn\n"
       "cvars: z1 z2\n"
       "F = z1^2*conj(z1) + z2^3*conj(z2)\n"},
      {"nonnice_x_xy",
       "(z1, z1 z2) on C^2 realified: the image is not a set germ; niceness stays inconclusive",
       "name: nonnice_x_xy\n"
       "vars: x1 y1 x2 y2\n"
       "G1 = x1\n"
       "G2 = y1\n"
       "G3 = x1*x2 - y1*y2\n"
       "G4 = x1*y2 + y1*x2\n"},
  };
  return entries;
}

inline const CatalogEntry* find_catalog_entry(const std::string& name) {
  for (const auto& e : catalog()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

inline MapGerm catalog_germ(const std::string& name) {
  const auto* e = find_catalog_entry(name);
  if (!e) throw InputError("no catalog germ named '" + name + "'");
  return parse_germ(e->text, e->name);
}

}  // namespace germfib
