#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hjm/symexpr.hpp"

namespace hjm {

/// Structural tag naming the bundle a roster is a chart on.
enum class Space {
  TkQ,             // q_0 .. q_k
  TTk1Q,           // q_l ; dq_l            l < k
  TstarTk1Q,       // q_l , p_l             l < k
  TTstarTk1Q,      // q_l , p_l , dq_l , dp_l
  TstarTstarTk1Q,  // q_l , p_l , [dp_l] , [dq_l]   fiber slots reuse the dot names
  TstarTTk1Q,      // q_l , dq_l , dp_l , p_l
  Whitney,         // q_0 .. q_k , p_0 .. p_{k-1}
  AQ,              // q0 , a0
  TAQ,             // q0 , a0 ; q1 , a1
  TstarAQ,         // q0 , a0 , pq , pa
  TAQxM,           // q0 , a0 , m0 ; q1 , a1 , m1
  TstarAQxM,       // q0 , a0 , m0 , pq , pa , pm
};

std::string space_name(Space s);

struct ChartSpec {
  Space space = Space::TkQ;
  int dim = 1;
  int order = 1;
  std::vector<Symbol> roster;

  /// Standard roster for the space. Components run fastest inside each block.
  static ChartSpec standard(Space s, int n, int k);
  /// Custom ordering; must be a permutation of the standard roster.
  static ChartSpec with_roster(Space s, int n, int k, std::vector<Symbol> roster);

  friend bool operator==(const ChartSpec& a, const ChartSpec& b) {
    return a.space == b.space && a.dim == b.dim && a.order == b.order && a.roster == b.roster;
  }
};

/// Expected roster length for a space.
std::size_t chart_dimension(Space s, int n, int k);

struct Point {
  ChartSpec chart;
  Binding values;

  /// Builds a point from values listed in roster order.
  static Point from_vector(const ChartSpec& c, const std::vector<double>& v);
  std::vector<double> to_vector() const;
  double operator[](const Symbol& s) const { return lookup(values, s); }
};

/// Throws ChartMismatchError unless p lives on the given space and covers its roster exactly.
void require_chart(const Point& p, Space s);

Point iterated_tangent_embed(const Point& p);
Point tulczyjew_flat(const Point& p);
Point tulczyjew_flat_inverse(const Point& p);
Point tulczyjew_xi(const Point& p);
Point tulczyjew_xi_inverse(const Point& p);
Point acceleration_iso(const Point& p);
Point acceleration_iso_inverse(const Point& p);

/// Position/momentum pairs of a cotangent-type chart (T*T^{k-1}Q, T*AQ, T*(AQxM)).
std::vector<std::pair<Symbol, Symbol>> canonical_pairs(const ChartSpec& c);

/// Lifted two-form on TT*T^{k-1}Q evaluated on two coordinate displacement vectors.
double lifted_two_form(const Point& u, const Point& v);
/// Canonical two-form on T*T*T^{k-1}Q evaluated on two coordinate displacement vectors.
double canonical_two_form(const Point& u, const Point& v);

/// Component table of a type-1 semispray: pairs (coordinate, coefficient of d/d coordinate).
using VectorFieldTable = std::vector<std::pair<Symbol, Expr>>;

VectorFieldTable semispray_type1(const std::vector<Expr>& F, int n, int k);

}  // namespace hjm
