#include "gdsl/infer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "gdsl/core.hpp"
#include "gdsl/error.hpp"
#include "gdsl/format.hpp"
#include "gdsl/path.hpp"

namespace gdsl {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRad = kPi / 180.0;
constexpr int kFitSamples = 8;
constexpr int kMatchSamples = 16;

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm2(Vec2 a) { return dot(a, a); }

Vec2 mean(const std::vector<Vec2>& pts) {
  Vec2 m;
  for (const auto& p : pts) m = m + p;
  return pts.empty() ? m : m * (1.0 / static_cast<double>(pts.size()));
}

double wrap360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

bool is_style_attr(const std::string& name) {
  return name == "fill" || name == "stroke" || name == "strokeWidth" || name == "opacity";
}

Primitive geometry_only(const Primitive& p) {
  Primitive g{p.kind, {}};
  for (const auto& [k, v] : p.attrs) {
    if (!is_style_attr(k)) g.attrs.emplace(k, v);
  }
  return g;
}

std::string style_key(const Primitive& p) {
  std::string key;
  for (const char* name : {"fill", "stroke", "strokeWidth", "opacity"}) {
    auto it = p.attrs.find(name);
    key += '|';
    if (it == p.attrs.end()) continue;
    if (const auto* d = std::get_if<double>(&it->second)) key += format_number(*d, 6);
    else if (const auto* s = std::get_if<std::string>(&it->second)) key += *s;
  }
  return key;
}

bool closed_outline(const Primitive& p) {
  if (p.kind == PrimitiveKind::line) return false;
  if (p.kind != PrimitiveKind::path) return true;
  const std::string d = p.string("d");
  const auto last = d.find_last_not_of(" \t\r\n");
  return last != std::string::npos && (d[last] == 'z' || d[last] == 'Z');
}

std::vector<Vec2> world_outline(const Primitive& p, const AffineMatrix& m, int samples) {
  auto pts = primitive_outline(p, samples);
  for (auto& q : pts) q = m.apply(q);
  return pts;
}

// Candidate point correspondences: every cyclic shift (closed outlines) plus
// the reversed orders. Calls f(permuted points).
template <class F>
void for_each_correspondence(const std::vector<Vec2>& pts, bool closed, F&& f) {
  const std::size_t n = pts.size();
  std::vector<Vec2> perm(n);
  const std::size_t shifts = closed ? n : 1;
  for (std::size_t s = 0; s < shifts; ++s) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = pts[(i + s) % n];
    f(perm);
    for (std::size_t i = 0; i < n; ++i) perm[i] = pts[closed ? (s + n - i) % n : n - 1 - i];
    f(perm);
  }
}

// --- per-instance estimators: best map of R onto P of a given class -------

struct Est {
  AffineMatrix g;
  double sq = 0.0;  // mean squared error
};

double mean_sq(const std::vector<Vec2>& r, const std::vector<Vec2>& p, const AffineMatrix& g) {
  double s = 0;
  for (std::size_t i = 0; i < r.size(); ++i) s += norm2(p[i] - g.apply(r[i]));
  return r.empty() ? 0.0 : s / static_cast<double>(r.size());
}

struct Moments {
  Vec2 mr, mp;
  double sdot = 0, scross = 0, srr = 0, sxx = 0, syy = 0, rxx = 0, ryy = 0;
};

Moments moments(const std::vector<Vec2>& r, const std::vector<Vec2>& p) {
  Moments m;
  m.mr = mean(r);
  m.mp = mean(p);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Vec2 a = r[i] - m.mr, b = p[i] - m.mp;
    m.sdot += dot(a, b);
    m.scross += cross(a, b);
    m.srr += norm2(a);
    m.sxx += a.x * b.x;
    m.syy += a.y * b.y;
    m.rxx += a.x * a.x;
    m.ryy += a.y * a.y;
  }
  return m;
}

AffineMatrix linear_then_fit(double a, double b, double c, double d, const Moments& m) {
  AffineMatrix g{a, b, c, d, 0, 0};
  const Vec2 t = m.mp - g.apply_linear(m.mr);
  g.e = t.x;
  g.f = t.y;
  return g;
}

enum class EstKind { translation, rigid, similarity_norot, similarity, axis };

AffineMatrix estimate(EstKind k, const std::vector<Vec2>& r, const std::vector<Vec2>& p) {
  const Moments m = moments(r, p);
  switch (k) {
    case EstKind::translation:
      return AffineMatrix::translation(m.mp - m.mr);
    case EstKind::rigid: {
      const double th = std::atan2(m.scross, m.sdot);
      return linear_then_fit(std::cos(th), std::sin(th), -std::sin(th), std::cos(th), m);
    }
    case EstKind::similarity_norot: {
      const double s = m.srr > 0 ? m.sdot / m.srr : 1.0;
      return linear_then_fit(s, 0, 0, s, m);
    }
    case EstKind::similarity: {
      const double ar = m.srr > 0 ? m.sdot / m.srr : 1.0;
      const double ai = m.srr > 0 ? m.scross / m.srr : 0.0;
      return linear_then_fit(ar, ai, -ai, ar, m);
    }
    case EstKind::axis: {
      const double sx = m.rxx > 1e-300 ? m.sxx / m.rxx : 1.0;
      const double sy = m.ryy > 1e-300 ? m.syy / m.ryy : 1.0;
      return linear_then_fit(sx, 0, 0, sy, m);
    }
  }
  return {};
}

// --- group observations ------------------------------------------------------

enum class Mode { direct, shifted, isotropic };

struct Obs {
  std::vector<Vec2> pts;
  Vec2 centroid;
  double radius = 0;  // isotropic: world radius; centroid is the world center
  Vec2 frame_origin;  // where the element's own coordinate origin lands
};

struct Observed {
  Mode mode = Mode::direct;
  bool closed = true;
  std::vector<Obs> obs;
  double diameter = 0;
};

bool is_similarity(const AffineMatrix& m) {
  const double n1 = std::hypot(m.a, m.b), n2 = std::hypot(m.c, m.d);
  if (n1 == 0 || n2 == 0) return false;
  return std::abs(m.a * m.c + m.b * m.d) <= 1e-9 * n1 * n2 && std::abs(n1 - n2) <= 1e-9 * std::max(n1, n2);
}

std::optional<Observed> observe(const std::vector<FlatElement>& group) {
  Observed o;
  const bool circles = std::all_of(group.begin(), group.end(), [](const FlatElement& e) {
    return e.primitive.kind == PrimitiveKind::circle && is_similarity(e.world);
  });
  const Primitive g0 = geometry_only(group.front().primitive);
  const bool same_geometry = std::all_of(group.begin(), group.end(),
                                         [&](const FlatElement& e) { return geometry_only(e.primitive) == g0; });
  o.mode = circles ? Mode::isotropic : same_geometry ? Mode::direct : Mode::shifted;
  o.closed = closed_outline(group.front().primitive);

  BBox box;
  for (const auto& e : group) {
    Obs ob;
    ob.frame_origin = e.world.apply({0, 0});
    if (o.mode == Mode::isotropic) {
      const Primitive& p = e.primitive;
      ob.centroid = e.world.apply({p.number("cx"), p.number("cy")});
      ob.radius = p.number("r") * std::sqrt(std::abs(e.world.determinant()));
      box.expand(ob.centroid - Vec2{ob.radius, ob.radius});
      box.expand(ob.centroid + Vec2{ob.radius, ob.radius});
    } else {
      ob.pts = world_outline(e.primitive, e.world, kFitSamples);
      if (ob.pts.empty()) return std::nullopt;
      ob.centroid = mean(ob.pts);
      for (const auto& q : ob.pts) box.expand(q);
    }
    o.obs.push_back(std::move(ob));
  }
  if (o.mode != Mode::isotropic) {
    const std::size_t n = o.obs.front().pts.size();
    for (const auto& ob : o.obs) {
      if (ob.pts.size() != n) return std::nullopt;
    }
  }
  o.diameter = std::hypot(box.width(), box.height());
  return o;
}

// Per-instance map from the reference (group position 0) onto element j,
// choosing the correspondence that suits the estimator best.
AffineMatrix fit_instance(const Observed& o, EstKind k, std::size_t j) {
  const auto& r = o.obs.front().pts;
  if (o.mode == Mode::direct || j == 0) return j == 0 ? AffineMatrix{} : estimate(k, r, o.obs[j].pts);
  AffineMatrix best;
  double best_sq = INFINITY;
  for_each_correspondence(o.obs[j].pts, o.closed, [&](const std::vector<Vec2>& p) {
    const AffineMatrix g = estimate(k, r, p);
    const double sq = mean_sq(r, p, g);
    if (sq < best_sq - 1e-15) {
      best_sq = sq;
      best = g;
    }
  });
  return best;
}

// Mean squared error of predicting element j as g(reference).
double element_sq(const Observed& o, std::size_t j, const AffineMatrix& g) {
  const Obs& ref = o.obs.front();
  const Obs& e = o.obs[j];
  if (o.mode == Mode::isotropic) {
    const Vec2 c = g.apply(ref.centroid);
    const double r = ref.radius * std::sqrt(std::abs(g.determinant()));
    return norm2(c - e.centroid) + (r - e.radius) * (r - e.radius);
  }
  std::vector<Vec2> q(ref.pts.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = g.apply(ref.pts[i]);
  auto err = [&](const std::vector<Vec2>& p) {
    double s = 0;
    for (std::size_t i = 0; i < q.size(); ++i) s += norm2(p[i] - q[i]);
    return s / static_cast<double>(q.size());
  };
  if (o.mode == Mode::direct) return err(e.pts);
  double best = INFINITY;
  for_each_correspondence(e.pts, o.closed, [&](const std::vector<Vec2>& p) { best = std::min(best, err(p)); });
  return best;
}

// predicted[k] maps the reference onto the instance at order[k].
double structured_residual(const Observed& o, const std::vector<std::size_t>& order,
                           const std::vector<AffineMatrix>& predicted) {
  double s = 0;
  for (std::size_t k = 0; k < order.size(); ++k) s += element_sq(o, order[k], predicted[k]);
  return std::sqrt(s / static_cast<double>(order.size()));
}

// --- ordering and 1-D regressions --------------------------------------------

std::vector<std::size_t> order_by_projection(const std::vector<Vec2>& pos) {
  const Vec2 m = mean(pos);
  double cxx = 0, cyy = 0, cxy = 0;
  for (const auto& p : pos) {
    const Vec2 d = p - m;
    cxx += d.x * d.x;
    cyy += d.y * d.y;
    cxy += d.x * d.y;
  }
  std::vector<std::size_t> order(pos.size());
  std::iota(order.begin(), order.end(), 0);
  if (cxx + cyy <= 0) return order;
  const double th = 0.5 * std::atan2(2 * cxy, cxx - cyy);
  Vec2 dir{std::cos(th), std::sin(th)};
  if (dir.x < -1e-12 || (std::abs(dir.x) <= 1e-12 && dir.y < 0)) dir = dir * -1.0;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return dot(pos[i], dir) < dot(pos[j], dir) - 1e-12; });
  return order;
}

std::vector<std::size_t> order_by_value(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j] - 1e-12; });
  return order;
}

// Least squares y_k = b + k * slope.
std::pair<double, double> fit_line(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  const double kbar = (n - 1) / 2;
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double num = 0, den = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    num += (static_cast<double>(k) - kbar) * (y[k] - ybar);
    den += (static_cast<double>(k) - kbar) * (static_cast<double>(k) - kbar);
  }
  const double slope = den > 0 ? num / den : 0.0;
  return {ybar - slope * kbar, slope};
}

// Instance order by angle about a center: ascending, starting after the
// widest gap; among equally wide gaps the start with the smallest absolute
// angle (`offset` + relative angle) wins. Returns the order and the unwrapped
// angles relative to the first.
std::pair<std::vector<std::size_t>, std::vector<double>> order_by_angle(const std::vector<double>& deg,
                                                                        double offset) {
  std::vector<double> a(deg.size());
  for (std::size_t i = 0; i < deg.size(); ++i) a[i] = wrap360(deg[i]);
  auto sorted = order_by_value(a);
  const std::size_t n = sorted.size();
  std::size_t start = 0;
  double widest = -1;
  for (std::size_t i = 0; i < n; ++i) {
    const double next = i + 1 < n ? a[sorted[i + 1]] : a[sorted[0]] + 360.0;
    const double gap = next - a[sorted[i]];
    const std::size_t cand = (i + 1) % n;
    const bool tie = std::abs(gap - widest) <= 1e-6;
    if ((!tie && gap > widest) ||
        (tie && wrap360(a[sorted[cand]] + offset + 1e-9) < wrap360(a[sorted[start]] + offset + 1e-9))) {
      widest = std::max(widest, gap);
      start = cand;
    }
  }
  std::vector<std::size_t> order(n);
  std::vector<double> phi(n);
  for (std::size_t k = 0; k < n; ++k) {
    order[k] = sorted[(start + k) % n];
    phi[k] = wrap360(a[order[k]] - a[order[0]]);
  }
  return {order, phi};
}

// Per axis: u_k = (1 - s_k) * origin + k * step. When the two regressors are
// collinear (two instances, or an arithmetic scale sequence) the geometry
// cannot separate them; the origin is then taken to be `hint`, the first
// instance's own frame origin, and the step fitted with it held fixed.
std::pair<double, double> fit_origin_step(const std::vector<double>& s, const std::vector<double>& u,
                                          double hint) {
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double x1 = 1 - s[k], x2 = static_cast<double>(k);
    a11 += x1 * x1;
    a12 += x1 * x2;
    a22 += x2 * x2;
    b1 += x1 * u[k];
    b2 += x2 * u[k];
  }
  const double det = a11 * a22 - a12 * a12;
  if (a11 <= 1e-18) return {0.0, a22 > 0 ? b2 / a22 : 0.0};
  if (std::abs(det) <= 1e-9 * a11 * a22) return {hint, a22 > 0 ? (b2 - a12 * hint) / a22 : 0.0};
  return {(b1 * a22 - b2 * a12) / det, (a11 * b2 - a12 * b1) / det};
}

// Kasa circle fit; nullopt for fewer than three or collinear centers.
std::optional<Vec2> circle_center(const std::vector<Vec2>& pts) {
  if (pts.size() < 3) return std::nullopt;
  const Vec2 m = mean(pts);
  // Minimize sum (x^2 + y^2 + D x + E y + F)^2 in centered coordinates.
  double A[3][4] = {};
  for (const auto& p0 : pts) {
    const Vec2 p = p0 - m;
    const double row[3] = {p.x, p.y, 1.0};
    const double rhs = -(p.x * p.x + p.y * p.y);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) A[i][j] += row[i] * row[j];
      A[i][3] += row[i] * rhs;
    }
  }
  double scale = 0;
  for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(A[i][i]));
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    }
    if (std::abs(A[piv][col]) <= 1e-12 * scale) return std::nullopt;
    std::swap(A[col], A[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = A[r][col] / A[col][col];
      for (int c = col; c < 4; ++c) A[r][c] -= f * A[col][c];
    }
  }
  const double D = A[0][3] / A[0][0], E = A[1][3] / A[1][1];
  const Vec2 c{-D / 2 + m.x, -E / 2 + m.y};
  // Collinear points fit a huge circle; reject when points don't lie on it.
  double spread = 0;
  const double r0 = std::sqrt(norm2(pts.front() - c));
  for (const auto& p : pts) spread = std::max(spread, std::abs(std::sqrt(norm2(p - c)) - r0));
  if (r0 <= 0 || spread > 1e-3 * r0) return std::nullopt;
  return c;
}

// Least squares c from (I - A_j) c = t_j over the instances that move.
std::optional<Vec2> fixed_point(const std::vector<AffineMatrix>& maps) {
  double m11 = 0, m12 = 0, m22 = 0, v1 = 0, v2 = 0;
  bool any = false;
  for (const auto& g : maps) {
    const double a = 1 - g.a, b = -g.b, c = -g.c, d = 1 - g.d;
    if (std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d) < 1e-9) continue;
    any = true;
    // Rows (a c) and (b d) of I - A.
    m11 += a * a + b * b;
    m12 += a * c + b * d;
    m22 += c * c + d * d;
    v1 += a * g.e + b * g.f;
    v2 += c * g.e + d * g.f;
  }
  const double det = m11 * m22 - m12 * m12;
  if (!any || std::abs(det) <= 1e-12 * std::max(1.0, m11 * m22)) return std::nullopt;
  return Vec2{(v1 * m22 - v2 * m12) / det, (m11 * v2 - m12 * v1) / det};
}

AffineMatrix scale_about(double sx, double sy, Vec2 o) {
  return compose(AffineMatrix::translation(o), compose(AffineMatrix::scaling(sx, sy), AffineMatrix::translation(o * -1.0)));
}

std::string sequence_kind(const std::vector<double>& s) {
  if (s.size() < 3) return {};
  const double mag = std::max(1.0, std::abs(*std::max_element(s.begin(), s.end(), [](double a, double b) {
                                      return std::abs(a) < std::abs(b);
                                    })));
  bool arithmetic = true, geometric = true;
  const double d = s[1] - s[0];
  for (std::size_t k = 2; k < s.size(); ++k) arithmetic = arithmetic && std::abs(s[k] - s[k - 1] - d) <= 1e-6 * mag;
  if (arithmetic && std::abs(d) > 1e-12) return "arithmetic";
  for (std::size_t k = 1; k < s.size(); ++k) geometric = geometric && std::abs(s[k - 1]) > 1e-12;
  if (geometric) {
    const double r = s[1] / s[0];
    for (std::size_t k = 2; k < s.size(); ++k) geometric = geometric && std::abs(s[k] / s[k - 1] - r) <= 1e-6 * std::max(1.0, std::abs(r));
    if (geometric && std::abs(r - 1) > 1e-12) return "geometric";
  }
  return {};
}

// --- models --------------------------------------------------------------------

using Candidate = std::optional<FitResult>;

std::vector<AffineMatrix> instance_maps(const Observed& o, EstKind k) {
  std::vector<AffineMatrix> g(o.obs.size());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = fit_instance(o, k, j);
  return g;
}

Candidate fit_translation(const Observed& o) {
  std::vector<Vec2> t(o.obs.size());
  if (o.mode == Mode::isotropic) {
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = o.obs[j].centroid - o.obs[0].centroid;
  } else {
    const auto g = instance_maps(o, EstKind::translation);
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = {g[j].e, g[j].f};
  }
  FitResult r;
  r.model = FitModel::translation;
  r.order = order_by_projection(t);
  std::vector<double> xs, ys;
  for (auto j : r.order) {
    xs.push_back(t[j].x);
    ys.push_back(t[j].y);
  }
  const auto [bx, sx] = fit_line(xs);
  const auto [by, sy] = fit_line(ys);
  r.step = {sx, sy};
  std::vector<AffineMatrix> pred;
  for (std::size_t k = 0; k < r.order.size(); ++k) {
    const double kk = static_cast<double>(k);
    pred.push_back(AffineMatrix::translation({bx + kk * sx, by + kk * sy}));
  }
  r.residual = structured_residual(o, r.order, pred);
  return r;
}

// Shared by the rotation models: maps with angle theta_j about `center`
// (relative to the reference) and optional per-instance scales.
Candidate rotation_result(const Observed& o, FitModel model, Vec2 center, const std::vector<double>& theta,
                          const std::vector<double>* scale) {
  FitResult r;
  r.model = model;
  r.center = center;
  const Vec2 d0 = o.obs.front().centroid - center;
  auto [order, phi] = order_by_angle(theta, std::atan2(d0.y, d0.x) / kRad);
  r.order = order;
  const auto [b, delta] = fit_line(phi);
  r.delta_angle_deg = delta;
  const double a0 = wrap360(theta[order[0]]);
  std::vector<AffineMatrix> pred;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double alpha = a0 + b + static_cast<double>(k) * delta;
    AffineMatrix g = AffineMatrix::rotation_deg(alpha, center);
    if (scale) g = compose(g, scale_about((*scale)[order[k]], (*scale)[order[k]], center));
    pred.push_back(g);
  }
  if (scale) {
    for (auto j : order) r.scales.push_back((*scale)[j] / (*scale)[order[0]]);
    r.sequence = sequence_kind(r.scales);
  }
  r.residual = structured_residual(o, r.order, pred);
  return r;
}

Candidate fit_rotation(const Observed& o) {
  std::vector<double> theta(o.obs.size());
  Vec2 center;
  if (o.mode == Mode::isotropic) {
    std::vector<Vec2> centers;
    for (const auto& ob : o.obs) centers.push_back(ob.centroid);
    auto c = circle_center(centers);
    if (!c) return std::nullopt;
    center = *c;
    const Vec2 d0 = centers[0] - center;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const Vec2 d = centers[j] - center;
      theta[j] = std::atan2(cross(d0, d), dot(d0, d)) / kRad;
    }
  } else {
    const auto g = instance_maps(o, EstKind::rigid);
    auto c = fixed_point(g);
    if (!c) return std::nullopt;
    center = *c;
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = std::atan2(g[j].b, g[j].a) / kRad;
  }
  return rotation_result(o, FitModel::rotation, center, theta, nullptr);
}

Candidate fit_translation_scale(const Observed& o) {
  const std::size_t n = o.obs.size();
  std::vector<double> s(n);
  std::vector<Vec2> t(n), pos(n);
  if (o.mode == Mode::isotropic) {
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = o.obs[0].radius > 0 ? o.obs[j].radius / o.obs[0].radius : 1.0;
      t[j] = o.obs[j].centroid - o.obs[0].centroid * s[j];
    }
  } else {
    const auto g = instance_maps(o, EstKind::similarity_norot);
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = g[j].a;
      t[j] = {g[j].e, g[j].f};
    }
  }
  for (std::size_t j = 0; j < n; ++j) pos[j] = o.obs[j].centroid;

  Candidate best;
  for (const auto& order : {order_by_projection(pos), order_by_value(s)}) {
    FitResult r;
    r.model = FitModel::translationScale;
    r.order = order;
    const double s0 = s[order[0]];
    if (std::abs(s0) < 1e-12) return std::nullopt;
    const Vec2 t0 = t[order[0]];
    std::vector<double> rel, ux, uy;
    for (auto j : order) {
      rel.push_back(s[j] / s0);
      ux.push_back(t[j].x - rel.back() * t0.x);
      uy.push_back(t[j].y - rel.back() * t0.y);
    }
    const Vec2 hint = o.obs[order[0]].frame_origin;
    const auto [ox, stx] = fit_origin_step(rel, ux, hint.x);
    const auto [oy, sty] = fit_origin_step(rel, uy, hint.y);
    r.scale_origin = {ox, oy};
    r.step = {stx, sty};
    r.scales = rel;
    r.sequence = sequence_kind(rel);
    std::vector<AffineMatrix> pred;
    for (std::size_t k = 0; k < n; ++k) {
      const double sk = rel[k], kk = static_cast<double>(k);
      pred.push_back({sk * s0, 0, 0, sk * s0, sk * t0.x + (1 - sk) * ox + kk * stx,
                      sk * t0.y + (1 - sk) * oy + kk * sty});
    }
    r.residual = structured_residual(o, order, pred);
    if (!best || r.residual < best->residual - 1e-12) best = r;
  }
  return best;
}

Candidate fit_rotation_scale(const Observed& o) {
  if (o.mode == Mode::isotropic) return std::nullopt;
  const auto g = instance_maps(o, EstKind::similarity);
  // b_j = (1 - a_j) c with complex a_j.
  double num_re = 0, num_im = 0, den = 0;
  std::vector<double> theta(g.size()), scale(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    theta[j] = std::atan2(g[j].b, g[j].a) / kRad;
    scale[j] = std::hypot(g[j].a, g[j].b);
    const double wr = 1 - g[j].a, wi = -g[j].b;
    if (wr * wr + wi * wi < 1e-18) continue;
    num_re += wr * g[j].e + wi * g[j].f;
    num_im += wr * g[j].f - wi * g[j].e;
    den += wr * wr + wi * wi;
  }
  if (den <= 0) return std::nullopt;
  return rotation_result(o, FitModel::rotationScale, {num_re / den, num_im / den}, theta, &scale);
}

Candidate fit_axis_scale(const Observed& o) {
  if (o.mode == Mode::isotropic) return std::nullopt;
  const std::size_t n = o.obs.size();
  const auto g = instance_maps(o, EstKind::axis);
  std::vector<Vec2> pos(n);
  std::vector<double> size(n);
  for (std::size_t j = 0; j < n; ++j) {
    pos[j] = o.obs[j].centroid;
    size[j] = g[j].a + g[j].d;
  }
  Candidate best;
  for (const auto& order : {order_by_projection(pos), order_by_value(size)}) {
    const AffineMatrix& f = g[order[0]];
    if (std::abs(f.a) < 1e-12 || std::abs(f.d) < 1e-12) return std::nullopt;
    FitResult r;
    r.model = FitModel::axisScale;
    r.order = order;
    std::vector<double> ux, uy;
    for (auto j : order) {
      r.scales_x.push_back(g[j].a / f.a);
      r.scales_y.push_back(g[j].d / f.d);
      ux.push_back(g[j].e - r.scales_x.back() * f.e);
      uy.push_back(g[j].f - r.scales_y.back() * f.f);
    }
    const Vec2 hint = o.obs[order[0]].frame_origin;
    const auto [ox, stx] = fit_origin_step(r.scales_x, ux, hint.x);
    const auto [oy, sty] = fit_origin_step(r.scales_y, uy, hint.y);
    r.scale_origin = {ox, oy};
    r.step = {stx, sty};
    std::vector<AffineMatrix> pred;
    for (std::size_t k = 0; k < n; ++k) {
      const double kx = r.scales_x[k], ky = r.scales_y[k], kk = static_cast<double>(k);
      pred.push_back({kx * f.a, 0, 0, ky * f.d, kx * f.e + (1 - kx) * ox + kk * stx,
                      ky * f.f + (1 - ky) * oy + kk * sty});
    }
    r.residual = structured_residual(o, order, pred);
    if (!best || r.residual < best->residual - 1e-12) best = r;
  }
  return best;
}

// --- signatures --------------------------------------------------------------

ShapeSignature signature(const Primitive& p, const AffineMatrix& world, int samples) {
  ShapeSignature s;
  s.kind = p.kind;
  s.style_key = style_key(p);
  s.points = world_outline(p, world, samples);
  const Vec2 c = mean(s.points);
  double ss = 0, cxx = 0, cyy = 0, cxy = 0;
  for (auto& q : s.points) {
    q = q - c;
    ss += norm2(q);
    cxx += q.x * q.x;
    cyy += q.y * q.y;
    cxy += q.x * q.y;
  }
  const double rms = s.points.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(s.points.size()));
  if (!(rms > 1e-12)) throw Error(ErrorCode::DegenerateShape, "shape has no extent");
  const double spread = std::hypot(cxx - cyy, 2 * cxy);
  s.axis_ambiguous = spread <= 1e-6 * (cxx + cyy);
  const double th = s.axis_ambiguous ? 0.0 : 0.5 * std::atan2(2 * cxy, cxx - cyy);
  const double co = std::cos(th), si = std::sin(th);
  for (auto& q : s.points) q = Vec2{co * q.x + si * q.y, -si * q.x + co * q.y} * (1.0 / rms);
  return s;
}

bool closed_kind(PrimitiveKind k) { return k != PrimitiveKind::line && k != PrimitiveKind::path; }

}  // namespace

std::string_view to_string(FitModel m) {
  switch (m) {
    case FitModel::translation: return "translation";
    case FitModel::rotation: return "rotation";
    case FitModel::translationScale: return "translationScale";
    case FitModel::rotationScale: return "rotationScale";
    case FitModel::axisScale: return "axisScale";
    case FitModel::none: return "none";
  }
  return "none";
}

ShapeSignature normalize_shape(const Primitive& p, const AffineMatrix& world) {
  return signature(p, world, 64);
}

bool signatures_match(const ShapeSignature& a, const ShapeSignature& b, double tol) {
  if (a.kind != b.kind || a.style_key != b.style_key || a.points.size() != b.points.size()) return false;
  if (a.points.empty()) return true;
  BBox box;
  for (const auto& q : a.points) box.expand(q);
  const double limit = tol * std::hypot(box.width(), box.height());
  // Paths may close without a Z, so every outline gets the cyclic search.
  const bool closed = closed_kind(a.kind) || a.kind == PrimitiveKind::path;
  bool found = false;
  for_each_correspondence(b.points, closed, [&](const std::vector<Vec2>& p) {
    if (found) return;
    const AffineMatrix g = estimate(EstKind::rigid, a.points, p);
    found = std::sqrt(mean_sq(a.points, p, g)) < limit;
  });
  return found;
}

std::vector<std::vector<std::size_t>> group_by_signature(const std::vector<FlatElement>& elems, double tol) {
  struct Rep {
    Primitive geometry;
    std::string style;
    std::optional<ShapeSignature> sig;
  };
  std::vector<std::vector<std::size_t>> groups;
  std::vector<Rep> reps;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const auto& e = elems[i];
    Rep r{geometry_only(e.primitive), style_key(e.primitive), std::nullopt};
    const bool shape_matchable = e.primitive.kind != PrimitiveKind::text && e.primitive.kind != PrimitiveKind::image;
    bool sig_done = false;
    std::size_t g = 0;
    for (; g < groups.size(); ++g) {
      if (reps[g].style != r.style || reps[g].geometry.kind != r.geometry.kind) continue;
      if (reps[g].geometry == r.geometry) break;
      if (!shape_matchable || !reps[g].sig) continue;
      if (!sig_done) {
        sig_done = true;
        try {
          r.sig = signature(e.primitive, e.world, kMatchSamples);
        } catch (const Error&) {
        }
      }
      if (r.sig && signatures_match(*reps[g].sig, *r.sig, tol)) break;
    }
    if (g == groups.size()) {
      if (!sig_done && shape_matchable) {
        try {
          r.sig = signature(e.primitive, e.world, kMatchSamples);
        } catch (const Error&) {
        }
      }
      groups.emplace_back();
      reps.push_back(std::move(r));
    }
    groups[g].push_back(i);
  }
  return groups;
}

FitResult fit_transform_chain(const std::vector<FlatElement>& group, double tol) {
  FitResult none;
  if (group.size() < 2) return none;
  const auto o = observe(group);
  if (!o) return none;
  none.diameter = o->diameter;
  none.residual = INFINITY;
  const double limit = tol * (o->diameter > 0 ? o->diameter : 1.0);
  for (auto model : {fit_translation, fit_rotation, fit_translation_scale, fit_rotation_scale, fit_axis_scale}) {
    Candidate c = model(*o);
    if (!c) continue;
    c->diameter = o->diameter;
    if (c->residual < limit) return *c;
    none.residual = std::min(none.residual, c->residual);
  }
  if (!std::isfinite(none.residual)) none.residual = 0;
  return none;
}

// --- document construction -------------------------------------------------------

namespace {

Primitive bake(const Primitive& p, const AffineMatrix& m) {
  Primitive out = p;
  auto corners = [&](double x, double y, double w, double h) {
    return Points{m.apply({x, y}), m.apply({x + w, y}), m.apply({x + w, y + h}), m.apply({x, y + h})};
  };
  switch (p.kind) {
    case PrimitiveKind::rect:
      out.kind = PrimitiveKind::polygon;
      out.attrs.erase("x");
      out.attrs.erase("y");
      out.attrs.erase("width");
      out.attrs.erase("height");
      out.attrs["points"] = corners(p.number("x"), p.number("y"), p.number("width"), p.number("height"));
      break;
    case PrimitiveKind::polygon: {
      Points pts = *p.points("points");
      for (auto& q : pts) q = m.apply(q);
      out.attrs["points"] = pts;
      break;
    }
    case PrimitiveKind::line: {
      const Vec2 a = m.apply({p.number("x1"), p.number("y1")});
      const Vec2 b = m.apply({p.number("x2"), p.number("y2")});
      out.attrs["x1"] = a.x;
      out.attrs["y1"] = a.y;
      out.attrs["x2"] = b.x;
      out.attrs["y2"] = b.y;
      break;
    }
    case PrimitiveKind::path:
      out.attrs["d"] = transform_path(p.string("d"), m);
      break;
    case PrimitiveKind::circle: {
      const double cx = p.number("cx"), cy = p.number("cy"), r = p.number("r");
      const std::string d = "M " + format_number(cx + r, 6) + " " + format_number(cy, 6) + " A " +
                            format_number(r, 6) + " " + format_number(r, 6) + " 0 1 1 " +
                            format_number(cx - r, 6) + " " + format_number(cy, 6) + " A " +
                            format_number(r, 6) + " " + format_number(r, 6) + " 0 1 1 " +
                            format_number(cx + r, 6) + " " + format_number(cy, 6) + " Z";
      out.kind = PrimitiveKind::path;
      out.attrs.erase("cx");
      out.attrs.erase("cy");
      out.attrs.erase("r");
      out.attrs["d"] = transform_path(d, m);
      break;
    }
    case PrimitiveKind::text:
    case PrimitiveKind::image:
      break;
  }
  return out;
}

// A basic container reproducing `p` under `m`: a transform when `m` has no
// shear, otherwise geometry baked into the primitive.
Container basic_container(const ContainerId& id, const Primitive& p, const AffineMatrix& m) {
  Container c;
  c.id = id;
  if (auto t = decompose(m, 1e-7)) {
    c.body = BasicBody{p};
    c.transform = *t;
  } else if (p.kind == PrimitiveKind::text || p.kind == PrimitiveKind::image) {
    // Cannot be baked; keep the closest shear-free placement.
    Transform t;
    const double th = std::atan2(m.b, m.a);
    t.scale.sx = std::hypot(m.a, m.b);
    t.scale.sy = m.determinant() / t.scale.sx;
    t.rotate.angle_deg = th / kRad;
    t.translate = {m.e, m.f};
    c.body = BasicBody{p};
    c.transform = t;
  } else {
    c.body = BasicBody{bake(p, m)};
  }
  return c;
}

ValueList value_list(const std::vector<double>& v) {
  ValueList l;
  for (double x : v) l.values.emplace_back(x);
  return l;
}

}  // namespace

GlyphDocument infer_structure(const std::vector<FlatElement>& elems, double tol, InferReport* report) {
  if (elems.empty()) throw Error(ErrorCode::EmptyInput, "nothing to infer from");
  GlyphDocument doc;
  int n_basic = 0, n_rep = 0;
  auto next_id = [](const char* kind, int& n) { return ContainerId(std::string("inferred-") + kind + "-" + std::to_string(++n)); };

  struct Unit {
    std::size_t first;
    ContainerId id;
  };
  std::vector<Unit> units;

  auto add_basic = [&](std::size_t i) {
    Container c = basic_container(next_id("basic", n_basic), elems[i].primitive, elems[i].world);
    units.push_back({i, c.id});
    doc.containers.emplace(c.id, std::move(c));
  };

  for (const auto& members : group_by_signature(elems, tol)) {
    if (members.size() < 2) {
      add_basic(members.front());
      continue;
    }
    std::vector<FlatElement> group;
    for (auto i : members) group.push_back(elems[i]);
    const FitResult fit = fit_transform_chain(group, tol);
    if (report) report->fits.push_back(fit);
    if (fit.model == FitModel::none) {
      for (auto i : members) add_basic(i);
      continue;
    }

    const FlatElement& first = group[fit.order.front()];
    Container rep;
    rep.id = next_id("repeater", n_rep);
    RepeaterBody body;
    body.count = static_cast<int>(group.size());
    Vec2 origin;
    const bool polar = fit.model == FitModel::rotation || fit.model == FitModel::rotationScale;
    if (polar) {
      rep.coord.kind = CoordKind::polar;
      body.arrangement.delta_angle_deg = fit.delta_angle_deg;
      origin = fit.center;
    } else {
      body.arrangement.step = fit.step;
      if (fit.model != FitModel::translation) origin = fit.scale_origin;
    }
    rep.transform.translate = origin;
    Container child = basic_container(next_id("basic", n_basic), first.primitive,
                                      compose(AffineMatrix::translation(origin * -1.0), first.world));
    body.child = child.id;
    rep.body = body;
    if (fit.model == FitModel::translationScale || fit.model == FitModel::rotationScale) {
      rep.bindings.push_back({"instance.scale.sx+sy", value_list(fit.scales), std::nullopt});
    } else if (fit.model == FitModel::axisScale) {
      auto varies = [](const std::vector<double>& v) {
        return std::any_of(v.begin(), v.end(), [](double x) { return std::abs(x - 1) > 1e-12; });
      };
      if (varies(fit.scales_x)) rep.bindings.push_back({"instance.scale.sx", value_list(fit.scales_x), std::nullopt});
      if (varies(fit.scales_y)) rep.bindings.push_back({"instance.scale.sy", value_list(fit.scales_y), std::nullopt});
    }
    units.push_back({members.front(), rep.id});
    doc.containers.emplace(child.id, std::move(child));
    doc.containers.emplace(rep.id, std::move(rep));
  }

  std::stable_sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) { return a.first < b.first; });
  if (units.size() == 1) {
    doc.root = units.front().id;
    return doc;
  }
  Container comp;
  comp.id = ContainerId("inferred-compositor-1");
  CompositorBody body;
  for (const auto& u : units) body.children.push_back(u.id);
  comp.body = body;
  doc.root = comp.id;
  doc.containers.emplace(comp.id, std::move(comp));
  return doc;
}

}  // namespace gdsl
