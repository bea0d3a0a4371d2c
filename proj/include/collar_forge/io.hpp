#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "collar_forge/collar.hpp"
#include "collar_forge/cover.hpp"
#include "collar_forge/error.hpp"
#include "collar_forge/fixtures.hpp"
#include "collar_forge/region.hpp"
#include "collar_forge/verify.hpp"

namespace collar_forge {

using Json = nlohmann::ordered_json;

/// Shortest round-trip text of a double; "inf", "-inf" and "nan" otherwise.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// JSON numbers cannot hold infinities; they are written as strings.
inline Json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline Json to_json(const Point& p) { return p.vec(); }

inline Point point_from_json(const Json& j) { return Point(j.get<std::vector<double>>()); }

inline Json to_json(const SetDescriptor& s) {
  Json j = std::visit(
      [](const auto& sh) -> Json {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, EmptySet>) {
          return {{"kind", "empty"}};
        } else if constexpr (std::is_same_v<T, Ball>) {
          return {{"kind", "ball"}, {"center", to_json(sh.center)}, {"radius", sh.radius}};
        } else if constexpr (std::is_same_v<T, Circle>) {
          return {{"kind", "circle"}, {"center", to_json(sh.center)}, {"radius", sh.radius}};
        } else if constexpr (std::is_same_v<T, Box>) {
          Json lo = Json::array(), hi = Json::array();
          for (double v : sh.lo.vec()) lo.push_back(number_json(v));
          for (double v : sh.hi.vec()) hi.push_back(number_json(v));
          return {{"kind", "box"}, {"lo", lo}, {"hi", hi}};
        } else if constexpr (std::is_same_v<T, Polyline>) {
          Json v = Json::array();
          for (const auto& p : sh.vertices) v.push_back(to_json(p));
          return {{"kind", "polyline"}, {"vertices", v}, {"closed", sh.closed}};
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          return {{"kind", "halfplane"}, {"normal", to_json(sh.normal)}, {"offset", sh.offset}};
        } else {
          Json v = Json::array();
          for (const auto& p : sh.points) v.push_back(to_json(p));
          return {{"kind", "pointcloud"}, {"points", v}, {"resolution", sh.resolution}};
        }
      },
      s.shape);
  if (s.complement) j["complement"] = true;
  return j;
}

inline SetDescriptor set_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  SetDescriptor s;
  s.complement = j.value("complement", false);
  auto reals = [](const Json& a) {
    std::vector<double> v;
    for (const auto& e : a) v.push_back(e.is_string() ? std::strtod(e.get<std::string>().c_str(), nullptr)
                                                       : e.get<double>());
    return Point(v);
  };
  if (kind == "empty") {
    s.shape = EmptySet{};
  } else if (kind == "ball") {
    s.shape = Ball{point_from_json(j.at("center")), j.at("radius").get<double>()};
  } else if (kind == "circle") {
    s.shape = Circle{point_from_json(j.at("center")), j.at("radius").get<double>()};
  } else if (kind == "box") {
    s.shape = Box{reals(j.at("lo")), reals(j.at("hi"))};
  } else if (kind == "polyline") {
    Polyline p;
    for (const auto& v : j.at("vertices")) p.vertices.push_back(point_from_json(v));
    p.closed = j.value("closed", false);
    s.shape = std::move(p);
  } else if (kind == "halfplane") {
    s.shape = HalfSpace{point_from_json(j.at("normal")), j.at("offset").get<double>()};
  } else if (kind == "pointcloud") {
    PointCloud c;
    for (const auto& v : j.at("points")) c.points.push_back(point_from_json(v));
    c.resolution = j.at("resolution").get<double>();
    s.shape = std::move(c);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown region kind '" + kind + "'");
  }
  return s;
}

struct CoverConfig {
  Cover cover;
  double delta = 0.0;
  double delta0 = 0.0;
};

inline Json to_json(const Cover& c, double delta, double delta0) {
  Json members = Json::array();
  for (std::size_t a = 0; a < c.size(); ++a) {
    Json m = to_json(c.members[a]);
    if (a < c.labels.size()) m["label"] = c.labels[a];
    members.push_back(std::move(m));
  }
  return {{"members", members}, {"delta", delta}, {"delta0", delta0}};
}

inline CoverConfig cover_from_json(const Json& j) {
  CoverConfig c;
  std::size_t k = 0;
  for (const auto& m : j.at("members")) {
    c.cover.members.push_back(set_from_json(m));
    c.cover.labels.push_back(m.value("label", std::to_string(k)));
    ++k;
  }
  c.delta = j.at("delta").get<double>();
  c.delta0 = j.value("delta0", c.delta / 2.0);
  return c;
}

inline Json params_json(const ParamList& params) {
  Json j = Json::object();
  for (const auto& [k, v] : params) j[k] = number_json(v);
  return j;
}

inline Json constants_json(const CollarConstants& c) {
  Json j = Json::object();
  if (c.lipschitz) j["lipschitz"] = *c.lipschitz;
  if (c.inverse_lipschitz) j["inverse_lipschitz"] = *c.inverse_lipschitz;
  if (c.bi_lipschitz) j["bi_lipschitz"] = *c.bi_lipschitz;
  return j;
}

inline Json to_json(const Fixture& f) {
  Json collars = Json::array();
  for (std::size_t k = 0; k < f.collars.size(); ++k) {
    collars.push_back({{"name", f.collars[k].name},
                       {"chart", f.charts[k].kind},
                       {"parameters", params_json(f.charts[k].params)},
                       {"order", k + 1},
                       {"source_index", f.order[k] + 1},
                       {"declared", constants_json(f.collars[k].declared)},
                       {"exact_inverse", f.collars[k].exact_inverse}});
  }
  return {{"fixture", f.name},
          {"parameters", params_json(f.params)},
          {"dim", f.dom.dim},
          {"height_range", {0.0, 1.0}},
          {"region_bounds", to_json(SetDescriptor{f.dom.region_bounds, false})},
          {"cover", to_json(f.cover, f.delta, f.delta0)},
          {"collars", collars}};
}

inline Json to_json(const Witness& w) {
  return {{"a", w.a}, {"b", w.b}, {"quotient", number_json(w.quotient)}};
}

inline Json to_json(const LipschitzReport& r) {
  Json collars = Json::array();
  for (const auto& c : r.collars)
    collars.push_back({{"name", c.name},
                       {"lipschitz", c.lipschitz},
                       {"inverse_lipschitz", number_json(c.inverse_lipschitz)},
                       {"bi_lipschitz", number_json(c.bi_lipschitz)},
                       {"declared", constants_json(c.declared)},
                       {"exact_inverse", c.exact_inverse}});
  Json verdicts = Json::array();
  Json witnesses = Json::object();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"check", v.check},
                        {"pass", v.pass},
                        {"estimate", number_json(v.estimate)},
                        {"bound", number_json(v.bound)}});
    if (v.witness) witnesses[v.check] = to_json(*v.witness);
  }
  const auto& b = r.bundle;
  return {{"order", r.order},
          {"constants",
           {{"L", b.L},
            {"L_sigma", b.L_sigma},
            {"C", b.C},
            {"C_b", number_json(b.C_b)},
            {"zeta", b.zeta},
            {"N", b.N},
            {"cover_order", r.cover_order},
            {"delta", r.delta},
            {"delta0", r.delta0},
            {"collars", collars}}},
          {"bounds", {{"lipschitz", number_json(r.bound_L)}, {"inverse_lipschitz", number_json(r.bound_iL)}}},
          {"estimates",
           {{"lipschitz", number_json(r.estimate_L)}, {"inverse_lipschitz", number_json(r.estimate_iL)}}},
          {"verdicts", verdicts},
          {"witnesses", witnesses},
          {"passed", r.passed()},
          {"notes", r.notes}};
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
  os << '\n';
}

inline void write_quotients_csv(std::ostream& os, const std::vector<QuotientRow>& rows) {
  write_csv_row(os, {"index", "map", "kind", "quotient"});
  for (std::size_t i = 0; i < rows.size(); ++i)
    write_csv_row(os, {std::to_string(i), rows[i].map, rows[i].kind, format_double(rows[i].quotient)});
}

inline void write_net_csv(std::ostream& os, const SeparatedNet& net) {
  const std::size_t dim = net.points.empty() ? 0 : net.points.front().dim();
  std::vector<std::string> head{"index"};
  for (std::size_t d = 0; d < dim; ++d) head.push_back("x" + std::to_string(d));
  write_csv_row(os, head);
  for (std::size_t i = 0; i < net.points.size(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (double v : net.points[i].vec()) row.push_back(format_double(v));
    write_csv_row(os, row);
  }
}

/// Uniform t-grid on [0,1] with `steps` intervals; both endpoints are exact.
inline std::vector<double> height_grid(std::size_t steps) {
  if (steps == 0) throw Error(ErrorKind::InvalidArgument, "trajectory needs at least one step");
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = static_cast<double>(k) / static_cast<double>(steps);
  return t;
}

/// Rows (point_id, t, image coordinates) of the fibers h(x_k, .) over a t-grid.
inline void write_trajectory_csv(std::ostream& os, const GlobalCollar& gc,
                                 const std::vector<Point>& points, const std::vector<double>& heights) {
  std::vector<std::string> head{"point_id", "t"};
  for (std::size_t d = 0; d < gc.domain().dim; ++d) head.push_back("y" + std::to_string(d));
  write_csv_row(os, head);
  for (std::size_t k = 0; k < points.size(); ++k)
    for (double t : heights) {
      std::vector<std::string> row{std::to_string(k), format_double(t)};
      const Point y = gc.evaluate(points[k], t);
      for (double v : y.vec()) row.push_back(format_double(v));
      write_csv_row(os, row);
    }
}

}  // namespace collar_forge
