#include "spinframe/json_io.hpp"

#include <cstdio>

namespace spinframe {

std::string format_double17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json multivector_to_json(const Multivector& m) {
  Json out = Json::array();
  for (const auto& [mask, c] : m.terms()) {
    Json blade = Json::array();
    for (int i = 0; i < m.signature().dim(); ++i)
      if (mask & (BladeMask{1} << i)) blade.push_back(i);
    out.push_back(Json{{"blade", blade}, {"coeff", c}});
  }
  return out;
}

Multivector multivector_from_json(const Json& j, const Signature& sig) {
  if (!j.is_array()) throw SchemaError("multivector must be an array of terms");
  Multivector m(sig);
  for (const auto& term : j) {
    if (!term.contains("blade") || !term.contains("coeff"))
      throw SchemaError("multivector term needs 'blade' and 'coeff'");
    BladeMask mask = 0;
    int prev = -1;
    for (const auto& idx : term.at("blade")) {
      int i = idx.get<int>();
      if (i < 0 || i >= sig.dim()) throw SchemaError("blade index out of range");
      if (i <= prev) throw SchemaError("blade indices must be strictly ascending");
      prev = i;
      mask |= BladeMask{1} << i;
    }
    m.add(mask, term.at("coeff").get<double>());
  }
  return m;
}

namespace {

std::string expr_string(const ExprPtr& e) { return print(e); }

ExprPtr expr_from_json(const Json& j, const std::string& field) {
  if (!j.is_string()) throw SchemaError("expression field '" + field + "' must be a string");
  return parse_named(j.get<std::string>(), field);
}

}  // namespace

Json spin_field_to_json(const SpinFieldSpec& spec) {
  return std::visit(
      [](const auto& n) -> Json {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, RotationSpec>) {
          return Json{{"family", "rotation"},
                      {"plane", Json::array({n.plane_i, n.plane_j})},
                      {"angle", expr_string(n.angle)}};
        } else if constexpr (std::is_same_v<N, TypeASpec>) {
          Json fa = Json::array();
          for (const auto& e : n.fA) fa.push_back(expr_string(e));
          return Json{{"family", "typeA"},
                      {"normal_index", n.normal_index},
                      {"f", expr_string(n.f)},
                      {"fA", fa}};
        } else if constexpr (std::is_same_v<N, TypeBSpec>) {
          Json fb = Json::array();
          for (const auto& e : n.fB) fb.push_back(expr_string(e));
          return Json{{"family", "typeB"},
                      {"tangent_index", n.tangent_index},
                      {"f", expr_string(n.f)},
                      {"fB", fb}};
        } else if constexpr (std::is_same_v<N, ProductSpec>) {
          Json factors = Json::array();
          for (const auto& f : n.factors) factors.push_back(spin_field_to_json(f));
          return Json{{"family", "product"}, {"factors", factors}};
        } else if constexpr (std::is_same_v<N, ExampleFieldSpec>) {
          return Json{{"family", "paper_example"}};
        } else {
          return Json{{"family", "constant"}, {"terms", multivector_to_json(n.value)}};
        }
      },
      spec.node());
}

SpinFieldSpec spin_field_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("family"))
    throw SchemaError("spin field spec must be an object with a 'family' tag");
  std::string family = j.at("family").get<std::string>();

  if (family == "rotation") {
    RotationSpec r;
    if (!j.contains("plane") || !j.at("plane").is_array() || j.at("plane").size() != 2)
      throw SchemaError("rotation needs 'plane': [I, J]");
    r.plane_i = j.at("plane")[0].get<int>();
    r.plane_j = j.at("plane")[1].get<int>();
    if (r.plane_i < 0 || r.plane_j < 0 || r.plane_i > 9 || r.plane_j > 9 || r.plane_i >= r.plane_j)
      throw SchemaError("rotation plane indices must satisfy 0 <= I < J <= 9");
    if (!j.contains("angle")) throw SchemaError("rotation needs 'angle'");
    r.angle = expr_from_json(j.at("angle"), "angle");
    return SpinFieldSpec(std::move(r));
  }
  if (family == "typeA") {
    TypeASpec a;
    if (!j.contains("normal_index")) throw SchemaError("typeA needs 'normal_index'");
    a.normal_index = j.at("normal_index").get<int>();
    if (a.normal_index < 4 || a.normal_index > 9)
      throw SchemaError("typeA normal_index must be in 4..9");
    if (!j.contains("f") || !j.contains("fA")) throw SchemaError("typeA needs 'f' and 'fA'");
    a.f = expr_from_json(j.at("f"), "f");
    if (!j.at("fA").is_array() || j.at("fA").size() != 4)
      throw SchemaError("typeA 'fA' must hold 4 expressions");
    for (int mu = 0; mu < 4; ++mu)
      a.fA[static_cast<std::size_t>(mu)] =
          expr_from_json(j.at("fA")[static_cast<std::size_t>(mu)], "fA[" + std::to_string(mu) + "]");
    return SpinFieldSpec(std::move(a));
  }
  if (family == "typeB") {
    TypeBSpec b;
    if (!j.contains("tangent_index")) throw SchemaError("typeB needs 'tangent_index'");
    b.tangent_index = j.at("tangent_index").get<int>();
    if (b.tangent_index < 0 || b.tangent_index > 3)
      throw SchemaError("typeB tangent_index must be in 0..3");
    if (!j.contains("f") || !j.contains("fB")) throw SchemaError("typeB needs 'f' and 'fB'");
    b.f = expr_from_json(j.at("f"), "f");
    if (!j.at("fB").is_array() || j.at("fB").size() != 6)
      throw SchemaError("typeB 'fB' must hold 6 expressions");
    for (int k = 0; k < 6; ++k)
      b.fB[static_cast<std::size_t>(k)] =
          expr_from_json(j.at("fB")[static_cast<std::size_t>(k)], "fB[" + std::to_string(k) + "]");
    return SpinFieldSpec(std::move(b));
  }
  if (family == "product") {
    ProductSpec p;
    if (!j.contains("factors") || !j.at("factors").is_array() || j.at("factors").empty())
      throw SchemaError("product needs a nonempty 'factors' array");
    for (const auto& f : j.at("factors")) p.factors.push_back(spin_field_from_json(f));
    return SpinFieldSpec(std::move(p));
  }
  if (family == "paper_example") return SpinFieldSpec(ExampleFieldSpec{});
  if (family == "constant") {
    if (!j.contains("terms")) throw SchemaError("constant needs 'terms'");
    ConstantSpec c;
    c.value = multivector_from_json(j.at("terms"));
    return SpinFieldSpec(std::move(c));
  }
  throw SchemaError("unknown spin field family '" + family + "'");
}

Json connection_to_json(const ConnectionAtPoint& conn) {
  Json omega = Json::array(), h = Json::array(), a = Json::array();
  for (int al = 0; al < 4; ++al) {
    for (int m = 0; m < 4; ++m)
      for (int n = m + 1; n < 4; ++n)
        if (conn.omega[al][m][n] != 0.0)
          omega.push_back(Json{{"alpha", al}, {"mu", m}, {"nu", n}, {"value", conn.omega[al][m][n]}});
    for (int m = 0; m < 4; ++m)
      for (int i = 0; i < 6; ++i)
        if (conn.H[al][m][i] != 0.0)
          h.push_back(Json{{"alpha", al}, {"mu", m}, {"i", i + 4}, {"value", conn.H[al][m][i]}});
    for (int i = 0; i < 6; ++i)
      for (int jx = i + 1; jx < 6; ++jx)
        if (conn.A[al][i][jx] != 0.0)
          a.push_back(Json{{"alpha", al}, {"i", i + 4}, {"j", jx + 4}, {"value", conn.A[al][i][jx]}});
  }
  return Json{{"omega", omega}, {"H", h}, {"A", a}};
}

Json curvature_to_json(const CurvatureAtPoint& curv) {
  Json r = Json::array(), f = Json::array();
  for (int al = 0; al < 4; ++al) {
    for (int be = al + 1; be < 4; ++be) {
      for (int m = 0; m < 4; ++m)
        for (int n = m + 1; n < 4; ++n)
          if (curv.R[al][be][m][n] != 0.0)
            r.push_back(Json{{"alpha", al}, {"beta", be}, {"mu", m}, {"nu", n},
                             {"value", curv.R[al][be][m][n]}});
      for (int i = 0; i < 6; ++i)
        for (int jx = i + 1; jx < 6; ++jx)
          if (curv.F[al][be][i][jx] != 0.0)
            f.push_back(Json{{"alpha", al}, {"beta", be}, {"i", i + 4}, {"j", jx + 4},
                             {"value", curv.F[al][be][i][jx]}});
    }
  }
  return Json{{"R", r},
              {"F", f},
              {"gauss_residual", curv.gauss_residual},
              {"codazzi_residual", curv.codazzi_residual},
              {"ricci_residual", curv.ricci_residual}};
}

Json killing_to_json(const KillingData& data) {
  Json k = Json::array();
  for (const auto& biv : data.K) k.push_back(multivector_to_json(biv));
  return Json{{"x", vec4_to_json(data.x)},
              {"K", k},
              {"grade2_residual", data.grade2_residual},
              {"reconstruction_residual", data.reconstruction_residual},
              {"normalization_residual", data.normalization_residual},
              {"co_normalization_residual", data.co_normalization_residual}};
}

std::string connection_to_csv(const ConnectionAtPoint& conn) {
  std::string out = "block,alpha,first,second,value\n";
  for (int al = 0; al < 4; ++al) {
    for (int m = 0; m < 4; ++m)
      for (int n = m + 1; n < 4; ++n)
        if (conn.omega[al][m][n] != 0.0)
          out += "omega," + std::to_string(al) + ',' + std::to_string(m) + ',' + std::to_string(n) +
                 ',' + format_double17(conn.omega[al][m][n]) + '\n';
    for (int m = 0; m < 4; ++m)
      for (int i = 0; i < 6; ++i)
        if (conn.H[al][m][i] != 0.0)
          out += "H," + std::to_string(al) + ',' + std::to_string(m) + ',' + std::to_string(i + 4) +
                 ',' + format_double17(conn.H[al][m][i]) + '\n';
    for (int i = 0; i < 6; ++i)
      for (int jx = i + 1; jx < 6; ++jx)
        if (conn.A[al][i][jx] != 0.0)
          out += "A," + std::to_string(al) + ',' + std::to_string(i + 4) + ',' +
                 std::to_string(jx + 4) + ',' + format_double17(conn.A[al][i][jx]) + '\n';
  }
  return out;
}

std::string curvature_to_csv(const CurvatureAtPoint& curv) {
  std::string out = "block,alpha,beta,first,second,value\n";
  for (int al = 0; al < 4; ++al) {
    for (int be = al + 1; be < 4; ++be) {
      for (int m = 0; m < 4; ++m)
        for (int n = m + 1; n < 4; ++n)
          if (curv.R[al][be][m][n] != 0.0)
            out += "R," + std::to_string(al) + ',' + std::to_string(be) + ',' + std::to_string(m) +
                   ',' + std::to_string(n) + ',' + format_double17(curv.R[al][be][m][n]) + '\n';
      for (int i = 0; i < 6; ++i)
        for (int jx = i + 1; jx < 6; ++jx)
          if (curv.F[al][be][i][jx] != 0.0)
            out += "F," + std::to_string(al) + ',' + std::to_string(be) + ',' +
                   std::to_string(i + 4) + ',' + std::to_string(jx + 4) + ',' +
                   format_double17(curv.F[al][be][i][jx]) + '\n';
    }
  }
  return out;
}

Json vec4_to_json(const Vec4& x) { return Json::array({x[0], x[1], x[2], x[3]}); }

Vec4 vec4_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw SchemaError("a point must be an array of 4 numbers");
  Vec4 x;
  for (int i = 0; i < 4; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number())
      throw SchemaError("a point must be an array of 4 numbers");
    x[static_cast<std::size_t>(i)] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return x;
}

}  // namespace spinframe
