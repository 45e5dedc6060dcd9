#include "idealkit/json_io.hpp"

#include "idealkit/parser.hpp"

namespace idealkit {

namespace {

Json int_to_json(const Int& n) {
  if (n >= std::numeric_limits<std::int64_t>::min() &&
      n <= std::numeric_limits<std::int64_t>::max())
    return n.convert_to<std::int64_t>();
  return n.str();
}

Int int_from_json(const Json& j) {
  if (j.is_number_integer()) return Int(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return Int(j.get<std::uint64_t>());
  if (j.is_string()) return Int(j.get<std::string>());
  throw Error(ErrorKind::Parse, "expected an integer or integer string");
}

}  // namespace

Json rational_to_json(const Rat& r) {
  Json j;
  j["num"] = int_to_json(numerator(r));
  j["den"] = int_to_json(denominator(r));
  return j;
}

Rat rational_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("num") || !j.contains("den"))
    throw Error(ErrorKind::Parse, "expected {\"num\":...,\"den\":...}");
  Int den = int_from_json(j.at("den"));
  if (den == 0) throw Error(ErrorKind::Parse, "zero denominator");
  return Rat(int_from_json(j.at("num")), den);
}

Json qvalue_to_json(const QValue& v) {
  if (v.is_infinite()) return "inf";
  if (v.is_root()) {
    Json j = rational_to_json(v.root_base());
    j["root"] = v.root_index();
    return j;
  }
  return rational_to_json(v.rat());
}

QValue qvalue_from_json(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return QValue::infinity();
  Rat r = rational_from_json(j);
  if (j.contains("root")) return QValue::root(r, j.at("root").get<unsigned>());
  return QValue::rational(r);
}

Json natset_to_json(const NatSet& s) {
  Json j = Json::array();
  for (Nat x : s) j.push_back(x);
  return j;
}

NatSet natset_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "expected an array of naturals");
  std::vector<Nat> pts;
  for (const auto& x : j) pts.push_back(x.get<Nat>());
  return NatSet::from_unsorted(std::move(pts));
}

Json gridset_to_json(const GridSet& s) {
  Json j = Json::array();
  for (const auto& p : s) j.push_back(Json::array({p.row, p.col}));
  return j;
}

GridSet gridset_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "expected an array of [row,col] pairs");
  std::vector<GridPoint> pts;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2)
      throw Error(ErrorKind::Parse, "expected a [row,col] pair");
    pts.push_back(GridPoint{p[0].get<Nat>(), p[1].get<Nat>()});
  }
  return GridSet::from_unsorted(std::move(pts));
}

Json anyset_to_json(const AnySet& s) {
  return sort_of(s) == SetSort::Nat ? natset_to_json(std::get<NatSet>(s))
                                    : gridset_to_json(std::get<GridSet>(s));
}

template <class SetT>
Json family_to_json(const std::vector<SetT>& members) {
  Json j = Json::array();
  for (const SetT& s : members) {
    if constexpr (std::is_same_v<SetT, NatSet>) {
      j.push_back(natset_to_json(s));
    } else {
      j.push_back(gridset_to_json(s));
    }
  }
  return j;
}

namespace {

const Json& family_payload(const Json& j) {
  if (j.is_object() && j.contains("family")) return j.at("family");
  return j;
}

}  // namespace

std::vector<NatSet> nat_family_from_json(const Json& j) {
  const Json& arr = family_payload(j);
  if (!arr.is_array()) throw Error(ErrorKind::Parse, "expected a family array");
  std::vector<NatSet> members;
  for (const auto& m : arr) members.push_back(natset_from_json(m));
  return members;
}

std::vector<GridSet> grid_family_from_json(const Json& j) {
  const Json& arr = family_payload(j);
  if (!arr.is_array()) throw Error(ErrorKind::Parse, "expected a family array");
  std::vector<GridSet> members;
  for (const auto& m : arr) members.push_back(gridset_from_json(m));
  return members;
}

template <class SetT>
Json certificate_to_json(const ObstructionCertificate<SetT>& cert) {
  Json j;
  j["version"] = 1;
  j["kind"] = "obstruction";
  j["epsilon"] = qvalue_to_json(cert.epsilon);
  j["delta"] = qvalue_to_json(cert.delta);
  j["t"] = cert.t;
  j["family"] = family_to_json(cert.family);
  Json values = Json::array();
  for (const QValue& v : cert.member_values) values.push_back(qvalue_to_json(v));
  j["memberValues"] = values;
  j["minUnionValue"] = qvalue_to_json(cert.min_union_value);
  j["expr"] = cert.expr ? cert.expr->to_dsl() : "";
  return j;
}

namespace {

template <class SetT>
ObstructionCertificate<SetT> certificate_from_json_impl(
    const Json& j, Nat window, std::vector<SetT> (*family_parse)(const Json&)) {
  if (!j.is_object() || j.value("kind", "") != std::string("obstruction"))
    throw Error(ErrorKind::Parse, "expected an obstruction certificate");
  ObstructionCertificate<SetT> cert;
  cert.expr = parse_expr(j.at("expr").get<std::string>(), window);
  cert.family = family_parse(j.at("family"));
  cert.epsilon = qvalue_from_json(j.at("epsilon"));
  cert.delta = qvalue_from_json(j.at("delta"));
  cert.t = j.at("t").get<std::size_t>();
  for (const auto& v : j.at("memberValues")) cert.member_values.push_back(qvalue_from_json(v));
  cert.min_union_value = qvalue_from_json(j.at("minUnionValue"));
  return cert;
}

}  // namespace

ObstructionCertificate<NatSet> nat_certificate_from_json(const Json& j, Nat window) {
  return certificate_from_json_impl<NatSet>(j, window, &nat_family_from_json);
}

ObstructionCertificate<GridSet> grid_certificate_from_json(const Json& j, Nat window) {
  return certificate_from_json_impl<GridSet>(j, window, &grid_family_from_json);
}

Json pathology_report_to_json(const PathologyReport& report) {
  Json j;
  j["version"] = 1;
  j["kind"] = "pathology";
  Json env;
  env["certified"] = rational_to_json(report.certified);
  env["lp"] = report.lp_value;
  j["envelope"] = env;
  j["gap"] = qvalue_to_json(report.gap);
  j["targetValue"] = qvalue_to_json(report.target_value);
  Json witness = Json::array();
  if (sort_of(report.support) == SetSort::Nat) {
    const NatSet& s = std::get<NatSet>(report.support);
    for (std::size_t i = 0; i < s.size(); ++i)
      witness.push_back(Json::array({s[i], rational_to_json(report.witness[i])}));
  } else {
    const GridSet& s = std::get<GridSet>(report.support);
    for (std::size_t i = 0; i < s.size(); ++i)
      witness.push_back(Json::array(
          {Json::array({s[i].row, s[i].col}), rational_to_json(report.witness[i])}));
  }
  j["witness"] = witness;
  j["target"] = anyset_to_json(report.target);
  j["support"] = anyset_to_json(report.support);
  j["lpStatus"] = report.lp_status;
  j["expr"] = report.expr ? report.expr->to_dsl() : "";
  return j;
}

bool pathology_report_revalidate(const Json& j, Nat window) {
  if (!j.is_object() || j.value("kind", "") != std::string("pathology")) return false;
  ExprPtr expr = parse_expr(j.at("expr").get<std::string>(), window);
  Rat certified = rational_from_json(j.at("envelope").at("certified"));

  std::vector<Rat> weights;
  AnySet support;
  if (expr->sort() == SetSort::Nat) {
    std::vector<Nat> pts;
    for (const auto& entry : j.at("witness")) {
      pts.push_back(entry.at(0).get<Nat>());
      weights.push_back(rational_from_json(entry.at(1)));
    }
    support = NatSet(std::move(pts));
  } else {
    std::vector<GridPoint> pts;
    for (const auto& entry : j.at("witness")) {
      pts.push_back(GridPoint{entry.at(0).at(0).get<Nat>(), entry.at(0).at(1).get<Nat>()});
      weights.push_back(rational_from_json(entry.at(1)));
    }
    support = GridSet(std::move(pts));
  }
  std::size_t n = weights.size();
  if (n > 20) return false;

  AnySet target = expr->sort() == SetSort::Nat
                      ? AnySet(natset_from_json(j.at("target")))
                      : AnySet(gridset_from_json(j.at("target")));

  Rat on_target = 0;
  for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
    Rat total = 0;
    std::vector<Nat> nat_pts;
    std::vector<GridPoint> grid_pts;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (std::size_t(1) << i))) continue;
      total += weights[i];
      if (expr->sort() == SetSort::Nat) {
        nat_pts.push_back(std::get<NatSet>(support)[i]);
      } else {
        grid_pts.push_back(std::get<GridSet>(support)[i]);
      }
    }
    QValue bound = expr->sort() == SetSort::Nat
                       ? expr->eval(NatSet(std::move(nat_pts)))
                       : expr->eval(GridSet(std::move(grid_pts)));
    if (QValue::rational(total) > bound) return false;
  }
  if (expr->sort() == SetSort::Nat) {
    const NatSet& s = std::get<NatSet>(support);
    const NatSet& t = std::get<NatSet>(target);
    for (std::size_t i = 0; i < n; ++i)
      if (t.contains(s[i])) on_target += weights[i];
  } else {
    const GridSet& s = std::get<GridSet>(support);
    const GridSet& t = std::get<GridSet>(target);
    for (std::size_t i = 0; i < n; ++i)
      if (t.contains(s[i])) on_target += weights[i];
  }
  return on_target == certified;
}

template Json family_to_json<NatSet>(const std::vector<NatSet>&);
template Json family_to_json<GridSet>(const std::vector<GridSet>&);
template Json certificate_to_json<NatSet>(const ObstructionCertificate<NatSet>&);
template Json certificate_to_json<GridSet>(const ObstructionCertificate<GridSet>&);

}  // namespace idealkit
