#include "ewfs/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace ewfs {

namespace {

SystemLabel label_from_json(const json& j, const std::string& fallback_name) {
  SystemLabel l;
  l.name = j.value("name", fallback_name);
  l.dim = j.at("dim").get<int>();
  return l;
}

CVec vector_from_json(const json& j) {
  CVec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = complex_from_json(j[i]);
  return v;
}

std::vector<CVec> basis_from_json(const json& j) {
  std::vector<CVec> out;
  for (const auto& vec : j) out.push_back(vector_from_json(vec));
  return out;
}

// Array nesting depth along the first-element path. Measurement vectors use
// [re, im] leaf pairs, so a flat basis nests 3 deep and projector groups 4.
int nesting_depth(const json& j) {
  int depth = 0;
  const json* cur = &j;
  while (cur->is_array() && !cur->empty()) {
    cur = &(*cur)[0];
    ++depth;
  }
  return depth;
}

Measurement measurement_from_json(const json& j,
                                  const std::vector<SystemLabel>& factors) {
  if (nesting_depth(j) >= 4)
    return Measurement::from_groups(factors, [&] {
      std::vector<std::vector<CVec>> groups;
      for (const auto& g : j) groups.push_back(basis_from_json(g));
      return groups;
    }());
  return Measurement::from_basis(factors, basis_from_json(j));
}

SuperobserverSetting setting_from_json(const json& j, const PartySide& side) {
  if (j.is_array())  // bare basis: a direct measurement of the system
    return SuperobserverSetting::direct_projective(
        measurement_from_json(j, {side.system}));
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "pointer_ask") return SuperobserverSetting::pointer_ask();
  const json& payload = j.contains("basis") ? j.at("basis") : j.at("projectors");
  if (kind == "reverse_and_measure")
    return SuperobserverSetting::reverse_and_measure(
        measurement_from_json(payload, {side.system}));
  if (kind == "direct_projective") {
    // On the system alone, or on system (x) pointer when lengths call for it.
    const json& first = nesting_depth(payload) >= 4 ? payload[0][0] : payload[0];
    if (static_cast<long>(first.size()) == side.system.dim)
      return SuperobserverSetting::direct_projective(
          measurement_from_json(payload, {side.system}));
    return SuperobserverSetting::direct_projective(
        measurement_from_json(payload, {side.system, side.pointer}));
  }
  throw std::invalid_argument("unknown setting kind '" + kind + "'");
}

}  // namespace

json complex_to_json(const cdouble& z) { return json::array({z.real(), z.imag()}); }

cdouble complex_from_json(const json& j) {
  if (j.is_number()) return cdouble(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2)
    return cdouble(j[0].get<double>(), j[1].get<double>());
  throw std::invalid_argument("complex entries must be numbers or [re, im]");
}

json table_to_json(const CorrelationTable& t) {
  json p = json::array();
  for (int x = 0; x < t.nx; ++x) {
    json px = json::array();
    for (int y = 0; y < t.ny; ++y) {
      json py = json::array();
      for (int a = 0; a < t.ka; ++a) {
        json pa = json::array();
        for (int b = 0; b < t.kb; ++b) pa.push_back(t.at(x, y, a, b));
        py.push_back(std::move(pa));
      }
      px.push_back(std::move(py));
    }
    p.push_back(std::move(px));
  }
  return json{{"nx", t.nx},
              {"ny", t.ny},
              {"ka", t.ka},
              {"kb", t.kb},
              {"p", std::move(p)},
              {"setting_indexing", kIndexingNote}};
}

CorrelationTable table_from_json(const json& j) {
  CorrelationTable t;
  t.nx = j.at("nx").get<int>();
  t.ny = j.at("ny").get<int>();
  t.ka = j.at("ka").get<int>();
  t.kb = j.at("kb").get<int>();
  if (t.nx < 1 || t.ny < 1 || t.ka < 1 || t.kb < 1)
    throw std::invalid_argument("table dimensions must be positive");
  t.p.assign(t.size(), 0.0);
  const json& p = j.at("p");
  for (int x = 0; x < t.nx; ++x)
    for (int y = 0; y < t.ny; ++y)
      for (int a = 0; a < t.ka; ++a)
        for (int b = 0; b < t.kb; ++b)
          t.at(x, y, a, b) = p.at(x).at(y).at(a).at(b).get<double>();
  return t;
}

json ns_report_to_json(const NoSignallingReport& r) {
  return json{{"alice_deviation", r.alice_deviation},
              {"bob_deviation", r.bob_deviation},
              {"normalization_deviation", r.normalization_deviation},
              {"pass", r.pass()}};
}

json inequality_to_json(const Inequality& iq) {
  json coeffs = json::array();
  for (int x = 0; x < iq.dims.nx; ++x) {
    json cx = json::array();
    for (int y = 0; y < iq.dims.ny; ++y) {
      json cy = json::array();
      for (int a = 0; a < iq.dims.ka; ++a) {
        json ca = json::array();
        for (int b = 0; b < iq.dims.kb; ++b)
          ca.push_back(iq.coeffs[iq.dims.index(x, y, a, b)]);
        cy.push_back(std::move(ca));
      }
      cx.push_back(std::move(cy));
    }
    coeffs.push_back(std::move(cx));
  }
  return json{{"nx", iq.dims.nx},     {"ny", iq.dims.ny},
              {"ka", iq.dims.ka},     {"kb", iq.dims.kb},
              {"coeffs", std::move(coeffs)}, {"bound", iq.bound},
              {"setting_indexing", kIndexingNote}};
}

Inequality inequality_from_json(const json& j) {
  Inequality iq;
  iq.dims = {j.at("nx").get<int>(), j.at("ny").get<int>(),
             j.at("ka").get<int>(), j.at("kb").get<int>()};
  iq.coeffs = Eigen::VectorXd::Zero(iq.dims.size());
  const json& coeffs = j.at("coeffs");
  for (int x = 0; x < iq.dims.nx; ++x)
    for (int y = 0; y < iq.dims.ny; ++y)
      for (int a = 0; a < iq.dims.ka; ++a)
        for (int b = 0; b < iq.dims.kb; ++b)
          iq.coeffs[iq.dims.index(x, y, a, b)] =
              coeffs.at(x).at(y).at(a).at(b).get<double>();
  iq.bound = j.at("bound").get<double>();
  return iq;
}

json certificate_to_json(const MembershipCertificate& cert) {
  json witness;
  if (cert.verdict == MembershipCertificate::Verdict::Inside) {
    witness["weights"] = cert.weights;
    if (!cert.blocks.empty()) {
      json blocks = json::array();
      for (const auto& b : cert.blocks) {
        json arr = json::array();
        for (long i = 0; i < b.size(); ++i) arr.push_back(b[i]);
        blocks.push_back(std::move(arr));
      }
      witness["blocks"] = std::move(blocks);
    }
  } else {
    witness["inequality"] = inequality_to_json(*cert.separating);
  }
  return json{{"verdict", cert.verdict == MembershipCertificate::Verdict::Inside
                              ? "inside"
                              : "outside"},
              {"gap", cert.gap},
              {"witness", std::move(witness)}};
}

json vertex_set_to_json(const VertexSet& vs) {
  json arr = json::array();
  for (const auto& v : vs.vertices)
    arr.push_back(table_to_json(table_from_point(vs.dims, v)));
  return arr;
}

BubbleScenario scenario_from_json(const json& j) {
  BubbleScenario sc;
  const json& systems = j.at("systems");
  sc.alice.system = label_from_json(systems.at("sa"), "SA");
  sc.bob.system = label_from_json(systems.at("sb"), "SB");
  sc.alice.pointer = systems.contains("f") ? label_from_json(systems.at("f"), "F")
                                           : SystemLabel{"F", 1};
  sc.bob.pointer = systems.contains("d") ? label_from_json(systems.at("d"), "D")
                                         : SystemLabel{"D", 1};

  sc.initial = StateVector({sc.alice.system, sc.bob.system},
                           vector_from_json(j.at("initial_amps")));
  if (j.contains("friend_basis"))
    sc.alice.friend_basis = basis_from_json(j.at("friend_basis"));
  if (j.contains("bob_friend_basis"))
    sc.bob.friend_basis = basis_from_json(j.at("bob_friend_basis"));

  for (const auto& s : j.at("alice_settings"))
    sc.alice.settings.push_back(setting_from_json(s, sc.alice));
  for (const auto& s : j.at("bob_settings"))
    sc.bob.settings.push_back(setting_from_json(s, sc.bob));
  return sc;
}

OptimizeConfig optimize_config_from_json(const json& j) {
  OptimizeConfig c;
  c.restarts = j.value("restarts", c.restarts);
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  c.max_sweeps = j.value("max_iters", c.max_sweeps);
  c.tol = j.value("tol", c.tol);
  c.optimize_state = j.value("optimize_state", c.optimize_state);
  return c;
}

json violation_result_to_json(const ViolationResult& r) {
  json alice = json::array(), bob = json::array();
  for (const auto& a : r.params.alice)
    alice.push_back({{"theta", a.theta}, {"phi", a.phi}});
  for (const auto& b : r.params.bob)
    bob.push_back({{"theta", b.theta}, {"phi", b.phi}});
  json trace = json::array();
  for (const auto& e : r.trace)
    trace.push_back(
        {{"restart", e.restart}, {"sweep", e.sweep}, {"value", e.value}});
  return json{{"params",
               {{"alice", std::move(alice)},
                {"bob", std::move(bob)},
                {"state_angle", r.params.state_angle}}},
              {"value", r.value},
              {"bound", r.bound},
              {"margin", r.margin},
              {"trace", std::move(trace)}};
}

json settlement_to_json(const SettlementReport& rep) {
  json joint = json::array();
  for (const auto& o : rep.joint)
    joint.push_back({{"wallet", o.wallet_label},
                     {"hit", o.hit},
                     {"probability", o.probability},
                     {"gain", o.gain}});
  json gains = json::array();
  for (const auto& [g, p] : rep.gains)
    gains.push_back({{"gain", g}, {"probability", p}});
  return json{{"joint", std::move(joint)},
              {"gains", std::move(gains)},
              {"expected_gain", rep.expected_gain},
              {"refunded", rep.refunded}};
}

json audit_to_json(const AuditReport& rep) {
  return json{{"p0", rep.p0},
              {"p2", rep.p2},
              {"p2_given_0", rep.p2_0},
              {"p2_given_1", rep.p2_1},
              {"interrogation",
               {{"external", rep.external_x1},
                {"internal_marginal", rep.internal_marginal_x1},
                {"gap", rep.gap_x1}}},
              {"reversal",
               {{"external", rep.external_x2},
                {"internal_marginal", rep.internal_marginal_x2},
                {"gap", rep.gap_x2}}},
              {"coherence",
               {{"no_bet", rep.offdiag_no_bet},
                {"internal_bet", rep.offdiag_internal_bet}}},
              {"wallet_uninformative", rep.wallet_uninformative},
              {"near_degenerate", rep.near_degenerate},
              {"special_case_tension", rep.special_case_tension}};
}

json retro_report_to_json(const RetroReport& rep) {
  return json{{"p_c_interrogation", rep.p_interrogation},
              {"p_c_alternative", rep.p_alternative},
              {"l1_distance", rep.l1_distance},
              {"setting_dependence_flagged", rep.flagged}};
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file '" + path + "'");
  return json::parse(in);  // parse errors carry the byte position
}

}  // namespace ewfs
