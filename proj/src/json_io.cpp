#include "bargmann/json_io.hpp"

#include <algorithm>

#include "bargmann/catalog.hpp"
#include "bargmann/contraction.hpp"
#include "bargmann/errors.hpp"

namespace bargmann {

namespace {

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw DomainError("complex values are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json real_matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd real_matrix_from_json(const Json& j) {
  if (!j.is_array()) throw DomainError("matrix must be an array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = rows > 0 ? static_cast<Index>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (static_cast<Index>(j[static_cast<std::size_t>(r)].size()) != cols) {
      throw DomainError("ragged matrix rows");
    }
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

void check_schema(const Json& j) {
  if (!j.contains("schema_version")) throw DomainError("missing schema_version");
  if (j["schema_version"].get<std::string>() != kSchemaVersion) {
    throw DomainError("unsupported schema_version '" +
                      j["schema_version"].get<std::string>() + "'");
  }
}

QuadOrder order_from_string(const std::string& name) {
  if (name == "xxpp") return QuadOrder::XXPP;
  if (name == "xpxp") return QuadOrder::XPXP;
  throw DomainError("unknown quadrature ordering '" + name + "'");
}

std::string order_to_string(QuadOrder order) {
  return order == QuadOrder::XXPP ? "xxpp" : "xpxp";
}

}  // namespace

Json to_json(const AbcTriple& obj) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json a = Json::array();
  for (Index i = 0; i < obj.dim(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < obj.dim(); ++k) row.push_back(complex_to_json(obj.A()(i, k)));
    a.push_back(row);
  }
  j["A"] = a;
  Json b = Json::array();
  for (Index i = 0; i < obj.dim(); ++i) b.push_back(complex_to_json(obj.b()(i)));
  j["b"] = b;
  j["c"] = complex_to_json(obj.c());
  Json wires = Json::array();
  for (const Wire& w : obj.layout().wires()) {
    wires.push_back(Json{{"mode", w.mode}, {"kind", to_string(w.kind)}});
  }
  j["layout"] = Json{{"wires", wires}, {"ordering_tag", to_string(obj.layout().tag())}};
  return j;
}

AbcTriple triple_from_json(const Json& j) {
  check_schema(j);
  const Json& a_json = j.at("A");
  const Index k = static_cast<Index>(a_json.size());
  Matrix a(k, k);
  for (Index i = 0; i < k; ++i) {
    if (static_cast<Index>(a_json[static_cast<std::size_t>(i)].size()) != k) {
      throw DomainError("A must be square");
    }
    for (Index c = 0; c < k; ++c) {
      a(i, c) = complex_from_json(a_json[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]);
    }
  }
  const Json& b_json = j.at("b");
  if (static_cast<Index>(b_json.size()) != k) throw DomainError("b length mismatch");
  Vector b(k);
  for (Index i = 0; i < k; ++i) b(i) = complex_from_json(b_json[static_cast<std::size_t>(i)]);
  Complex c = complex_from_json(j.at("c"));
  std::vector<Wire> wires;
  const Json& layout = j.at("layout");
  for (const Json& wj : layout.at("wires")) {
    auto kind = wire_kind_from_string(wj.at("kind").get<std::string>());
    if (!kind) throw DomainError("unknown wire kind '" + wj.at("kind").get<std::string>() + "'");
    wires.push_back({wj.at("mode").get<int>(), *kind});
  }
  auto tag = ordering_tag_from_string(layout.value("ordering_tag", "custom"));
  if (!tag) throw DomainError("unknown ordering tag");
  return AbcTriple(std::move(a), std::move(b), c, WireLayout(std::move(wires), *tag));
}

Json to_json(const PhaseSpaceState& ps) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["sigma"] = real_matrix_to_json(ps.sigma);
  Json mu = Json::array();
  for (Index i = 0; i < ps.mu.size(); ++i) mu.push_back(ps.mu(i));
  j["mu"] = mu;
  j["hbar"] = ps.hbar;
  j["ordering"] = order_to_string(ps.ordering);
  return j;
}

PhaseSpaceState phase_space_state_from_json(const Json& j) {
  check_schema(j);
  Eigen::MatrixXd sigma = real_matrix_from_json(j.at("sigma"));
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(sigma.rows());
  if (j.contains("mu")) {
    const Json& mj = j["mu"];
    if (static_cast<Index>(mj.size()) != sigma.rows()) throw DomainError("mu length mismatch");
    for (Index i = 0; i < mu.size(); ++i) mu(i) = mj[static_cast<std::size_t>(i)].get<double>();
  }
  const double hbar = j.value("hbar", 2.0);
  QuadOrder order = order_from_string(j.value("ordering", "xxpp"));
  return PhaseSpaceState(std::move(sigma), std::move(mu), hbar, order);
}

Json to_json(const SymplecticUnitary& su, double hbar) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["S"] = real_matrix_to_json(su.S);
  Json d = Json::array();
  for (Index i = 0; i < su.d.size(); ++i) d.push_back(su.d(i));
  j["d"] = d;
  j["hbar"] = hbar;
  j["ordering"] = order_to_string(su.ordering);
  return j;
}

SymplecticUnitary symplectic_from_json(const Json& j, double* hbar_out) {
  check_schema(j);
  Eigen::MatrixXd s = real_matrix_from_json(j.at("S"));
  Eigen::VectorXd d = Eigen::VectorXd::Zero(s.rows());
  if (j.contains("d")) {
    for (Index i = 0; i < d.size(); ++i) d(i) = j["d"][static_cast<std::size_t>(i)].get<double>();
  }
  if (hbar_out) *hbar_out = j.value("hbar", 2.0);
  return SymplecticUnitary(std::move(s), std::move(d),
                           order_from_string(j.value("ordering", "xxpp")));
}

Json to_json(const ChannelXY& ch, double hbar) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["X"] = real_matrix_to_json(ch.X);
  j["Y"] = real_matrix_to_json(ch.Y);
  Json d = Json::array();
  for (Index i = 0; i < ch.d.size(); ++i) d.push_back(ch.d(i));
  j["d"] = d;
  j["hbar"] = hbar;
  j["ordering"] = order_to_string(ch.ordering);
  return j;
}

ChannelXY channel_xy_from_json(const Json& j, double* hbar_out) {
  check_schema(j);
  Eigen::MatrixXd x = real_matrix_from_json(j.at("X"));
  Eigen::MatrixXd y = real_matrix_from_json(j.at("Y"));
  Eigen::VectorXd d = Eigen::VectorXd::Zero(x.rows());
  if (j.contains("d")) {
    for (Index i = 0; i < d.size(); ++i) d(i) = j["d"][static_cast<std::size_t>(i)].get<double>();
  }
  if (hbar_out) *hbar_out = j.value("hbar", 2.0);
  return ChannelXY(std::move(x), std::move(y), std::move(d),
                   order_from_string(j.value("ordering", "xxpp")));
}

Json to_json(const FockArray& fock) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json shape = Json::array();
  for (Index s : fock.shape()) shape.push_back(s);
  j["shape"] = shape;
  Json data = Json::array();
  for (const Complex& z : fock.data()) data.push_back(complex_to_json(z));
  j["amplitudes"] = data;
  return j;
}

Json to_json(const PhysicalityReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["hermitian"] = report.hermitian;
  j["positive"] = report.positive;
  j["trace_class"] = report.trace_class;
  j["cp"] = report.cp;
  j["tp"] = report.tp;
  Json margins;
  for (const auto& [name, value] : report.margins) margins[name] = value;
  j["margins"] = margins;
  return j;
}

CircuitSpec circuit_from_json(const Json& j) {
  check_schema(j);
  CircuitSpec spec;
  spec.n_modes = j.at("n_modes").get<int>();
  spec.hbar = j.value("hbar", 2.0);
  if (spec.n_modes < 1) throw DomainError("circuit needs at least one mode");
  for (const Json& oj : j.value("ops", Json::array())) {
    CircuitSpec::Op op;
    op.gate = oj.at("gate").get<std::string>();
    for (const Json& m : oj.at("modes")) op.modes.push_back(m.get<int>());
    for (int m : op.modes) {
      if (m < 0 || m >= spec.n_modes) throw DomainError("op names mode out of range");
    }
    if (oj.contains("params")) {
      for (auto it = oj["params"].begin(); it != oj["params"].end(); ++it) {
        op.params[it.key()] = it.value().get<double>();
      }
    }
    spec.ops.push_back(std::move(op));
  }
  if (j.contains("herald")) {
    HeraldSpec herald;
    for (const Json& m : j["herald"].at("modes")) herald.measured_modes.push_back(m.get<int>());
    for (const Json& p : j["herald"].at("pattern")) herald.pattern.push_back(p.get<int>());
    spec.herald = herald;
  }
  return spec;
}

CircuitState run_circuit(const CircuitSpec& spec) {
  CircuitState state{catalog::vacuum(spec.n_modes), false};
  for (const CircuitSpec::Op& op : spec.ops) {
    AbcTriple gate = catalog::build(op.gate, op.params, spec.hbar);
    const bool is_channel =
        !gate.layout().empty() && is_map_kind(gate.layout()[0].kind);
    const int gate_modes = static_cast<int>(gate.layout().modes().size());
    if (static_cast<int>(op.modes.size()) != gate_modes) {
      throw DomainError("op '" + op.gate + "' expects " + std::to_string(gate_modes) +
                        " modes");
    }
    // relabel gate wires onto the target modes
    std::vector<int> base = gate.layout().modes();
    AbcTriple placed = gate.relabeled([&](const Wire& w) {
      const auto pos = std::find(base.begin(), base.end(), w.mode) - base.begin();
      return Wire{op.modes[static_cast<std::size_t>(pos)], w.kind};
    });
    if (is_channel) {
      if (!state.is_density) {
        state.state = to_density_matrix(state.state);
        state.is_density = true;
      }
      state.state = apply_channel(placed, state.state, op.modes);
    } else {
      state.state = state.is_density ? apply_unitary_dm(placed, state.state, op.modes)
                                     : apply_unitary(placed, state.state, op.modes);
    }
  }
  return state;
}

}  // namespace bargmann
