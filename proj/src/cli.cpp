#include "bargmann/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "bargmann/catalog.hpp"
#include "bargmann/contraction.hpp"
#include "bargmann/errors.hpp"
#include "bargmann/fock.hpp"
#include "bargmann/gkp.hpp"
#include "bargmann/json_io.hpp"
#include "bargmann/phase_space.hpp"
#include "bargmann/physicality.hpp"
#include "bargmann/stellar.hpp"

namespace bargmann::cli {

namespace {

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  Json j;
  in >> j;
  return j;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& kvs) {
  std::map<std::string, double> params;
  for (const std::string& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DomainError("parameter '" + kv + "' is not k=v");
    params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  return params;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t next = csv.find(',', pos);
    if (next == std::string::npos) next = csv.size();
    out.push_back(std::stoi(csv.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

struct Args {
  double hbar = 2.0;

  // triple
  std::string name;
  std::vector<std::string> params;

  // files
  std::string triple_path;
  std::string left_path, right_path;
  std::string pairs;  // "lidx-ridx,..."
  std::string cov_path;
  std::string from, to;
  std::string cutoffs;
  std::string circuit_path;
  std::string pattern;
  std::string flavor;  // decompose pure|mixed|formal
  int m_split = 1;
  double rank_tol = 1e-8;
  std::string check_as = "dm";
  std::string staircase;   // "15,15;0.4"
  std::string loss_sweep;  // "0:0.2:50"
  std::string direction = "sym";
  std::string out_format = "json";
  double loss_eta = 0.0;
  bool no_core = false;
  bool apply_unitary_out = false;
  Index direct_cutoff = 20;
  std::string fock_path;
};

gkp::StaircaseSpec parse_staircase(const std::string& text, double loss_eta) {
  const auto semi = text.find(';');
  if (semi == std::string::npos) {
    throw DomainError("staircase spec is 'db1,db2,...;theta1,theta2,...'");
  }
  gkp::StaircaseSpec spec;
  std::size_t pos = 0;
  const std::string dbs = text.substr(0, semi);
  while (pos < dbs.size()) {
    std::size_t next = dbs.find(',', pos);
    if (next == std::string::npos) next = dbs.size();
    spec.squeezings_db.push_back(std::stod(dbs.substr(pos, next - pos)));
    pos = next + 1;
  }
  const std::string thetas = text.substr(semi + 1);
  pos = 0;
  while (pos < thetas.size()) {
    std::size_t next = thetas.find(',', pos);
    if (next == std::string::npos) next = thetas.size();
    spec.thetas.push_back(std::stod(thetas.substr(pos, next - pos)));
    pos = next + 1;
  }
  spec.loss_eta = loss_eta;
  return spec;
}

int cmd_triple(const Args& a) {
  AbcTriple t = catalog::build(a.name, parse_params(a.params), a.hbar);
  emit(to_json(t));
  return 0;
}

int cmd_contract(const Args& a) {
  AbcTriple left = triple_from_json(load_json(a.left_path));
  AbcTriple right = triple_from_json(load_json(a.right_path));
  ContractionPlan plan;
  if (a.pairs.empty()) {
    plan = ContractionPlan::matching(left, right);
  } else {
    std::size_t pos = 0;
    while (pos < a.pairs.size()) {
      std::size_t next = a.pairs.find(',', pos);
      if (next == std::string::npos) next = a.pairs.size();
      const std::string pair = a.pairs.substr(pos, next - pos);
      const auto dash = pair.find('-');
      if (dash == std::string::npos) throw DomainError("pairs are 'leftIdx-rightIdx,...'");
      ContractionPlan::Pair p;
      p.left = std::stol(pair.substr(0, dash));
      p.right = std::stol(pair.substr(dash + 1));
      plan.pairs.push_back(p);
      pos = next + 1;
    }
  }
  emit(to_json(contract(left, right, plan)));
  return 0;
}

int cmd_convert(const Args& a) {
  const Json payload = load_json(a.triple_path);
  if (a.from == "cov" && a.to == "abc") {
    emit(to_json(state_to_abc(phase_space_state_from_json(payload))));
  } else if (a.from == "abc" && a.to == "cov") {
    emit(to_json(abc_to_state(triple_from_json(payload), a.hbar)));
  } else if (a.from == "symplectic" && a.to == "abc") {
    double hbar = a.hbar;
    SymplecticUnitary su = symplectic_from_json(payload, &hbar);
    emit(to_json(unitary_to_abc(su, hbar)));
  } else if (a.from == "abc" && a.to == "symplectic") {
    emit(to_json(abc_to_unitary(triple_from_json(payload), a.hbar), a.hbar));
  } else if (a.from == "xy" && a.to == "abc") {
    double hbar = a.hbar;
    ChannelXY ch = channel_xy_from_json(payload, &hbar);
    emit(to_json(channel_to_abc(ch, hbar)));
  } else if (a.from == "abc" && a.to == "xy") {
    emit(to_json(abc_to_channel(triple_from_json(payload), a.hbar), a.hbar));
  } else {
    throw DomainError("unsupported conversion " + a.from + " -> " + a.to);
  }
  return 0;
}

int cmd_fock(const Args& a) {
  AbcTriple t = triple_from_json(load_json(a.triple_path));
  std::vector<Index> cutoffs;
  for (int c : parse_int_list(a.cutoffs)) cutoffs.push_back(c);
  if (cutoffs.size() == 1) cutoffs.assign(static_cast<std::size_t>(t.dim()), cutoffs[0]);
  emit(to_json(fock_amplitudes(t, cutoffs)));
  return 0;
}

int cmd_herald(const Args& a) {
  CircuitSpec circuit = circuit_from_json(load_json(a.circuit_path));
  CircuitState state = run_circuit(circuit);
  if (state.is_density) throw DomainError("herald CLI path expects a pure circuit");
  HeraldSpec spec;
  if (circuit.herald) {
    spec = *circuit.herald;
  }
  if (!a.pattern.empty()) {
    spec.pattern = parse_int_list(a.pattern);
    if (spec.measured_modes.empty()) {
      // default: the last |pattern| modes
      const int n = circuit.n_modes;
      for (int i = n - static_cast<int>(spec.pattern.size()); i < n; ++i) {
        spec.measured_modes.push_back(i);
      }
    }
  }
  HeraldOptions options;
  options.use_core_decomposition = !a.no_core;
  options.direct_cutoff = a.direct_cutoff;
  HeraldResult result = herald(state.state, spec, options);
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["core_vector"] = to_json(result.amplitudes);
  j["unitary"] = to_json(result.unitary);
  j["exact"] = result.exact;
  j["tail_norm"] = result.tail_norm;
  Json kept = Json::array();
  for (int m : result.kept_modes) kept.push_back(m);
  j["kept_modes"] = kept;
  if (a.apply_unitary_out && result.kept_modes.size() == 1 && result.amplitudes.rank() == 1) {
    const Index dim = result.amplitudes.shape()[0];
    const Index cutoff = std::max<Index>(a.direct_cutoff, dim);
    FockArray u_fock = fock_amplitudes(reorder(result.unitary, OrderingTag::OutputInput),
                                       {cutoff, cutoff}, {.guard_divergence = false});
    FockArray applied(std::vector<Index>{cutoff});
    for (Index n = 0; n < cutoff; ++n) {
      Complex acc{0.0, 0.0};
      for (Index k = 0; k < dim; ++k) {
        acc += u_fock.at({n, k}) * result.amplitudes.at({k});
      }
      applied.at({n}) = acc;
    }
    j["applied_vector"] = to_json(applied);
  }
  emit(j);
  return 0;
}

int cmd_decompose(const Args& a) {
  AbcTriple t = triple_from_json(load_json(a.triple_path));
  Json j;
  j["schema_version"] = kSchemaVersion;
  if (a.flavor == "pure") {
    stellar::PureDecomposition dec = stellar::pure_decompose(t, a.m_split);
    j["core"] = to_json(dec.core);
    j["transform"] = to_json(dec.unitary);
    j["feasible"] = true;
  } else if (a.flavor == "mixed") {
    stellar::MixedOptions opts;
    opts.rank_tolerance = a.rank_tol;
    stellar::MixedDecomposition dec = stellar::mixed_decompose(t, a.m_split, opts);
    j["core"] = to_json(dec.core);
    j["transform"] = to_json(dec.channel);
    j["feasible"] = dec.feasible;
    j["rank_witness"] = dec.rank_witness;
    j["core_is_pure"] = dec.core_is_pure;
  } else if (a.flavor == "formal") {
    stellar::FormalDecomposition dec = stellar::formal_decompose(t, a.m_split);
    j["core"] = to_json(dec.core_vector);
    j["transform"] = to_json(dec.t_operator);
    j["feasible"] = true;
  } else {
    throw DomainError("decompose flavor must be pure|mixed|formal");
  }
  emit(j);
  return 0;
}

int cmd_check(const Args& a) {
  AbcTriple t = triple_from_json(load_json(a.triple_path));
  PhysicalityReport report;
  bool ok = false;
  if (a.check_as == "dm") {
    report = check_density_matrix(t);
    ok = report.positive && report.trace_class;
  } else if (a.check_as == "channel") {
    report = check_cptp(t);
    ok = report.cp && report.tp;
  } else if (a.check_as == "ket") {
    Eigen::JacobiSVD<Matrix> svd(t.A());
    const double norm = t.dim() > 0 ? svd.singularValues()(0) : 0.0;
    report.margins["ket_A_norm"] = norm;
    report.hermitian = true;
    report.positive = norm < 1.0;
    ok = norm < 1.0;
  } else {
    throw DomainError("check --as must be dm|channel|ket");
  }
  emit(to_json(report));
  return ok ? 0 : 1;
}

int cmd_gkp_bound(const Args& a) {
  gkp::BoundOptions options;
  if (a.direction == "q") {
    options.figure = gkp::FigureOfMerit::DirectionQ;
  } else if (a.direction == "p") {
    options.figure = gkp::FigureOfMerit::DirectionP;
  } else if (a.direction == "sym") {
    options.figure = gkp::FigureOfMerit::Symmetric;
  } else {
    throw DomainError("direction must be q|p|sym");
  }

  if (!a.staircase.empty() && !a.loss_sweep.empty()) {
    gkp::StaircaseSpec base = parse_staircase(a.staircase, 0.0);
    double lo = 0.0, hi = 0.2;
    int points = 50;
    {
      std::size_t c1 = a.loss_sweep.find(':');
      std::size_t c2 = a.loss_sweep.rfind(':');
      if (c1 == std::string::npos || c2 == c1) throw DomainError("sweep is 'lo:hi:points'");
      lo = std::stod(a.loss_sweep.substr(0, c1));
      hi = std::stod(a.loss_sweep.substr(c1 + 1, c2 - c1 - 1));
      points = std::stoi(a.loss_sweep.substr(c2 + 1));
    }
    std::vector<gkp::SweepRow> rows = gkp::loss_sweep(base, lo, hi, points, a.hbar);
    if (a.out_format == "csv") {
      std::cout << "eta,bound_db_sdp,bound_db_stellar,gap\n";
      char line[256];
      for (const gkp::SweepRow& r : rows) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", r.eta, r.bound_db_sdp,
                      r.bound_db_stellar, r.gap);
        std::cout << line;
      }
    } else {
      Json arr = Json::array();
      for (const gkp::SweepRow& r : rows) {
        arr.push_back(Json{{"eta", r.eta},
                           {"bound_db_sdp", r.bound_db_sdp},
                           {"bound_db_stellar", r.bound_db_stellar},
                           {"gap", r.gap}});
      }
      emit(Json{{"schema_version", kSchemaVersion}, {"sweep", arr}});
    }
    return 0;
  }

  PhaseSpaceState ps = [&] {
    if (!a.staircase.empty()) {
      gkp::StaircaseSpec spec = parse_staircase(a.staircase, a.loss_eta);
      return gkp::build_staircase(spec, a.hbar).cov;
    }
    return phase_space_state_from_json(load_json(a.cov_path));
  }();
  gkp::BoundResult bound = gkp::sdp_bound(ps, a.m_split, options);
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["objective_sigma2"] = bound.objective;
  j["bound_db"] = bound.effective_squeezing_bound_db;
  j["bound_on_abs_trace"] = bound.bound_on_abs_trace;
  j["dual_value"] = bound.dual_value;
  j["gap"] = bound.gap;
  j["status"] = sdp::to_string(bound.status);
  Json z = Json::array();
  for (Index i = 0; i < bound.z.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < bound.z.cols(); ++k) {
      row.push_back(Json::array({bound.z(i, k).real(), bound.z(i, k).imag()}));
    }
    z.push_back(row);
  }
  j["Z"] = z;
  emit(j);
  return 0;
}

int cmd_effsq(const Args& a) {
  gkp::EffectiveSqueezing eff;
  if (!a.cov_path.empty()) {
    eff = gkp::effective_squeezing(phase_space_state_from_json(load_json(a.cov_path)));
  } else if (!a.fock_path.empty()) {
    Json j = load_json(a.fock_path);
    const Json& amps = j.at("amplitudes");
    FockArray state(std::vector<Index>{static_cast<Index>(amps.size())});
    for (std::size_t i = 0; i < amps.size(); ++i) {
      state.data()[i] = Complex(amps[i][0].get<double>(), amps[i][1].get<double>());
    }
    eff = gkp::effective_squeezing(state, a.hbar);
  } else {
    throw DomainError("effsq needs --cov or --fock");
  }
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["sigma_q2"] = eff.sigma_q2;
  j["sigma_p2"] = eff.sigma_p2;
  j["sigma_sym2"] = eff.sigma_sym2;
  j["db_sym"] = eff.db_sym;
  emit(j);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Bargmann calculus for Gaussian quantum objects"};
  app.require_subcommand(1);
  Args a;
  app.add_option("--hbar", a.hbar, "hbar convention (default 2)");

  CLI::App* triple = app.add_subcommand("triple", "emit a catalog triple as JSON");
  triple->add_option("name", a.name)->required();
  triple->add_option("--params", a.params, "k=v parameter list");

  CLI::App* contract_cmd = app.add_subcommand("contract", "contract two triples");
  contract_cmd->add_option("--left", a.left_path)->required();
  contract_cmd->add_option("--right", a.right_path)->required();
  contract_cmd->add_option("--pairs", a.pairs, "wire index pairs 'l-r,l-r'; default matching");

  CLI::App* convert = app.add_subcommand("convert", "phase-space <-> Abc conversion");
  convert->add_option("--from", a.from)->required();
  convert->add_option("--to", a.to)->required();
  convert->add_option("--in", a.triple_path, "input JSON payload")->required();

  CLI::App* fock_cmd = app.add_subcommand("fock", "Fock amplitudes of a triple");
  fock_cmd->add_option("--triple", a.triple_path)->required();
  fock_cmd->add_option("--cutoff", a.cutoffs, "per-wire cutoffs n[,n...]")->required();

  CLI::App* herald_cmd = app.add_subcommand("herald", "exact heralded state of a circuit");
  herald_cmd->add_option("--circuit", a.circuit_path)->required();
  herald_cmd->add_option("--pattern", a.pattern, "photon counts k1,k2,...");
  herald_cmd->add_flag("--no-core", a.no_core, "skip the core decomposition (truncated path)");
  herald_cmd->add_option("--cutoff", a.direct_cutoff, "cutoff for the truncated path");
  herald_cmd->add_flag("--apply", a.apply_unitary_out,
                       "also emit the unitary applied to the core vector (truncated)");

  CLI::App* decomp = app.add_subcommand("decompose", "stellar decompositions");
  decomp->add_option("flavor", a.flavor, "pure|mixed|formal")->required();
  decomp->add_option("--triple", a.triple_path)->required();
  decomp->add_option("--m", a.m_split, "modes kept on the transform side")->required();
  decomp->add_option("--rank-tol", a.rank_tol, "rank decision threshold");

  CLI::App* check = app.add_subcommand("check", "physicality certification");
  check->add_option("--triple", a.triple_path)->required();
  check->add_option("--as", a.check_as, "dm|channel|ket");

  CLI::App* bound = app.add_subcommand("gkp-bound", "SDP bound on GKP quality");
  bound->add_option("--staircase", a.staircase, "'db1,db2,...;theta1,...'");
  bound->add_option("--loss-sweep", a.loss_sweep, "'lo:hi:points' loss sweep");
  bound->add_option("--loss", a.loss_eta, "loss fraction for a single staircase bound");
  bound->add_option("--cov", a.cov_path, "covariance JSON payload");
  bound->add_option("--m", a.m_split, "kept (GKP) modes");
  bound->add_option("--direction", a.direction, "q|p|sym");
  bound->add_option("--out", a.out_format, "json|csv");

  CLI::App* effsq = app.add_subcommand("effsq", "effective squeezing of a state");
  effsq->add_option("--cov", a.cov_path, "covariance JSON payload");
  effsq->add_option("--fock", a.fock_path, "single-mode Fock amplitudes JSON");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (triple->parsed()) return cmd_triple(a);
    if (contract_cmd->parsed()) return cmd_contract(a);
    if (convert->parsed()) return cmd_convert(a);
    if (fock_cmd->parsed()) return cmd_fock(a);
    if (herald_cmd->parsed()) return cmd_herald(a);
    if (decomp->parsed()) return cmd_decompose(a);
    if (check->parsed()) return cmd_check(a);
    if (bound->parsed()) return cmd_gkp_bound(a);
    if (effsq->parsed()) return cmd_effsq(a);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace bargmann::cli
