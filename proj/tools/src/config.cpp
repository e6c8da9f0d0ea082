// Copyright 2026 The qtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtraj_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "qtraj/expression.hpp"
#include "qtraj/master_eq.hpp"
#include "qtraj/models.hpp"

namespace qtraj::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& what) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(fmt::format("{}: expected a non-negative integer, got '{}'", what, text));
  }
  return value;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    return parse_constant(text);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", what, e.what()));
  }
}

// One INI section. Every key must be read; leftovers are reported as unknown.
class Section {
 public:
  Section(const pt::ptree* node, std::string name) : node_(node), name_(std::move(name)) {}

  bool present() const { return node_ != nullptr; }
  const std::string& name() const { return name_; }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (node_ == nullptr) return std::nullopt;
    const auto it = node_->find(key);
    if (it == node_->not_found()) return std::nullopt;
    return trim(it->second.data());
  }

  std::string str(const std::string& key, const std::string& fallback) {
    const auto v = raw(key);
    return v ? *v : fallback;
  }

  std::string require(const std::string& key) {
    const auto v = raw(key);
    if (!v) throw ConfigError(fmt::format("[{}]: missing key '{}'", name_, key));
    return *v;
  }

  double number(const std::string& key, double fallback) {
    const auto v = raw(key);
    return v ? parse_number(*v, where(key)) : fallback;
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
    const auto v = raw(key);
    return v ? parse_unsigned(*v, where(key)) : fallback;
  }

  std::optional<TimeScalar> function(const std::string& key) {
    const auto v = raw(key);
    if (!v) return std::nullopt;
    try {
      const auto e = Expression::parse(*v);
      return e.to_time_scalar();
    } catch (const ConfigError& err) {
      throw ConfigError(fmt::format("{}: {}", where(key), err.what()));
    }
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const auto v = raw(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& item : split(*v, ',')) out.push_back(parse_number(item, where(key)));
    return out;
  }

  std::string where(const std::string& key) const { return fmt::format("[{}] {}", name_, key); }

  void finish() const {
    if (node_ == nullptr) return;
    for (const auto& [key, value] : *node_) {
      if (!used_.count(key)) {
        throw ConfigError(fmt::format("[{}]: unknown key '{}'", name_, key));
      }
    }
  }

 private:
  const pt::ptree* node_;
  std::string name_;
  std::set<std::string> used_;
};

struct Document {
  pt::ptree tree;

  Section section(const std::string& name) const {
    const auto it = tree.find(name);
    return Section(it == tree.not_found() ? nullptr : &it->second, name);
  }
};

Document read_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot read config file {}", path.string()));
  }
  Document doc;
  try {
    pt::ini_parser::read_ini(in, doc.tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}: line {}: {}", path.string(), e.line(), e.message()));
  }
  for (const auto& [key, value] : doc.tree) {
    if (value.empty() && !value.data().empty()) {
      throw ConfigError(fmt::format("{}: key '{}' outside of any section", path.string(), key));
    }
  }
  return doc;
}

void check_sections(const Document& doc, const std::set<std::string>& allowed, bool channels) {
  for (const auto& [key, value] : doc.tree) {
    if (allowed.count(key)) continue;
    if (channels && key.rfind("channel ", 0) == 0) continue;
    throw ConfigError(fmt::format("unknown section [{}]", key));
  }
}

RatePolicy parse_rate(const std::string& text, const std::string& where) {
  if (text == "abs") return rate::AbsValue{};
  const auto words = split_ws(text);
  if (words.size() == 2 && words[0] == "constant") {
    return rate::Constant{parse_number(words[1], where)};
  }
  try {
    return rate::Custom{Expression::parse(text).to_time_scalar()};
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  }
}

TimeScalar shifted_table(const std::vector<double>& times, const std::vector<double>& values, double shift) {
  const TimeScalar table = TimeScalar::tabulated(times, values);
  if (shift == 0.0) return table;
  return TimeScalar::function([table, shift](double t) { return table(t + shift); }, std::nullopt,
                              fmt::format("table(t + {})", shift));
}

// Columns t, S, Gamma with a header row.
models::PbgTable read_pbg_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read table {}", path.string()));
  models::PbgTable table;
  std::string line;
  std::getline(in, line);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 3) throw ConfigError(fmt::format("{}:{}: expected t,S,Gamma", path.string(), row));
    const std::string where = fmt::format("{}:{}", path.string(), row);
    table.times.push_back(parse_number(cells[0], where));
    table.lamb_shift.push_back(parse_number(cells[1], where));
    table.gamma.push_back(parse_number(cells[2], where));
  }
  if (table.times.size() < 2) throw ConfigError(fmt::format("{}: needs at least two rows", path.string()));
  for (std::size_t k = 1; k < table.times.size(); ++k) {
    if (!(table.times[k] > table.times[k - 1])) {
      throw ConfigError(fmt::format("{}: times must increase", path.string()));
    }
  }
  return table;
}

Observable parse_observable(const std::string& name, const std::string& text, std::size_t dim,
                            const std::string& where) {
  const auto space = text.find_first_of(" \t");
  const std::string kind = text.substr(0, space);
  const std::string arg = space == std::string::npos ? std::string() : trim(text.substr(space));
  try {
    if (kind == "basis") {
      const auto k = parse_unsigned(arg, where);
      if (k >= dim) throw ConfigError(fmt::format("{}: basis index {} outside dimension {}", where, k, dim));
      return basis_projector(name, k, dim);
    }
    if (kind == "site") {
      const auto site = parse_unsigned(arg, where);
      std::size_t sites = 0;
      while ((std::size_t{1} << sites) < dim) ++sites;
      if ((std::size_t{1} << sites) != dim || site < 1 || site > sites) {
        throw ConfigError(fmt::format("{}: no qubit site {} in dimension {}", where, site, dim));
      }
      return site_population(name, site - 1, sites);
    }
    if (kind == "vector") {
      ComplexVector v = parse_vector_literal(arg);
      if (static_cast<std::size_t>(v.size()) != dim) throw ConfigError(fmt::format("{}: wrong dimension", where));
      const double n = v.norm();
      if (n == 0.0) throw ConfigError(fmt::format("{}: zero vector", where));
      return projector_observable(name, v / n);
    }
    if (kind == "matrix") {
      const ComplexMatrix m = parse_matrix_literal(arg);
      if (static_cast<std::size_t>(m.rows()) != dim) throw ConfigError(fmt::format("{}: wrong dimension", where));
      return make_observable(name, m);
    }
    if (dim == 2 && (kind == "sigma_x" || kind == "sigma_y" || kind == "sigma_z") && arg.empty()) {
      const SparseOperator op =
          kind == "sigma_x" ? qubit::sigma_x() : (kind == "sigma_y" ? qubit::sigma_y() : qubit::sigma_z());
      return {name, op};
    }
  } catch (const NotHermitianError& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  }
  throw ConfigError(fmt::format("{}: cannot parse observable '{}'", where, text));
}

ComplexVector parse_initial(Section& s, const ComplexVector& fallback, std::size_t dim) {
  const auto text = s.raw("state");
  if (!text || *text == "default") {
    if (fallback.size() == 0) throw ConfigError("[initial]: this model needs an explicit state");
    return fallback;
  }
  ComplexVector v;
  const auto space = text->find_first_of(" \t");
  const std::string kind = text->substr(0, space);
  const std::string arg = space == std::string::npos ? std::string() : trim(text->substr(space));
  if (kind == "excited" && dim == 2) {
    v = qubit::excited();
  } else if (kind == "ground" && dim == 2) {
    v = qubit::ground();
  } else if (kind == "basis") {
    const auto k = parse_unsigned(arg, s.where("state"));
    if (k >= dim) throw ConfigError(fmt::format("[initial]: basis index {} outside dimension {}", k, dim));
    v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(k)) = 1.0;
  } else if (kind == "vector") {
    v = parse_vector_literal(arg);
  } else {
    throw ConfigError(fmt::format("[initial]: cannot parse state '{}'", *text));
  }
  if (static_cast<std::size_t>(v.size()) != dim) {
    throw ConfigError(fmt::format("[initial]: state has dimension {}, model has {}", v.size(), dim));
  }
  if (std::abs(v.squaredNorm() - 1.0) > 1e-8) {
    throw ConfigError("[initial]: state is not normalized");
  }
  return v;
}

struct Built {
  std::shared_ptr<const TimeLocalModel> model;
  ComplexVector psi0;
  std::vector<Observable> observables;
};

Built build_named_model(const Document& doc, Section& m, const std::string& name, double horizon) {
  Built b;
  if (name == "decay") {
    const auto gamma = m.function("gamma").value_or(TimeScalar::constant(1.0));
    const auto policy = parse_rate(m.str("rate", "abs"), m.where("rate"));
    b.model = std::make_shared<TimeLocalModel>(models::build_decay(gamma, policy));
    b.psi0 = qubit::excited();
    b.observables = {basis_projector("pe", 0, 2)};
  } else if (name == "two_channel") {
    const auto gm = m.function("gamma_minus").value_or(TimeScalar::constant(1.0));
    const auto gp = m.function("gamma_plus").value_or(TimeScalar::constant(0.0));
    const double omega = m.number("omega", 1.0);
    const auto drive = m.function("drive").value_or(TimeScalar());
    b.model = std::make_shared<TimeLocalModel>(models::build_two_channel_qubit(gm, gp, omega, drive));
    b.psi0 = qubit::excited();
    b.observables = {basis_projector("pe", 0, 2)};
  } else if (name == "pbg") {
    const auto table = m.raw("table");
    const double shift = m.number("time_shift", 0.0);
    TimeScalar s;
    TimeScalar g;
    if (table) {
      models::PbgTable t = *table == "demo" ? models::pbg_demo_table(0.0, horizon + shift, 2001)
                                            : read_pbg_table(*table);
      s = shifted_table(t.times, t.lamb_shift, shift);
      g = shifted_table(t.times, t.gamma, shift);
      if (m.raw("lamb_shift") || m.raw("gamma")) {
        throw ConfigError("[model]: give either a table or lamb_shift/gamma expressions");
      }
    } else {
      s = m.function("lamb_shift").value_or(TimeScalar::constant(0.0));
      g = m.function("gamma").value_or(TimeScalar::constant(1.0));
    }
    b.model = std::make_shared<TimeLocalModel>(models::build_pbg(s, g));
    b.psi0 = (qubit::excited() + qubit::ground()) / std::sqrt(2.0);
    b.observables = {basis_projector("pe", 0, 2), Observable{"sx", qubit::sigma_x()},
                     Observable{"sy", qubit::sigma_y()}};
  } else if (name == "controllable") {
    models::ControllableParams p;
    auto three = [&](const std::string& key, std::array<double, 3>& dst) {
      const auto v = m.numbers(key, {dst[0], dst[1], dst[2]});
      if (v.size() != 3) throw ConfigError(fmt::format("{}: expected three values", m.where(key)));
      std::copy(v.begin(), v.end(), dst.begin());
    };
    three("a", p.a);
    three("b", p.b);
    three("c", p.c);
    b.model = std::make_shared<TimeLocalModel>(models::build_controllable(p));
    b.psi0 = models::controllable_initial_state();
    b.observables = {basis_projector("pe", 0, 2)};
  } else if (name == "redfield") {
    models::RedfieldParams p;
    p.gamma1 = m.number("gamma1", p.gamma1);
    p.gamma2 = m.number("gamma2", p.gamma2);
    p.alpha = m.number("alpha", p.alpha);
    p.kappa = m.number("kappa", p.kappa);
    try {
      b.model = std::make_shared<TimeLocalModel>(models::build_redfield(p));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("[model]: {}", e.what()));
    }
    b.psi0 = models::redfield_initial_state(*b.model);
    const ComplexVector g = models::product_state({qubit::ground(), qubit::ground()});
    b.observables = {projector_observable("pg", g),
                     projector_observable("pw1", b.model->jump_adjoint(0) * g),
                     projector_observable("pw2", b.model->jump_adjoint(1) * g)};
  } else if (name == "chain") {
    models::ChainParams p;
    p.n = m.integer("n", p.n);
    p.lambda = m.number("lambda", p.lambda);
    p.gamma = m.number("gamma", p.gamma);
    p.delta = m.number("delta", p.delta);
    p.gamma1 = m.function("gamma1");
    try {
      b.model = std::make_shared<TimeLocalModel>(models::build_chain(p));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("[model]: {}", e.what()));
    }
    b.psi0 = models::chain_initial_state(p.n);
    for (std::size_t s = 0; s < p.n; ++s) {
      b.observables.push_back(site_population(fmt::format("site{}", s + 1), s, p.n));
    }
  } else if (name == "explicit") {
    const auto dim = m.integer("dim", 0);
    if (dim < 1 || dim > 4096) throw ConfigError("[model]: dim must be in [1, 4096]");
    const auto d = static_cast<Eigen::Index>(dim);
    auto check_dim = [&](const ComplexMatrix& x, const std::string& what) {
      if (x.rows() != d || x.cols() != d) {
        throw ConfigError(fmt::format("{}: expected a {}x{} matrix", what, dim, dim));
      }
    };
    Hamiltonian h;
    if (const auto text = m.raw("hamiltonian")) {
      const ComplexMatrix hm = parse_matrix_literal(*text);
      check_dim(hm, m.where("hamiltonian"));
      h.add_term(m.function("hamiltonian_coefficient").value_or(TimeScalar::constant(1.0)), to_sparse(hm));
    } else {
      m.raw("hamiltonian_coefficient");
    }
    std::optional<ComplexMatrix> bare;
    if (const auto text = m.raw("bare_hamiltonian")) {
      bare = parse_matrix_literal(*text);
      check_dim(*bare, m.where("bare_hamiltonian"));
    }
    std::vector<Channel> channels;
    for (const auto& [key, value] : doc.tree) {
      if (key.rfind("channel ", 0) != 0) continue;
      Section c(&value, key);
      Channel ch;
      ch.name = trim(key.substr(8));
      const ComplexMatrix op = parse_matrix_literal(c.require("operator"));
      check_dim(op, c.where("operator"));
      ch.op = to_sparse(op);
      if (ch.op.nonZeros() == 0) throw ConfigError(fmt::format("{}: zero operator", c.where("operator")));
      const auto weight = c.function("weight");
      if (!weight) throw ConfigError(fmt::format("[{}]: missing key 'weight'", key));
      ch.weight = *weight;
      ch.rate = parse_rate(c.str("rate", "abs"), c.where("rate"));
      if (const auto e = c.raw("energy")) ch.energy_quantum = parse_number(*e, c.where("energy"));
      c.finish();
      channels.push_back(std::move(ch));
    }
    b.model = std::make_shared<TimeLocalModel>(static_cast<std::size_t>(dim), std::move(h), std::move(channels),
                                               std::move(bare), std::numeric_limits<double>::infinity(),
                                               "explicit");
    for (std::size_t k = 0; k < dim; ++k) {
      b.observables.push_back(basis_projector(fmt::format("p{}", k), k, dim));
    }
  } else {
    throw ConfigError(fmt::format("[model]: unknown model '{}'", name));
  }
  return b;
}

double default_horizon(const std::string& name) {
  if (name == "controllable") return 3.0;
  if (name == "redfield") return 6.0;
  return 1.0;
}

double default_dt(const std::string& name) { return name == "redfield" ? 0.0125 : 1e-3; }

ModelSetup setup_from(const Document& doc, double horizon) {
  Section m = doc.section("model");
  if (!m.present()) throw ConfigError("missing [model] section");
  ModelSetup setup;
  setup.name = m.require("name");
  if (setup.name != "explicit") {
    for (const auto& [key, value] : doc.tree) {
      if (key.rfind("channel ", 0) == 0) {
        throw ConfigError(fmt::format("[{}] is only allowed with the explicit model", key));
      }
    }
  }
  Built b = build_named_model(doc, m, setup.name, horizon);
  m.finish();
  setup.model = b.model;

  Section init = doc.section("initial");
  setup.psi0 = parse_initial(init, b.psi0, setup.model->dim());
  init.finish();

  Section obs = doc.section("observables");
  if (obs.present()) {
    const auto* node = &doc.tree.find("observables")->second;
    for (const auto& [key, value] : *node) {
      const auto text = obs.raw(key);
      setup.observables.push_back(parse_observable(key, *text, setup.model->dim(), obs.where(key)));
    }
  } else {
    setup.observables = std::move(b.observables);
  }
  return setup;
}

}  // namespace

ComplexVector parse_vector_literal(const std::string& text) {
  const auto items = split_ws(text);
  if (items.empty()) throw ConfigError("empty vector literal");
  ComplexVector v(static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto parts = split(items[i], ',');
    if (parts.size() > 2 || parts[0].empty()) {
      throw ConfigError(fmt::format("bad complex entry '{}' (expected re,im)", items[i]));
    }
    const double re = parse_number(parts[0], "complex entry");
    const double im = parts.size() == 2 ? parse_number(parts[1], "complex entry") : 0.0;
    v(static_cast<Eigen::Index>(i)) = Complex(re, im);
  }
  return v;
}

ComplexMatrix parse_matrix_literal(const std::string& text) {
  const auto rows = split(text, ';');
  std::vector<ComplexVector> parsed;
  for (const auto& r : rows) parsed.push_back(parse_vector_literal(r));
  const auto n = static_cast<Eigen::Index>(parsed.size());
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (parsed[static_cast<std::size_t>(i)].size() != n) {
      throw ConfigError(fmt::format("matrix literal is not square: row {} has {} entries", i + 1,
                                    parsed[static_cast<std::size_t>(i)].size()));
    }
    m.row(i) = parsed[static_cast<std::size_t>(i)].transpose();
  }
  return m;
}

std::vector<double> RunConfig::grid() const { return uniform_grid(0.0, horizon, intervals); }

ModelSetup load_model(const std::filesystem::path& path) {
  const Document doc = read_document(path);
  const Section sim = doc.section("simulation");
  double horizon = 1.0;
  if (sim.present()) {
    Section s = sim;
    if (const auto h = s.raw("horizon")) horizon = parse_number(*h, s.where("horizon"));
  }
  return setup_from(doc, horizon);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const Document doc = read_document(path);
  check_sections(doc, {"model", "simulation", "initial", "observables", "output"}, true);
  RunConfig cfg;

  Section sim = doc.section("simulation");
  const std::string model_name = doc.section("model").str("name", "");
  cfg.horizon = sim.number("horizon", default_horizon(model_name));
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) throw ConfigError("[simulation] horizon must be positive");
  cfg.setup = setup_from(doc, cfg.horizon);

  const std::string method = sim.str("method", "both");
  if (method == "oracle") {
    cfg.method = Method::Oracle;
  } else if (method == "trajectories") {
    cfg.method = Method::Trajectories;
  } else if (method == "both") {
    cfg.method = Method::Both;
  } else {
    throw ConfigError(fmt::format("[simulation] method: unknown value '{}'", method));
  }
  cfg.dt = sim.number("dt", default_dt(cfg.setup.name));
  cfg.oracle_dt = sim.number("oracle_dt", cfg.dt);
  if (!(cfg.dt > 0.0) || !(cfg.oracle_dt > 0.0)) throw ConfigError("[simulation] dt must be positive");
  cfg.intervals = sim.integer("intervals", 60);
  if (cfg.intervals < 1) throw ConfigError("[simulation] intervals must be at least 1");
  cfg.realizations = sim.integer("realizations", 1000);
  if (cfg.realizations < 1) throw ConfigError("[simulation] realizations must be at least 1");
  cfg.seed = sim.integer("seed", 1);
  cfg.threads = static_cast<unsigned>(sim.integer("threads", 1));

  cfg.scheme.dt = cfg.dt;
  const std::string scheme = sim.str("scheme", "bernoulli");
  if (scheme == "bernoulli") {
    cfg.scheme.scheme = JumpScheme::Bernoulli;
  } else if (scheme == "waiting_time") {
    cfg.scheme.scheme = JumpScheme::WaitingTime;
  } else {
    throw ConfigError(fmt::format("[simulation] scheme: unknown value '{}'", scheme));
  }
  const std::string rep = sim.str("representation", "nonlinear");
  if (rep == "nonlinear") {
    cfg.scheme.representation = Representation::Nonlinear;
  } else if (rep == "linear") {
    cfg.scheme.representation = Representation::LinearNormalized;
  } else {
    throw ConfigError(fmt::format("[simulation] representation: unknown value '{}'", rep));
  }
  cfg.scheme.p_max = sim.number("p_max", cfg.scheme.p_max);
  try {
    cfg.scheme.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("[simulation]: {}", e.what()));
  }
  sim.finish();

  Section out = doc.section("output");
  cfg.out_dir = out.str("dir", "out");
  out.finish();

  for (const auto& [section, node] : doc.tree) {
    for (const auto& [key, value] : node) {
      if (section == "simulation" && key == "threads") continue;
      cfg.echo[section + "." + key] = trim(value.data());
    }
  }
  return cfg;
}

BenchFileConfig load_bench_config(const std::filesystem::path& path) {
  const Document doc = read_document(path);
  check_sections(doc, {"bench", "output"}, false);
  BenchFileConfig cfg;
  auto& b = cfg.bench;
  Section s = doc.section("bench");
  if (!s.present()) throw ConfigError("missing [bench] section");
  if (const auto sizes = s.raw("sizes")) {
    b.sizes.clear();
    for (const auto& item : split(*sizes, ',')) {
      b.sizes.push_back(static_cast<std::size_t>(parse_unsigned(item, s.where("sizes"))));
    }
  }
  for (std::size_t n : b.sizes) {
    if (n < 2 || n > 24) throw ConfigError(fmt::format("[bench] sizes: {} outside [2, 24]", n));
  }
  b.realizations = s.integer("realizations", b.realizations);
  b.master_seed = s.integer("seed", b.master_seed);
  b.scheme.dt = s.number("dt", b.scheme.dt);
  b.oracle_dt = s.number("oracle_dt", b.oracle_dt);
  b.horizon = s.number("horizon", b.horizon);
  b.intervals = s.integer("intervals", b.intervals);
  b.repeats = s.integer("repeats", b.repeats);
  b.parallel_threads = static_cast<unsigned>(s.integer("threads", b.parallel_threads));
  b.oracle_entry_cap = s.integer("oracle_entry_cap", b.oracle_entry_cap);
  b.trajectory_entry_cap = s.integer("trajectory_entry_cap", b.trajectory_entry_cap);
  const std::string scheme = s.str("scheme", "waiting_time");
  if (scheme == "bernoulli") {
    b.scheme.scheme = JumpScheme::Bernoulli;
  } else if (scheme == "waiting_time") {
    b.scheme.scheme = JumpScheme::WaitingTime;
  } else {
    throw ConfigError(fmt::format("[bench] scheme: unknown value '{}'", scheme));
  }
  if (b.realizations < 1 || b.intervals < 1 || b.repeats < 1 || !(b.horizon > 0.0) || !(b.oracle_dt > 0.0)) {
    throw ConfigError("[bench]: realizations, intervals, repeats, horizon and oracle_dt must be positive");
  }
  try {
    b.scheme.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("[bench]: {}", e.what()));
  }
  s.finish();
  Section out = doc.section("output");
  cfg.out_dir = out.str("dir", "out");
  cfg.file_name = out.str("file", "bench.csv");
  out.finish();
  return cfg;
}

}  // namespace qtraj::cli
