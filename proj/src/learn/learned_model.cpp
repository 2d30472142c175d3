#include "cmrf/learn/learned_model.hpp"

#include "cmrf/core/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cmrf {

namespace {

// Basis values phi_1..phi_K at the uniform pre-scan points, one row per point.
Eigen::MatrixXd
prescan_table(const BasisSystem& basis, int order, int cells)
{
  const Interval iv = basis.interval();
  Eigen::MatrixXd table(cells + 1, order);
  std::vector<double> buf(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= cells; ++k) {
    const double x = k == cells ? iv.upper : iv.lower + k * iv.width() / cells;
    basis.eval_all(x, buf);
    for (int s = 0; s < order; ++s)
      table(k, s) = buf[s + 1];
  }
  return table;
}

// Kink-adapted rule for max(eps, constant + sum_s coeffs_s phi_s) on the interval.
// Returns whether the cutoff bites anywhere on the pre-scan grid.
bool
adapted_rule(const BasisSystem& basis, const Eigen::MatrixXd& table, double constant, const Eigen::VectorXd& coeffs,
             double epsilon, int order, QuadratureRule& rule)
{
  const Eigen::VectorXd prescan = (table * coeffs).array() + constant;
  const Interval iv = basis.interval();
  if (prescan.minCoeff() > epsilon) {
    rule = make_quadrature(iv, order);
    return false;
  }
  std::vector<double> buf(static_cast<std::size_t>(coeffs.size()) + 1);
  auto series = [&](double x) {
    basis.eval_all(x, buf);
    double v = constant;
    for (Eigen::Index s = 0; s < coeffs.size(); ++s)
      v += coeffs[s] * buf[s + 1];
    return v;
  };
  const auto breaks =
    threshold_crossings(series, epsilon, iv, std::span<const double>(prescan.data(), prescan.size()));
  rule = piecewise_quadrature(iv, breaks, order);
  return true;
}

// Number of times the slice xi(xu, .) crosses eps on the pre-scan grid.
int
slice_crossings(const MomentSet& m, std::size_t e, const Eigen::MatrixXd& table, double epsilon, double xu,
                std::vector<double>& buf)
{
  const int K = m.order();
  const double chi = m.chi();
  m.basis_values(xu, buf);
  const std::span<const double> su = std::span<const double>(buf).subspan(1);
  const double bu = m.node_belief(m.graph().edge(e).u, su);
  Eigen::VectorXd slice = m.node(m.graph().edge(e).v) / chi;
  for (int s = 0; s < K; ++s)
    slice += su[s] * m.edge(e).row(s).transpose();
  const Eigen::VectorXd values = (table * slice).array() + bu / chi;
  int count = 0;
  for (Eigen::Index k = 0; k + 1 < values.size(); ++k)
    count += (values[k] > epsilon) != (values[k + 1] > epsilon);
  return count;
}

// Outer rule in xu for edge e. The slice integral of max(eps, xi) is not
// smooth where the number of cutoff crossings changes, so the rule is split
// at those points (located on the pre-scan grid, then bisected).
QuadratureRule
outer_rule(const MomentSet& m, std::size_t e, const Eigen::MatrixXd& table, double epsilon)
{
  const Interval iv = m.basis().interval();
  const int cells = static_cast<int>(table.rows()) - 1;
  std::vector<double> buf(static_cast<std::size_t>(m.order()) + 1);
  auto at = [&](int k) { return k == cells ? iv.upper : iv.lower + k * iv.width() / cells; };
  std::vector<double> breaks;
  int prev = slice_crossings(m, e, table, epsilon, at(0), buf);
  for (int k = 1; k <= cells; ++k) {
    const int cur = slice_crossings(m, e, table, epsilon, at(k), buf);
    if (cur != prev) {
      double lo = at(k - 1), hi = at(k);
      for (int iter = 0; iter < 60 && hi - lo > 1e-15 * iv.width(); ++iter) {
        const double mid = 0.5 * (lo + hi);
        (slice_crossings(m, e, table, epsilon, mid, buf) == prev ? lo : hi) = mid;
      }
      breaks.push_back(0.5 * (lo + hi));
    }
    prev = cur;
  }
  return piecewise_quadrature(iv, breaks, default_quadrature_order_2d);
}

} // namespace

LearnedModel::LearnedModel(MomentSet moments, double epsilon)
  : PairwiseEnergy(moments.graph(), moments.basis().interval())
  , moments_(std::move(moments))
  , epsilon_(epsilon)
{
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("cutoff epsilon must be positive");
  const Graph& g = moments_.graph();
  const BasisSystem& basis = moments_.basis();
  const int K = moments_.order();
  const double chi = basis.chi();
  const Eigen::MatrixXd table = prescan_table(basis, K, default_prescan_cells);

  node_norm_.resize(g.size());
  node_active_.resize(g.size());
  node_rules_.resize(g.size());
  std::vector<double> buf(static_cast<std::size_t>(K) + 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    node_active_[i] = adapted_rule(basis, table, 1.0 / chi, moments_.node(i), epsilon_,
                                   default_quadrature_order_1d, node_rules_[i]);
    const auto& rule = node_rules_[i];
    double z = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      basis.eval_all(rule.nodes[k], buf);
      z += rule.weights[k] * std::max(epsilon_, moments_.node_belief(i, std::span<const double>(buf).subspan(1)));
    }
    if (!std::isfinite(z) || z <= 0.0)
      throw NumericError("node normalizer is not finite");
    node_norm_[i] = z;
  }

  edge_norm_.resize(g.edge_count());
  edge_active_.resize(g.edge_count());
  edge_rules_.resize(g.edge_count());
  std::vector<double> pu(static_cast<std::size_t>(K) + 1), pv(static_cast<std::size_t>(K) + 1);
  QuadratureRule inner;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edge(e);
    const Eigen::MatrixXd& d = moments_.edge(e);
    EdgeQuadrature& eq = edge_rules_[e];
    const QuadratureRule outer = outer_rule(moments_, e, table, epsilon_);
    bool active = false;
    double z = 0.0;
    for (std::size_t a = 0; a < outer.size(); ++a) {
      const double xu = outer.nodes[a];
      basis.eval_all(xu, pu);
      const std::span<const double> su = std::span<const double>(pu).subspan(1);
      const double bu = moments_.node_belief(edge.u, su);
      // xi(xu, .) = bu/chi + sum_t (c_v^(t)/chi + sum_s d^(s,t) phi_s(xu)) phi_t(.)
      Eigen::VectorXd slice = moments_.node(edge.v) / chi;
      for (int s = 0; s < K; ++s)
        slice += su[s] * d.row(s).transpose();
      active |= adapted_rule(basis, table, bu / chi, slice, epsilon_, default_quadrature_order_2d, inner);
      for (std::size_t b = 0; b < inner.size(); ++b) {
        const double xv = inner.nodes[b];
        const double w = outer.weights[a] * inner.weights[b];
        eq.xu.push_back(xu);
        eq.xv.push_back(xv);
        eq.weights.push_back(w);
        basis.eval_all(xv, pv);
        const std::span<const double> sv = std::span<const double>(pv).subspan(1);
        z += w * std::max(epsilon_, moments_.edge_belief(e, bu, moments_.node_belief(edge.v, sv), su, sv));
      }
    }
    if (!std::isfinite(z) || z <= 0.0)
      throw NumericError("edge normalizer is not finite");
    edge_norm_[e] = z;
    edge_active_[e] = active;
  }
}

bool
LearnedModel::cutoff_active() const
{
  return std::find(node_active_.begin(), node_active_.end(), true) != node_active_.end() ||
         std::find(edge_active_.begin(), edge_active_.end(), true) != edge_active_.end();
}

double
LearnedModel::cutoff_node_belief(std::size_t i, double x) const
{
  return std::max(epsilon_, belief_node(moments_, i, x)) / node_norm_.at(i);
}

double
LearnedModel::cutoff_edge_belief(std::size_t e, double xu, double xv) const
{
  const auto& edge = moments_.graph().edge(e);
  return std::max(epsilon_, belief_edge(moments_, edge.u, edge.v, xu, xv)) / edge_norm_.at(e);
}

double
LearnedModel::node_term(std::size_t i, double xi) const
{
  const double degree = static_cast<double>(graph().degree(i));
  return (1.0 - degree) * std::log(std::max(epsilon_, belief_node(moments_, i, xi)));
}

double
LearnedModel::edge_term(std::size_t e, double xu, double xv) const
{
  const auto& edge = graph().edge(e);
  return std::log(std::max(epsilon_, belief_edge(moments_, edge.u, edge.v, xu, xv)));
}

double
LearnedModel::energy(std::span<const double> x) const
{
  check_point(x);
  const std::size_t n = size();
  const std::size_t K1 = static_cast<std::size_t>(order()) + 1;
  thread_local std::vector<double> phi;
  thread_local std::vector<double> b;
  phi.resize(n * K1);
  b.resize(n);
  const Graph& g = graph();
  double psi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<double> p(phi.data() + i * K1, K1);
    moments_.basis_values(x[i], p);
    b[i] = moments_.node_belief(i, p.subspan(1));
    psi -= (1.0 - static_cast<double>(g.degree(i))) * std::log(std::max(epsilon_, b[i]));
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edge(e);
    const std::span<const double> pu(phi.data() + edge.u * K1 + 1, K1 - 1);
    const std::span<const double> pv(phi.data() + edge.v * K1 + 1, K1 - 1);
    psi -= std::log(std::max(epsilon_, moments_.edge_belief(e, b[edge.u], b[edge.v], pu, pv)));
  }
  return psi;
}

double
LearnedModel::unnorm_density(std::span<const double> x) const
{
  return std::exp(-energy(x));
}

LearnedModel
fit(const Dataset& data, const Graph& graph, const BasisSystem& basis, int order, double epsilon)
{
  if (!(epsilon > 0.0))
    throw std::invalid_argument("cutoff epsilon must be positive");
  return LearnedModel(compute_moments(data, graph, basis, order), epsilon);
}

namespace {

void
put(std::ostream& out, double v)
{
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.write(buf, end - buf);
}

double
get_double(std::istringstream& in, std::size_t line)
{
  std::string token;
  if (!(in >> token))
    throw ParseError(line, "missing number");
  double v = 0.0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || end != token.data() + token.size())
    throw ParseError(line, "cannot parse '" + token + "' as a number");
  return v;
}

std::size_t
get_index(std::istringstream& in, std::size_t line)
{
  long long v = -1;
  if (!(in >> v) || v < 0)
    throw ParseError(line, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

} // namespace

std::string
to_text(const LearnedModel& model)
{
  const MomentSet& m = model.moments();
  const Graph& g = m.graph();
  std::ostringstream out;
  out << "# cmrf learned model\n";
  out << "basis " << to_string(m.basis().kind()) << '\n';
  out << "interval ";
  put(out, m.basis().interval().lower);
  out << ' ';
  put(out, m.basis().interval().upper);
  out << '\n';
  out << "max_order " << m.basis().max_order() << '\n';
  out << "nodes " << g.size() << '\n';
  out << "edges";
  for (const auto& e : g.edges())
    out << ' ' << e.u << ' ' << e.v;
  out << '\n';
  out << "K " << m.order() << '\n';
  out << "epsilon ";
  put(out, model.epsilon());
  out << '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    out << "c " << i;
    for (int s = 0; s < m.order(); ++s) {
      out << ' ';
      put(out, m.node(i)[s]);
    }
    out << '\n';
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    out << "d " << e;
    for (int s = 0; s < m.order(); ++s)
      for (int t = 0; t < m.order(); ++t) {
        out << ' ';
        put(out, m.edge(e)(s, t));
      }
    out << '\n';
  }
  return out.str();
}

LearnedModel
model_from_text(const std::string& text)
{
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::string kind = "cosine";
  Interval interval{ 0.0, 1.0 };
  int max_order = BasisSystem::default_max_order;
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  int K = -1;
  double epsilon = -1.0;
  std::vector<std::pair<std::size_t, std::vector<double>>> c_rows, d_rows;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key) || key.front() == '#')
      continue;
    if (key == "basis") {
      fields >> kind;
    } else if (key == "interval") {
      interval.lower = get_double(fields, lineno);
      interval.upper = get_double(fields, lineno);
    } else if (key == "max_order") {
      max_order = static_cast<int>(get_index(fields, lineno));
    } else if (key == "nodes") {
      nodes = get_index(fields, lineno);
    } else if (key == "edges") {
      long long a = 0, b = 0;
      while (fields >> a >> b)
        edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    } else if (key == "K") {
      K = static_cast<int>(get_index(fields, lineno));
    } else if (key == "epsilon") {
      epsilon = get_double(fields, lineno);
    } else if (key == "c" || key == "d") {
      if (K < 0)
        throw ParseError(lineno, "coefficients before K");
      const std::size_t index = get_index(fields, lineno);
      const std::size_t count = key == "c" ? static_cast<std::size_t>(K) : static_cast<std::size_t>(K * K);
      std::vector<double> values(count);
      for (auto& v : values)
        v = get_double(fields, lineno);
      (key == "c" ? c_rows : d_rows).emplace_back(index, std::move(values));
    } else {
      throw ParseError(lineno, "unknown key '" + key + "'");
    }
  }
  if (nodes == 0 || K < 0 || epsilon <= 0.0)
    throw ValidationError("model text lacks nodes, K or epsilon");
  MomentSet m(Graph(nodes, edges), BasisSystem(basis_kind_from_string(kind), interval, max_order), K);
  for (auto& [i, values] : c_rows) {
    if (i >= nodes)
      throw ValidationError("node index out of range in model text");
    m.node(i) = Eigen::Map<const Eigen::VectorXd>(values.data(), K);
  }
  for (auto& [e, values] : d_rows) {
    if (e >= edges.size())
      throw ValidationError("edge index out of range in model text");
    m.edge(e) = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), K, K);
  }
  return LearnedModel(std::move(m), epsilon);
}

void
save_model(const LearnedModel& model, const std::filesystem::path& path)
{
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write model file: " + path.string());
  out << to_text(model);
}

LearnedModel
load_model(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open model file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_text(buf.str());
}

} // namespace cmrf
