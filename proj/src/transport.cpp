#include "dnorm/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dnorm {

double CostMatrix::mean() const {
  CompensatedSum s;
  for (double v : c) s.add(v);
  return s.value() / static_cast<double>(c.size());
}

CostMatrix CostMatrix::l1_cost(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  if (p.d != q.d) throw std::invalid_argument("cost matrix: dimension mismatch");
  CostMatrix cm;
  cm.rows = static_cast<int>(p.atoms.size());
  cm.cols = static_cast<int>(q.atoms.size());
  cm.c.resize(static_cast<std::size_t>(cm.rows) * cm.cols);
  for (int j = 0; j < cm.rows; ++j) {
    const auto& a = p.atoms[static_cast<std::size_t>(j)];
    for (int k = 0; k < cm.cols; ++k) {
      const auto& b = q.atoms[static_cast<std::size_t>(k)];
      double s = 0.0;
      for (int i = 0; i < p.d; ++i) s += std::abs(a[i] - b[i]);
      cm.c[static_cast<std::size_t>(j) * cm.cols + k] = s;
    }
  }
  return cm;
}

std::pair<double, double> marginal_errors(const TransportPlan& plan,
                                          const std::vector<double>& p_weights,
                                          const std::vector<double>& q_weights) {
  std::vector<double> row_sum(p_weights.size(), 0.0), col_sum(q_weights.size(), 0.0);
  for (const auto& e : plan.entries) {
    row_sum[static_cast<std::size_t>(e.row)] += e.mass;
    col_sum[static_cast<std::size_t>(e.col)] += e.mass;
  }
  double er = 0.0, ec = 0.0;
  for (std::size_t j = 0; j < p_weights.size(); ++j) {
    er = std::max(er, std::abs(row_sum[j] - p_weights[j]));
  }
  for (std::size_t k = 0; k < q_weights.size(); ++k) {
    ec = std::max(ec, std::abs(col_sum[k] - q_weights[k]));
  }
  return {er, ec};
}

std::string to_json(const TransportPlan& plan) {
  nlohmann::json j;
  j["cost"] = plan.cost;
  j["rows"] = plan.rows;
  j["cols"] = plan.cols;
  auto& nz = j["nonzeros"] = nlohmann::json::array();
  for (const auto& e : plan.entries) nz.push_back({e.row, e.col, e.mass});
  return j.dump();
}

namespace {

// Transportation-specialized network simplex. Nodes 0..m-1 are supply
// rows, m..m+n-1 demand columns; arc id a = j*n + k. The basis is a
// spanning tree; entering arcs are priced in blocks over a fixed arc
// order with most-negative-within-block selection (lowest id on ties),
// and a Bland pass takes over after a long degenerate stall.
class TransportSimplex {
 public:
  TransportSimplex(int m, int n, const std::vector<double>& cost, std::vector<double> supply,
                   std::vector<double> demand)
      : m_(m),
        n_(n),
        num_nodes_(m + n),
        num_arcs_(static_cast<std::size_t>(m) * n),
        cost_(cost),
        supply_(std::move(supply)),
        demand_(std::move(demand)),
        flow_(num_arcs_, 0.0),
        basic_(num_arcs_, 0),
        adj_(static_cast<std::size_t>(num_nodes_)),
        parent_(num_nodes_, -1),
        parent_arc_(num_nodes_, -1),
        depth_(num_nodes_, 0),
        potential_(num_nodes_, 0.0) {
    double cmax = 0.0;
    for (double v : cost_) cmax = std::max(cmax, std::abs(v));
    enter_tol_ = 1e-12 * (1.0 + cmax);
    block_size_ = std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt(
                                                static_cast<double>(num_arcs_))));
  }

  void solve() {
    northwest_corner();
    for (std::size_t a = 0; a < num_arcs_; ++a) {
      if (!basic_[a]) continue;
      adj_[static_cast<std::size_t>(row_of(a))].push_back(a);
      adj_[static_cast<std::size_t>(col_node_of(a))].push_back(a);
    }
    rebuild_tree();
    std::size_t scan_pos = 0;
    long long degenerate_run = 0;
    const long long bland_trigger = 16LL * num_nodes_ + 64;
    for (;;) {
      const long long entering = degenerate_run > bland_trigger ? find_entering_bland()
                                                                : find_entering_block(scan_pos);
      if (entering < 0) break;
      const bool degenerate = pivot(static_cast<std::size_t>(entering));
      degenerate_run = degenerate ? degenerate_run + 1 : 0;
      rebuild_tree();
    }
  }

  double objective() const {
    CompensatedSum s;
    for (std::size_t a = 0; a < num_arcs_; ++a) {
      if (basic_[a] && flow_[a] > 0.0) s.add(flow_[a] * cost_[a]);
    }
    return s.value();
  }

  std::vector<PlanEntry> entries() const {
    std::vector<PlanEntry> out;
    for (std::size_t a = 0; a < num_arcs_; ++a) {
      if (basic_[a] && flow_[a] > 0.0) {
        out.push_back({static_cast<int>(a / n_), static_cast<int>(a % n_), flow_[a]});
      }
    }
    return out;
  }

  std::vector<double> row_duals() const {
    return {potential_.begin(), potential_.begin() + m_};
  }
  std::vector<double> col_duals() const {
    return {potential_.begin() + m_, potential_.end()};
  }

 private:
  int row_of(std::size_t a) const { return static_cast<int>(a / n_); }
  int col_node_of(std::size_t a) const { return m_ + static_cast<int>(a % n_); }

  void northwest_corner() {
    std::vector<double> ra = supply_, rb = demand_;
    int i = 0, j = 0;
    for (;;) {
      const std::size_t a = static_cast<std::size_t>(i) * n_ + j;
      const double t = std::min(ra[i], rb[j]);
      basic_[a] = 1;
      flow_[a] = std::max(0.0, t);
      ra[i] -= t;
      rb[j] -= t;
      if (i == m_ - 1 && j == n_ - 1) break;
      if (j == n_ - 1) {
        ++i;
      } else if (i == m_ - 1) {
        ++j;
      } else if (ra[i] <= rb[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  // Recomputes parent/depth/potentials from the maintained adjacency
  // lists; O(m + n) per pivot.
  void rebuild_tree() {
    std::fill(parent_.begin(), parent_.end(), -1);
    std::fill(parent_arc_.begin(), parent_arc_.end(), -1);
    // Iterative DFS from node 0 (a row node).
    std::vector<int> stack{0};
    parent_[0] = 0;
    depth_[0] = 0;
    potential_[0] = 0.0;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const std::size_t a : adj_[static_cast<std::size_t>(u)]) {
        const int r = row_of(a);
        const int cn = col_node_of(a);
        const int w = (u == r) ? cn : r;
        if (parent_[w] != -1) continue;
        parent_[w] = u;
        parent_arc_[w] = static_cast<long long>(a);
        depth_[w] = depth_[u] + 1;
        // Basic arcs have zero reduced cost: u_j + v_k = c_jk.
        potential_[w] = cost_[a] - potential_[u];
        stack.push_back(w);
      }
    }
  }

  double reduced_cost(std::size_t a) const {
    return cost_[a] - potential_[static_cast<std::size_t>(row_of(a))] -
           potential_[static_cast<std::size_t>(col_node_of(a))];
  }

  long long find_entering_block(std::size_t& scan_pos) {
    std::size_t examined = 0;
    while (examined < num_arcs_) {
      const std::size_t block_end = std::min(examined + block_size_, num_arcs_);
      long long best = -1;
      double best_rc = -enter_tol_;
      for (; examined < block_end; ++examined) {
        const std::size_t a = (scan_pos + examined) % num_arcs_;
        if (basic_[a]) continue;
        const double rc = reduced_cost(a);
        if (rc < best_rc || (rc == best_rc && best >= 0 && a < static_cast<std::size_t>(best))) {
          best_rc = rc;
          best = static_cast<long long>(a);
        }
      }
      if (best >= 0) {
        scan_pos = (scan_pos + examined) % num_arcs_;
        return best;
      }
    }
    return -1;
  }

  long long find_entering_bland() const {
    for (std::size_t a = 0; a < num_arcs_; ++a) {
      if (!basic_[a] && reduced_cost(a) < -enter_tol_) return static_cast<long long>(a);
    }
    return -1;
  }

  // Applies the pivot for the entering arc; returns whether it was
  // degenerate (zero flow change).
  bool pivot(std::size_t entering) {
    // Collect the unique tree path between the two endpoints.
    int u = row_of(entering);
    int v = col_node_of(entering);
    std::vector<std::size_t> path_u, path_v;  // arcs climbing toward the apex
    while (depth_[u] > depth_[v]) {
      path_u.push_back(static_cast<std::size_t>(parent_arc_[u]));
      u = parent_[u];
    }
    while (depth_[v] > depth_[u]) {
      path_v.push_back(static_cast<std::size_t>(parent_arc_[v]));
      v = parent_[v];
    }
    while (u != v) {
      path_u.push_back(static_cast<std::size_t>(parent_arc_[u]));
      u = parent_[u];
      path_v.push_back(static_cast<std::size_t>(parent_arc_[v]));
      v = parent_[v];
    }
    // Closed cycle: entering, then the column-side path up, then the
    // row-side path down. Signs alternate around the cycle.
    std::vector<std::size_t> cycle;
    cycle.reserve(1 + path_u.size() + path_v.size());
    cycle.push_back(entering);
    cycle.insert(cycle.end(), path_v.begin(), path_v.end());
    cycle.insert(cycle.end(), path_u.rbegin(), path_u.rend());

    double delta = std::numeric_limits<double>::infinity();
    std::size_t leaving = entering;
    for (std::size_t t = 1; t < cycle.size(); t += 2) {
      const std::size_t a = cycle[t];
      if (flow_[a] < delta || (flow_[a] == delta && a < leaving)) {
        delta = flow_[a];
        leaving = a;
      }
    }
    for (std::size_t t = 0; t < cycle.size(); ++t) {
      const std::size_t a = cycle[t];
      if (t % 2 == 0) {
        flow_[a] += delta;
      } else {
        flow_[a] -= delta;
        if (flow_[a] < 0.0) flow_[a] = 0.0;
      }
    }
    basic_[entering] = 1;
    basic_[leaving] = 0;
    flow_[leaving] = 0.0;
    detach(leaving, row_of(leaving));
    detach(leaving, col_node_of(leaving));
    adj_[static_cast<std::size_t>(row_of(entering))].push_back(entering);
    adj_[static_cast<std::size_t>(col_node_of(entering))].push_back(entering);
    return delta == 0.0;
  }

  void detach(std::size_t arc, int node) {
    auto& lst = adj_[static_cast<std::size_t>(node)];
    lst.erase(std::find(lst.begin(), lst.end(), arc));
  }

  int m_, n_, num_nodes_;
  std::size_t num_arcs_;
  const std::vector<double>& cost_;
  std::vector<double> supply_, demand_;
  std::vector<double> flow_;
  std::vector<char> basic_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<int> parent_;
  std::vector<long long> parent_arc_;
  std::vector<int> depth_;
  std::vector<double> potential_;
  double enter_tol_ = 0.0;
  std::size_t block_size_ = 64;
};

// Groups atoms that coincide within merge_tol (max-abs). Returns the
// group index per atom and the merged measure.
std::pair<std::vector<int>, DiscreteMeasure> merge_duplicates(const DiscreteMeasure& p,
                                                              double merge_tol) {
  std::vector<int> group(p.atoms.size(), -1);
  std::vector<std::vector<double>> reps;
  std::vector<double> weights;
  for (std::size_t k = 0; k < p.atoms.size(); ++k) {
    const auto& a = p.atoms[k];
    int found = -1;
    for (std::size_t g = 0; g < reps.size(); ++g) {
      double dmax = 0.0;
      for (int i = 0; i < p.d; ++i) dmax = std::max(dmax, std::abs(a[i] - reps[g][i]));
      if (dmax <= merge_tol) {
        found = static_cast<int>(g);
        break;
      }
    }
    if (found < 0) {
      found = static_cast<int>(reps.size());
      reps.push_back(a);
      weights.push_back(0.0);
    }
    group[k] = found;
    weights[static_cast<std::size_t>(found)] += p.weights[k];
  }
  DiscreteMeasure merged;
  merged.d = p.d;
  merged.atoms = std::move(reps);
  merged.weights = std::move(weights);
  return {std::move(group), std::move(merged)};
}

}  // namespace

TransportPlan exact_wasserstein(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                const ExactOptions& options) {
  if (p.d != q.d) throw std::invalid_argument("exact_wasserstein: dimension mismatch");
  auto [group_p, mp] = merge_duplicates(p, options.merge_tol);
  auto [group_q, mq] = merge_duplicates(q, options.merge_tol);
  const std::size_t m = mp.atoms.size();
  const std::size_t n = mq.atoms.size();
  if (m * n > options.max_entries) {
    throw std::invalid_argument(
        "exact_wasserstein: support sizes " + std::to_string(m) + " x " + std::to_string(n) +
        " exceed the cap of " + std::to_string(options.max_entries) +
        " cost entries; use sinkhorn_wasserstein instead");
  }
  const CostMatrix cm = CostMatrix::l1_cost(mp, mq);

  // Balance the tiny rounding mismatch between the two weight sums.
  std::vector<double> supply = mp.weights, demand = mq.weights;
  double sa = 0.0, sb = 0.0;
  for (double w : supply) sa += w;
  for (double w : demand) sb += w;
  demand.back() += sa - sb;
  if (demand.back() < 0.0) demand.back() = 0.0;

  TransportSimplex simplex(static_cast<int>(m), static_cast<int>(n), cm.c, std::move(supply),
                           std::move(demand));
  simplex.solve();

  TransportPlan plan;
  plan.cost = simplex.objective();
  plan.rows = static_cast<int>(p.atoms.size());
  plan.cols = static_cast<int>(q.atoms.size());

  // Expand merged duals and entries back onto the original supports so
  // that plan marginals match the input weights.
  const auto merged_rows = simplex.row_duals();
  const auto merged_cols = simplex.col_duals();
  plan.row_potentials.resize(p.atoms.size());
  plan.col_potentials.resize(q.atoms.size());
  for (std::size_t j = 0; j < p.atoms.size(); ++j) {
    plan.row_potentials[j] = merged_rows[static_cast<std::size_t>(group_p[j])];
  }
  for (std::size_t k = 0; k < q.atoms.size(); ++k) {
    plan.col_potentials[k] = merged_cols[static_cast<std::size_t>(group_q[k])];
  }

  std::vector<std::vector<int>> members_p(m), members_q(n);
  for (std::size_t j = 0; j < group_p.size(); ++j) {
    members_p[static_cast<std::size_t>(group_p[j])].push_back(static_cast<int>(j));
  }
  for (std::size_t k = 0; k < group_q.size(); ++k) {
    members_q[static_cast<std::size_t>(group_q[k])].push_back(static_cast<int>(k));
  }
  for (const auto& e : simplex.entries()) {
    const double wp_total = mp.weights[static_cast<std::size_t>(e.row)];
    const double wq_total = mq.weights[static_cast<std::size_t>(e.col)];
    if (wp_total <= 0.0 || wq_total <= 0.0) continue;
    for (int j : members_p[static_cast<std::size_t>(e.row)]) {
      const double share_p = p.weights[static_cast<std::size_t>(j)] / wp_total;
      if (share_p <= 0.0) continue;
      for (int k : members_q[static_cast<std::size_t>(e.col)]) {
        const double share_q = q.weights[static_cast<std::size_t>(k)] / wq_total;
        if (share_q <= 0.0) continue;
        plan.entries.push_back({j, k, e.mass * share_p * share_q});
      }
    }
  }
  return plan;
}

namespace {

double logsumexp_row(const double* vals, std::size_t n) {
  double vmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) vmax = std::max(vmax, vals[i]);
  if (!std::isfinite(vmax)) return vmax;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(vals[i] - vmax);
  return vmax + std::log(s);
}

struct Dense {
  std::size_t m = 0, n = 0;
  const std::vector<double>* c = nullptr;
  double at(std::size_t j, std::size_t k) const { return (*c)[j * n + k]; }
};

}  // namespace

SinkhornResult sinkhorn_wasserstein(const DiscreteMeasure& p, const DiscreteMeasure& q,
                                    double epsilon, int max_iter, double tol) {
  if (p.d != q.d) throw std::invalid_argument("sinkhorn_wasserstein: dimension mismatch");
  if (max_iter < 1) throw std::invalid_argument("sinkhorn_wasserstein: max_iter must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("sinkhorn_wasserstein: tol must be > 0");

  // Zero-weight atoms carry no mass and are dropped up front.
  DiscreteMeasure pp, qq;
  pp.d = p.d;
  qq.d = q.d;
  for (std::size_t j = 0; j < p.atoms.size(); ++j) {
    if (p.weights[j] > 0.0) {
      pp.atoms.push_back(p.atoms[j]);
      pp.weights.push_back(p.weights[j]);
    }
  }
  for (std::size_t k = 0; k < q.atoms.size(); ++k) {
    if (q.weights[k] > 0.0) {
      qq.atoms.push_back(q.atoms[k]);
      qq.weights.push_back(q.weights[k]);
    }
  }
  if (pp.atoms.empty() || qq.atoms.empty()) {
    throw std::invalid_argument("sinkhorn_wasserstein: empty measure");
  }

  const CostMatrix cm = CostMatrix::l1_cost(pp, qq);
  const std::size_t m = pp.atoms.size();
  const std::size_t n = qq.atoms.size();
  double cmax = 0.0;
  for (double v : cm.c) cmax = std::max(cmax, v);
  if (epsilon <= 0.0) epsilon = 0.05 * cm.mean();
  if (!(epsilon > 0.0)) {
    // All atoms coincide; the transport cost is zero regardless.
    return {0.0, true, 0, 0.0, false};
  }

  const auto& a = pp.weights;
  const auto& b = qq.weights;
  Dense c{m, n, &cm.c};

  SinkhornResult result;
  // Kernel floor: past this dynamic range the plain scaling iteration
  // either underflows or stalls at a rounding plateau above any useful
  // tolerance, so updates run in the log domain from the start.
  bool log_domain = cmax / epsilon > 30.0;

  if (!log_domain) {
    std::vector<double> kernel(m * n);
    for (std::size_t i = 0; i < kernel.size(); ++i) kernel[i] = std::exp(-cm.c[i] / epsilon);
    std::vector<double> u(m, 1.0), v(n, 1.0);
    bool failed = false;
    double checkpoint_err = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iter; ++it) {
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += kernel[j * n + k] * v[k];
        if (s <= 0.0 || !std::isfinite(s)) {
          failed = true;
          break;
        }
        u[j] = a[j] / s;
      }
      if (failed) break;
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += kernel[j * n + k] * u[j];
        if (s <= 0.0 || !std::isfinite(s)) {
          failed = true;
          break;
        }
        v[k] = b[k] / s;
      }
      if (failed) break;
      // Column marginals are exact after the v-update; measure the rows.
      double err = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += u[j] * kernel[j * n + k] * v[k];
        err += std::abs(s - a[j]);
      }
      result.iterations = it;
      result.marginal_error = err;
      if (err < tol) {
        result.converged = true;
        break;
      }
      if (it % 256 == 0) {
        if (err > 0.5 * checkpoint_err) {
          failed = true;  // rounding plateau: hand over to the log domain
          break;
        }
        checkpoint_err = err;
      }
    }
    if (!failed) {
      CompensatedSum cost;
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          cost.add(u[j] * kernel[j * n + k] * v[k] * c.at(j, k));
        }
      }
      result.cost = cost.value();
      result.log_domain = false;
      return result;
    }
    log_domain = true;
  }

  // Log-domain iterations on the potentials f, g.
  std::vector<double> f(m, 0.0), g(n, 0.0), scratch(std::max(m, n));
  std::vector<double> log_a(m), log_b(n);
  for (std::size_t j = 0; j < m; ++j) log_a[j] = std::log(a[j]);
  for (std::size_t k = 0; k < n; ++k) log_b[k] = std::log(b[k]);
  result = SinkhornResult{};
  result.log_domain = true;
  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < n; ++k) scratch[k] = (g[k] - c.at(j, k)) / epsilon;
      f[j] = epsilon * (log_a[j] - logsumexp_row(scratch.data(), n));
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < m; ++j) scratch[j] = (f[j] - c.at(j, k)) / epsilon;
      g[k] = epsilon * (log_b[k] - logsumexp_row(scratch.data(), m));
    }
    double err = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += std::exp((f[j] + g[k] - c.at(j, k)) / epsilon);
      err += std::abs(s - a[j]);
    }
    result.iterations = it;
    result.marginal_error = err;
    if (err < tol) {
      result.converged = true;
      break;
    }
  }
  CompensatedSum cost;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      cost.add(std::exp((f[j] + g[k] - c.at(j, k)) / epsilon) * c.at(j, k));
    }
  }
  result.cost = cost.value();
  return result;
}

DnormDistanceResult dnorm_distance(const GeneratorSpec& a, const GeneratorSpec& b, long long n,
                                   const EstimationConfig& cfg, DistanceSolver solver) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dnorm_distance: dimension mismatch");
  if (n < 1) throw std::invalid_argument("dnorm_distance: n must be >= 1");
  Rng rng_a = Rng::stream(cfg.seed, 0);
  Rng rng_b = Rng::stream(cfg.seed, 1);
  const DiscreteMeasure pa = standardize(a, n, rng_a);
  const DiscreteMeasure pb = standardize(b, n, rng_b);

  DnormDistanceResult out;
  out.n = n;
  out.support_a = pa.support_size();
  out.support_b = pb.support_size();
  const ExactOptions options;
  const bool use_exact =
      solver == DistanceSolver::exact ||
      (solver == DistanceSolver::automatic &&
       pa.support_size() * pb.support_size() <= options.max_entries);
  if (use_exact) {
    const TransportPlan plan = exact_wasserstein(pa, pb, options);
    out.cost = plan.cost;
    out.method = "exact";
    out.converged = true;
  } else {
    const SinkhornResult sr = sinkhorn_wasserstein(pa, pb, 0.0, 5000, 1e-9);
    out.cost = sr.cost;
    out.method = "sinkhorn";
    out.converged = sr.converged;
  }
  return out;
}

double lipschitz_gap_bound(double r, double dist) {
  if (!(r >= 0.0)) throw std::invalid_argument("lipschitz_gap_bound: r must be >= 0");
  if (!(dist >= 0.0)) throw std::invalid_argument("lipschitz_gap_bound: dist must be >= 0");
  return r * dist;
}

}  // namespace dnorm
