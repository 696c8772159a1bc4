#include "circmotion/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "circmotion/graph.hpp"
#include "circmotion/potentials.hpp"
#include "circmotion/scenario.hpp"
#include "circmotion/simulator.hpp"

namespace circmotion {

namespace {

std::string sci(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << std::scientific << v;
  return ss.str();
}

Eigen::VectorXd random_angles(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> dist(-std::numbers::pi, std::numbers::pi);
  Eigen::VectorXd theta(n);
  for (int k = 0; k < n; ++k) theta(k) = dist(gen);
  return theta;
}

struct NamedGraph {
  std::string name;
  InteractionGraph graph;
};

void collect_graphs(const GraphSpec& spec, const std::string& name, std::vector<NamedGraph>& out) {
  out.push_back({name, build_graph(spec)});
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    collect_graphs(spec.blocks[b], name + "/block" + std::to_string(b + 1), out);
  }
}

std::vector<NamedGraph> bundled_graphs() {
  std::vector<NamedGraph> out;
  for (const auto& name : list_bundled_scenarios()) {
    const Scenario sc = parse_scenario(resolve_scenario(name));
    collect_graphs(sc.graph, name, out);
  }
  return out;
}

void graph_checks(std::vector<CheckResult>& out) {
  std::vector<NamedGraph> graphs;
  try {
    graphs = bundled_graphs();
  } catch (const std::exception& e) {
    out.push_back({"graphs", "load bundled graphs", false, e.what()});
    return;
  }
  if (graphs.empty()) {
    out.push_back({"graphs", "load bundled graphs", false,
                   "no scenarios found in " + bundled_scenario_dir().string()});
    return;
  }

  double structure_err = 0.0;
  double min_eig = 0.0;
  double eigenpair_residual = 0.0;
  double closed_vs_dense = 0.0;
  bool connectivity_ok = true;
  int circulant_count = 0;
  for (const auto& [name, g] : graphs) {
    const Eigen::MatrixXd& L = g.laplacian();
    structure_err = std::max(structure_err, (L - L.transpose()).cwiseAbs().maxCoeff());
    structure_err = std::max(structure_err, L.rowwise().sum().cwiseAbs().maxCoeff());
    const Eigen::VectorXd eig = dense_eigenvalues(L);
    min_eig = std::min(min_eig, eig.minCoeff());
    const auto zeros = (eig.array().abs() < kZeroEigenvalueTolerance).count();
    connectivity_ok = connectivity_ok && (g.is_connected() == (zeros == 1));
    if (!g.is_circulant()) continue;
    ++circulant_count;
    const CirculantSpectrum spec = circulant_spectrum(g);
    const Eigen::MatrixXcd Lc = L.cast<Complex>();
    for (Eigen::Index l = 0; l < spec.eigenvalues.size(); ++l) {
      const Eigen::VectorXcd f = spec.eigenvectors.col(l);
      eigenpair_residual = std::max(eigenpair_residual, (Lc * f - spec.eigenvalues(l) * f).norm());
    }
    Eigen::VectorXd closed = spec.eigenvalues;
    std::sort(closed.begin(), closed.end());
    closed_vs_dense = std::max(closed_vs_dense, (closed - eig).cwiseAbs().maxCoeff());
  }
  const std::string count = std::to_string(graphs.size()) + " graphs";
  out.push_back({"graphs", "Laplacian symmetric with zero row sums", structure_err <= 1e-12,
                 "max deviation " + sci(structure_err) + " over " + count});
  out.push_back({"graphs", "Laplacian positive semidefinite", min_eig >= -1e-9,
                 "min eigenvalue " + sci(min_eig)});
  out.push_back({"graphs", "connected iff exactly one zero eigenvalue", connectivity_ok, count});
  out.push_back({"graphs", "Fourier eigenpair residual <= 1e-10", eigenpair_residual <= 1e-10,
                 "max residual " + sci(eigenpair_residual) + " over " +
                     std::to_string(circulant_count) + " circulant graphs"});
  out.push_back({"graphs", "closed-form vs dense eigenvalues <= 1e-9", closed_vs_dense <= 1e-9,
                 "max difference " + sci(closed_vs_dense)});
}

void potential_checks(std::vector<CheckResult>& out) {
  std::mt19937_64 gen(20240601);
  const std::vector<double> ring{2, -1, 0, 0, 0, -1};
  const std::vector<double> dense_ring{4, -1, -1, 0, 0, 0, -1, -1};
  const std::vector<Edge> tree{{0, 1}, {1, 2}, {1, 3}, {3, 4}, {4, 5}, {2, 6}};
  const std::vector<InteractionGraph> graphs{InteractionGraph::from_circulant_row(ring),
                                             InteractionGraph::from_circulant_row(dense_ring),
                                             InteractionGraph::from_edges(7, tree)};

  // Central differences in long double keep truncation and rounding far
  // below the 1e-6 tolerance.
  double worst_fd = 0.0;
  double worst_sum = 0.0;
  const long double h = 1e-6L;
  for (const auto& g : graphs) {
    const Eigen::MatrixXd& L = g.laplacian();
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd theta = random_angles(gen, g.size());
      const Eigen::Matrix<long double, Eigen::Dynamic, 1> tl = theta.cast<long double>();
      for (int m = 1; m <= 6; ++m) {
        const Eigen::VectorXd coupling = phase_coupling(theta, L, m);
        worst_sum = std::max(worst_sum, std::abs(coupling.sum()));
        const Eigen::VectorXd analytic = m * coupling;
        Eigen::VectorXd fd(theta.size());
        for (Eigen::Index k = 0; k < theta.size(); ++k) {
          auto plus = tl, minus = tl;
          plus(k) += h;
          minus(k) -= h;
          fd(k) = static_cast<double>((w_m(plus, L, m) - w_m(minus, L, m)) / (2 * h));
        }
        const double scale = std::max(analytic.cwiseAbs().maxCoeff(), 1e-3);
        worst_fd = std::max(worst_fd, (analytic - fd).cwiseAbs().maxCoeff() / scale);
      }
    }
  }
  out.push_back({"potentials", "phase coupling matches finite differences (rel <= 1e-6)",
                 worst_fd <= 1e-6,
                 "max relative error " + sci(worst_fd) + " (3 graphs x 100 states x m=1..6)"});
  out.push_back({"potentials", "phase coupling sums to zero", worst_sum <= 1e-12,
                 "max |sum| " + sci(worst_sum)});

  double worst_proj = 0.0;
  for (int n : {6, 12}) {
    const Eigen::MatrixXd P =
        Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    for (int trial = 0; trial < 500; ++trial) {
      const Eigen::VectorXd theta = random_angles(gen, n);
      const Eigen::VectorXcd z = phasors(theta, 1);
      const double lhs = z.dot(P.cast<Complex>() * z).real();
      const double rhs = n * (1.0 - std::norm(order_parameter(theta, 1)));
      worst_proj = std::max(worst_proj, std::abs(lhs - rhs));
    }
  }
  out.push_back({"potentials", "projector identity N(1 - |p|^2) within 1e-10",
                 worst_proj <= 1e-10, "max error " + sci(worst_proj) + " over 1000 draws"});
}

void lyapunov_checks(std::vector<CheckResult>& out) {
  for (const char* name : {"example1_balance", "example1_sync", "example2_balance"}) {
    const std::string label = std::string("descent on ") + name + " (first 100 s)";
    try {
      Scenario sc = parse_scenario(resolve_scenario(name));
      sc.integration.t_end = std::min(sc.integration.t_end, 100.0);
      sc.integration.record_every = 100;
      const RunResult r = run(sc);
      out.push_back({"lyapunov", label, r.report.lyapunov_violations == 0,
                     std::to_string(r.report.lyapunov_violations) + " violations"});
    } catch (const std::exception& e) {
      out.push_back({"lyapunov", label, false, e.what()});
    }
  }

  // Balancing law with the wrong gain sign ascends its own composite; the
  // monitor must notice.
  try {
    const Scenario sc = parse_scenario(resolve_scenario("example1_balance"));
    ControllerConfig cfg{IndividualLaw{.mode = PhaseMode::Balance, .K = -1.0, .omega_d = 0.2}};
    const Controller wrong(cfg, build_graph(sc.graph), false);
    const RunResult r =
        simulate(initial_state(sc.initial), wrong, {.dt = 0.01, .t_end = 20.0, .record_every = 100});
    out.push_back({"lyapunov", "wrong-sign gain is flagged (negative control)",
                   r.report.lyapunov_violations > 0,
                   std::to_string(r.report.lyapunov_violations) + " violations"});
  } catch (const std::exception& e) {
    out.push_back({"lyapunov", "wrong-sign gain is flagged (negative control)", false, e.what()});
  }
}

}  // namespace

std::vector<CheckResult> run_checks(const std::string& suite) {
  if (suite != "all" && suite != "graphs" && suite != "potentials" && suite != "lyapunov") {
    throw std::invalid_argument("unknown suite '" + suite +
                                "' (expected all, potentials, graphs or lyapunov)");
  }
  std::vector<CheckResult> out;
  if (suite == "all" || suite == "graphs") graph_checks(out);
  if (suite == "all" || suite == "potentials") potential_checks(out);
  if (suite == "all" || suite == "lyapunov") lyapunov_checks(out);
  return out;
}

}  // namespace circmotion
