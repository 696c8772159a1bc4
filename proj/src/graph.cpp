#include "circmotion/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>

namespace circmotion {

namespace {

bool check_connected(const std::vector<std::vector<int>>& neighbors) {
  const int n = static_cast<int>(neighbors.size());
  std::vector<bool> seen(n, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int visited = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : neighbors[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++visited;
        frontier.push(w);
      }
    }
  }
  return visited == n;
}

// Exact comparison is fine: entries are small integers stored as doubles.
bool check_circulant(const Eigen::MatrixXd& L) {
  const Eigen::Index n = L.rows();
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (L(j, k) != L(j - 1, (k + n - 1) % n)) return false;
    }
  }
  return true;
}

Eigen::VectorXd circulant_eigenvalues(const Eigen::VectorXd& row) {
  const Eigen::Index n = row.size();
  Eigen::VectorXd values(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      acc += row(j) * std::cos(2.0 * std::numbers::pi * static_cast<double>(l * j) /
                               static_cast<double>(n));
    }
    values(l) = acc;
  }
  return values;
}

}  // namespace

InteractionGraph::InteractionGraph(std::vector<std::vector<int>> neighbors)
    : n_(static_cast<int>(neighbors.size())), neighbors_(std::move(neighbors)) {
  for (auto& list : neighbors_) std::sort(list.begin(), list.end());
  laplacian_ = Eigen::MatrixXd::Zero(n_, n_);
  for (int j = 0; j < n_; ++j) {
    laplacian_(j, j) = static_cast<double>(neighbors_[j].size());
    for (int k : neighbors_[j]) laplacian_(j, k) = -1.0;
  }
  connected_ = check_connected(neighbors_);
  circulant_ = check_circulant(laplacian_);
  if (circulant_) {
    lambda_max_ = circulant_eigenvalues(circulant_row()).maxCoeff();
  } else {
    lambda_max_ = dense_eigenvalues(laplacian_).maxCoeff();
  }
  // Rounding can leave tiny negative values for edgeless graphs.
  lambda_max_ = std::max(lambda_max_, 0.0);
}

InteractionGraph InteractionGraph::from_edges(int n, std::span<const Edge> edges) {
  if (n < 1) throw std::invalid_argument("graph must have at least one vertex");
  std::vector<std::vector<int>> neighbors(n);
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n) {
      throw std::invalid_argument("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                  ") references a vertex outside 0.." + std::to_string(n - 1));
    }
    if (a == b) {
      throw std::invalid_argument("self-loop on vertex " + std::to_string(a));
    }
    if (std::find(neighbors[a].begin(), neighbors[a].end(), b) == neighbors[a].end()) {
      neighbors[a].push_back(b);
      neighbors[b].push_back(a);
    }
  }
  return InteractionGraph(std::move(neighbors));
}

InteractionGraph InteractionGraph::from_circulant_row(std::span<const double> first_row) {
  const int n = static_cast<int>(first_row.size());
  if (n < 1) throw std::invalid_argument("circulant row must be non-empty");
  int degree = 0;
  for (int j = 1; j < n; ++j) {
    const double c = first_row[j];
    if (c == -1.0) {
      ++degree;
    } else if (c != 0.0) {
      throw std::invalid_argument("circulant entry " + std::to_string(j + 1) +
                                  " must be 0 or -1, got " + std::to_string(c));
    }
    if (first_row[j] != first_row[n - j]) {
      throw std::invalid_argument("circulant row is not symmetric: entries " +
                                  std::to_string(j + 1) + " and " + std::to_string(n - j + 1) +
                                  " differ");
    }
  }
  if (first_row[0] != static_cast<double>(degree)) {
    throw std::invalid_argument("circulant row does not sum to zero: diagonal entry " +
                                std::to_string(first_row[0]) + " but degree " +
                                std::to_string(degree));
  }
  std::vector<Edge> edges;
  for (int v = 0; v < n; ++v) {
    for (int j = 1; j < n; ++j) {
      if (first_row[j] == -1.0) {
        const int w = (v + j) % n;
        if (v < w) edges.emplace_back(v, w);
      }
    }
  }
  return from_edges(n, edges);
}

InteractionGraph InteractionGraph::block_diagonal(std::span<const InteractionGraph> blocks) {
  if (blocks.empty()) throw std::invalid_argument("block_diagonal needs at least one block");
  std::vector<std::vector<int>> neighbors;
  int offset = 0;
  for (const auto& block : blocks) {
    for (const auto& list : block.neighbors()) {
      std::vector<int> shifted;
      shifted.reserve(list.size());
      for (int w : list) shifted.push_back(w + offset);
      neighbors.push_back(std::move(shifted));
    }
    offset += block.size();
  }
  return InteractionGraph(std::move(neighbors));
}

InteractionGraph InteractionGraph::complete(int n) {
  std::vector<Edge> edges;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) edges.emplace_back(a, b);
  }
  return from_edges(n, edges);
}

std::vector<Edge> InteractionGraph::edges() const {
  std::vector<Edge> out;
  for (int v = 0; v < n_; ++v) {
    for (int w : neighbors_[v]) {
      if (v < w) out.emplace_back(v, w);
    }
  }
  return out;
}

CirculantSpectrum circulant_spectrum(const InteractionGraph& g) {
  if (!g.is_circulant()) {
    throw std::invalid_argument(
        "graph is not circulant; use dense_eigenvalues() for its spectrum");
  }
  const int n = g.size();
  CirculantSpectrum spec;
  spec.angles.resize(n);
  for (int k = 0; k < n; ++k) spec.angles(k) = 2.0 * std::numbers::pi * k / n;
  spec.eigenvectors.resize(n, n);
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      spec.eigenvectors(k, l) = std::polar(1.0, l * spec.angles(k));
    }
  }
  spec.eigenvalues = circulant_eigenvalues(g.circulant_row());
  spec.lambda_max = std::max(spec.eigenvalues.maxCoeff(), 0.0);
  return spec;
}

Eigen::VectorXd dense_eigenvalues(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver failed to converge");
  }
  return solver.eigenvalues();
}

double lambda_max(const InteractionGraph& g) { return g.lambda_max(); }

bool is_connected(const InteractionGraph& g) { return g.is_connected(); }

Eigen::VectorXd laplacian_eigenvalues(const InteractionGraph& g) {
  if (!g.is_circulant()) return dense_eigenvalues(g.laplacian());
  Eigen::VectorXd values = circulant_eigenvalues(g.circulant_row());
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace circmotion
