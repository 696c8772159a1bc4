#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace circmotion {

/// Undirected edge between two zero-based vertex indices.
using Edge = std::pair<int, int>;

/// Undirected, unweighted interaction graph with its cached Laplacian.
///
/// The Laplacian follows the usual convention: l_jj is the degree of vertex j,
/// l_jk = -1 when j and k are neighbours and 0 otherwise. Instances are
/// immutable once constructed.
class InteractionGraph {
 public:
  /// Builds a graph on `n` vertices. Indices are zero-based; self-loops and
  /// out-of-range indices throw std::invalid_argument. Duplicate edges are
  /// merged.
  static InteractionGraph from_edges(int n, std::span<const Edge> edges);

  /// Builds the circulant graph whose Laplacian has `first_row` as its first
  /// row; every following row is the previous one rotated right by one.
  static InteractionGraph from_circulant_row(std::span<const double> first_row);

  /// Disjoint union of `blocks`; vertices are numbered block after block.
  static InteractionGraph block_diagonal(std::span<const InteractionGraph> blocks);

  static InteractionGraph complete(int n);

  int size() const { return n_; }
  const Eigen::MatrixXd& laplacian() const { return laplacian_; }
  const std::vector<std::vector<int>>& neighbors() const { return neighbors_; }
  std::vector<Edge> edges() const;

  bool is_connected() const { return connected_; }
  bool is_circulant() const { return circulant_; }

  /// Largest Laplacian eigenvalue, cached at construction.
  double lambda_max() const { return lambda_max_; }

  /// First Laplacian row. Only meaningful for circulant graphs.
  Eigen::VectorXd circulant_row() const { return laplacian_.row(0).transpose(); }

 private:
  explicit InteractionGraph(std::vector<std::vector<int>> neighbors);

  int n_ = 0;
  std::vector<std::vector<int>> neighbors_;
  Eigen::MatrixXd laplacian_;
  bool connected_ = false;
  bool circulant_ = false;
  double lambda_max_ = 0.0;
};

/// Fourier eigenbasis of a circulant Laplacian.
struct CirculantSpectrum {
  Eigen::VectorXd angles;         // phi_k = k * 2 pi / N, k = 0..N-1
  Eigen::MatrixXcd eigenvectors;  // column l holds exp(i l phi), norm sqrt(N)
  Eigen::VectorXd eigenvalues;    // eigenvalues(l) pairs with column l
  double lambda_max = 0.0;
};

/// Closed-form spectrum of a circulant graph. Throws std::invalid_argument
/// for non-circulant graphs; use dense_eigenvalues() for those.
CirculantSpectrum circulant_spectrum(const InteractionGraph& g);

/// Ascending eigenvalues of a symmetric matrix.
Eigen::VectorXd dense_eigenvalues(const Eigen::MatrixXd& symmetric);

/// Largest Laplacian eigenvalue (closed form when circulant).
double lambda_max(const InteractionGraph& g);

bool is_connected(const InteractionGraph& g);

/// Eigenvalues of a circulant graph in closed form, falling back to the dense
/// solver otherwise; sorted ascending.
Eigen::VectorXd laplacian_eigenvalues(const InteractionGraph& g);

/// Eigenvalue magnitude below which an eigenvalue is classified as zero.
inline constexpr double kZeroEigenvalueTolerance = 1e-9;

}  // namespace circmotion
