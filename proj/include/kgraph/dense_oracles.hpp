#pragma once

#include "kgraph/kernel.hpp"
#include "kgraph/linear_operator.hpp"
#include "kgraph/point_set.hpp"
#include "kgraph/edge_list.hpp"

namespace kgraph {

// Brute-force O(n^2) oracles. The serial versions are the reference every
// fast path is tested against; the omp versions are the same arithmetic with
// the outer loop parallelized (row-owned accumulation, schedule independent).

Vec dense_adjacency_apply(const PointSet& P, const KernelSpec& k, const Vec& y);
Vec dense_laplacian_apply(const PointSet& P, const KernelSpec& k, const Vec& y);

Vec dense_adjacency_apply_omp(const PointSet& P, const KernelSpec& k, const Vec& y);
Vec dense_laplacian_apply_omp(const PointSet& P, const KernelSpec& k, const Vec& y);

// Kernel degrees g_i = sum_{j != i} f(||xi-xj||^2).
Vec kernel_degrees(const PointSet& P, const KernelSpec& k);

// The complete K-graph as an explicit edge list (zero-weight pairs dropped).
WeightedEdgeList kernel_graph(const PointSet& P, const KernelSpec& k);

// Sparse Laplacian application L_G y.
Vec laplacian_apply(const WeightedEdgeList& G, const Vec& y);

LinearOperator dense_adjacency_operator(const PointSet& P, const KernelSpec& k);
LinearOperator dense_laplacian_operator(const PointSet& P, const KernelSpec& k);

}  // namespace kgraph
