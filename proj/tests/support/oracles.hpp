// Independent reference implementations used as test oracles. Each one is
// deliberately naive: enumeration, brute-force tallies, or extended precision.
#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "h2pc/bayesnet.hpp"
#include "h2pc/dataset.hpp"
#include "h2pc/graph.hpp"

namespace h2pc::oracle {

// ---- graphs ----

bool has_cycle(int n, const std::vector<Edge>& edges);

/// Enumerates every simple path of the skeleton and checks it for blocking.
bool d_separated_by_paths(const Dag& dag, Var x, Var y, const std::vector<Var>& z);

/// Separation in the moralized ancestral graph of {x, y} ∪ z.
bool d_separated_by_moralization(const Dag& dag, Var x, Var y, const std::vector<Var>& z);

/// Every labelled DAG on n nodes (n <= 5).
const std::vector<Dag>& all_dags(int n);

/// (a, c, b) with a < b, a -> c <- b, a and b non-adjacent.
std::set<std::tuple<Var, Var, Var>> v_structures(const Dag& dag);

/// Skeleton plus v-structures; equal keys mean Markov equivalence.
std::pair<LinkSet, std::set<std::tuple<Var, Var, Var>>> equivalence_key(const Dag& dag);

/// CPDAG as the union of all equivalent DAGs: an edge is directed iff every
/// member orients it the same way.
Pdag cpdag_by_enumeration(const Dag& dag);

/// Differing node pairs, computed from the exported edge lists.
int shd_by_pairs(const Pdag& a, const Pdag& b);

// ---- statistics ----

/// I(X;Y|Z) = H(XZ) + H(YZ) - H(XYZ) - H(Z), in long double.
long double mi_by_entropies(const ContingencyTable& t);

int dof_by_slices(const ContingencyTable& t);

/// Chi-square upper tail evaluated with 50-digit arithmetic.
double chi_square_sf_precise(double stat, int dof);

double log_gamma_precise(double x);

/// Row-by-row tally into a map keyed by (x, y, z-configuration).
std::map<std::tuple<int, int, std::vector<int>>, int> tally(const Dataset& data, Var x, Var y,
                                                             const std::vector<Var>& z);

// ---- scores ----

double bdeu_by_tally(const Dataset& data, Var child, const std::vector<Var>& parents, double ess);
double bic_by_tally(const Dataset& data, Var child, const std::vector<Var>& parents);

// ---- random instances ----

Dag random_dag(int n, double edge_probability, std::mt19937_64& rng);

/// Network on `dag` with Dirichlet(concentration) rows and the given arities.
BayesNet random_network(const Dag& dag, const std::vector<int>& arities, double concentration,
                        std::mt19937_64& rng);

/// Table with R, C <= max_rows/max_cols, L <= max_strata, at most max_total
/// observations, and a random fraction of structurally empty cells.
ContingencyTable random_table(std::mt19937_64& rng, int max_rows, int max_cols, int max_strata, int max_total);

/// Independent uniform columns.
Dataset random_dataset(const std::vector<int>& arities, std::size_t rows, std::mt19937_64& rng);

}  // namespace h2pc::oracle
