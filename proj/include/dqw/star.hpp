#pragma once

#include "dqw/poisson.hpp"
#include "dqw/poly.hpp"

#include <array>
#include <vector>

namespace dqw {

// Moyal product truncated at hbar order n; the result carries order n.
Poly moyal_product(const Poly& f, const Poly& g, const PoissonTensor& alpha, int order);

// (f*g - g*f)/eps at eps = 0.
Poly star_bracket(const Poly& f, const Poly& g, const PoissonTensor& alpha);

// (f*g)*h - f*(g*h); identically zero for an associative product.
Poly check_associativity(const Poly& f, const Poly& g, const Poly& h, const PoissonTensor& alpha, int order);

enum class Ground : int { F = 0, G = 1 };

// Constant-structure admissible graph: every aerial vertex sends an ordered edge pair to the grounds.
struct AdmissibleGraph {
    std::vector<std::array<int, 2>> edges;  // targets, 0 = F ground, 1 = G ground

    int order() const { return static_cast<int>(edges.size()); }
    std::string str() const;
};

std::vector<AdmissibleGraph> enumerate_graphs(int n);

Poly apply_graph_operator(const AdmissibleGraph& graph, const PoissonTensor& alpha, const Poly& f, const Poly& g);

// Constant-case weight: product over aerial vertices of +1/2 (F,G), -1/2 (G,F), 0 otherwise.
Rational graph_weight(const AdmissibleGraph& graph);

Poly kontsevich_constant_product(const Poly& f, const Poly& g, const PoissonTensor& alpha, int order);

enum class Exec { Serial, Parallel };

struct PolyTriple {
    Poly f, g, h;
};

// Batch runners over independent jobs; Parallel fans out with OpenMP.
std::vector<Poly> associativity_batch(const std::vector<PolyTriple>& jobs, const PoissonTensor& alpha, int order,
                                      Exec exec);
std::vector<Poly> moyal_batch(const std::vector<PolyTriple>& jobs, const PoissonTensor& alpha, int order,
                              Exec exec);

}  // namespace dqw
