// Why region queries are hard: two reductions made concrete.
//
// Maximizing a multilinear polynomial over a box, and answering a region
// threshold query about a SHAP score, both embed NP-complete problems.  This
// program builds each gadget for a small instance, solves it by the library's
// exact vertex enumeration, and reads the combinatorial answer back out of
// the witness.

#include <iostream>

#include "shapbox/shapbox.hpp"

using namespace shapbox;

int main() {
  // --- satisfiability as polynomial maximization ----------------------------
  // (x1 | x2 | x3) & (!x1 | x2 | x3) & (x1 | !x2 | x3) & (x1 | x2 | !x3)
  const Cnf3Formula formula(
      3, {Clause3{{0, false}, {1, false}, {2, false}},
          Clause3{{0, true}, {1, false}, {2, false}},
          Clause3{{0, false}, {1, true}, {2, false}},
          Clause3{{0, false}, {1, false}, {2, true}}});

  const PolynomialMaxInstance sat = sat_to_multilinear(formula);
  std::cout << "objective: " << sat.objective.render() << "\n";

  const ThresholdVerdict sat_verdict =
      polynomial_region_max(sat.objective, sat.region, sat.threshold);
  std::cout << "satisfiable: " << (sat_verdict.answer ? "yes" : "no") << "\n";
  if (sat_verdict.witness) {
    // The maximizing vertex is a 0/1 point, i.e. a truth assignment.
    std::cout << "assignment:";
    std::uint64_t assignment = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      const bool value = sat_verdict.witness->prob(i) == 1;
      if (value) assignment |= std::uint64_t{1} << i;
      std::cout << " x" << i + 1 << "=" << (value ? 1 : 0);
    }
    std::cout << "\nassignment satisfies the formula: "
              << (formula.satisfied_by(assignment) ? "yes" : "no") << "\n";
  }

  // --- vertex cover as a score threshold query ------------------------------
  // The triangle graph: any single node misses an edge, any two adjacent
  // nodes cover all three.
  const VertexCoverInstance triangle(3, {{0, 1}, {0, 2}, {1, 2}}, 2);
  const ShapMaxInstance cover = vc_to_region_max_shap(triangle);

  const ThresholdVerdict cover_verdict = region_max_shap(
      cover.model, cover.entity, cover.feature, cover.region, cover.threshold);
  std::cout << "\ncover of size <= 2 exists: " << (cover_verdict.answer ? "yes" : "no") << "\n";
  if (cover_verdict.witness) {
    // Node i joins the cover exactly when its probability sits at 0.
    std::cout << "cover: {";
    std::uint64_t chosen = 0;
    bool first = true;
    for (std::size_t i = 0; i < triangle.nodes(); ++i) {
      if (cover_verdict.witness->prob(i + 1) != 0) continue;
      chosen |= std::uint64_t{1} << i;
      std::cout << (first ? "" : ", ") << "v" << i + 1;
      first = false;
    }
    std::cout << "}\ncovers every edge: " << (triangle.covers(chosen) ? "yes" : "no") << "\n";
  }

  // The same query with k = 1 comes back negative: the best the region can
  // do falls short of the threshold.
  const ShapMaxInstance tight = vc_to_region_max_shap(VertexCoverInstance(3, triangle.edges(), 1));
  const ThresholdVerdict tight_verdict = region_max_shap(
      tight.model, tight.entity, tight.feature, tight.region, tight.threshold);
  std::cout << "\ncover of size <= 1 exists: " << (tight_verdict.answer ? "yes" : "no") << "\n"
            << "best score " << to_fraction_string(tight_verdict.best) << " vs threshold "
            << to_fraction_string(tight.threshold) << "\n";
  return 0;
}
