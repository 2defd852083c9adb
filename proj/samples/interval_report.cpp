// Attribution intervals and decision queries under distribution uncertainty.
//
// When the feature probabilities are only known up to per-feature intervals
// (a hyperrectangle of product distributions), every SHAP score becomes an
// interval, and qualitative questions - can the sign flip?  can the score
// vanish?  does one feature always outrank another? - get exact answers by
// vertex enumeration.

#include <iostream>

#include "shapbox/shapbox.hpp"

using namespace shapbox;

int main() {
  const FeatureSpacePtr space = make_space(std::vector<std::string>{"x", "y", "z"});
  const DecisionTree tree = to_decision_tree(
      TruthTableModel(space, std::vector<std::uint64_t>{0b000, 0b001, 0b010, 0b100}));
  const Entity entity(space, std::uint64_t{0});

  // p_x in [1/3, 1/2], p_y = 1 exactly, p_z in [1/3, 2/3].
  const Hyperrectangle box(space, {Rational(1, 3), Rational(1), Rational(1, 3)},
                           {Rational(1, 2), Rational(1), Rational(2, 3)});

  std::cout << "per-feature score intervals over the box:\n";
  for (std::size_t f = 0; f < space->size(); ++f) {
    const ShapInterval iv = shap_interval(tree, entity, f, box);
    std::cout << "  " << space->name(f) << ": [" << to_fraction_string(iv.lo) << ", "
              << to_fraction_string(iv.hi) << "]  attained at p = (";
    for (std::size_t i = 0; i < space->size(); ++i)
      std::cout << (i ? ", " : "") << to_fraction_string(iv.argmin.prob(i));
    std::cout << ") and (";
    for (std::size_t i = 0; i < space->size(); ++i)
      std::cout << (i ? ", " : "") << to_fraction_string(iv.argmax.prob(i));
    std::cout << ")\n";
  }

  // Sign questions about z.
  const AmbiguityVerdict amb = region_ambiguity(tree, entity, 2, box);
  const IrrelevancyVerdict irr = region_irrelevancy(tree, entity, 2, box);
  std::cout << "\ncan the score of z be both positive and negative?  "
            << (amb.answer ? "yes" : "no") << "\n"
            << "can the score of z be exactly zero?                " << (irr.answer ? "yes" : "no")
            << "\n";

  // Does y outrank x everywhere in the box?
  const DominanceVerdict dom = feature_dominance(tree, entity, 1, 0, box);
  std::cout << "is y's score always >= x's?                        "
            << (dom.answer ? "yes" : "no") << " (margin at least "
            << to_fraction_string(dom.min_difference) << ")\n";

  // Top-k ranking stability: is the best feature the same at every vertex?
  const std::vector<RankingSensitivity> sens =
      ranking_sensitivity(tree, entity, box, {1, space->size()});
  for (const RankingSensitivity& s : sens) {
    std::cout << "\ntop-" << s.k << " prefix is "
              << (s.unanimous ? "the same at every vertex" : "sensitive to the uncertainty")
              << ":\n";
    for (const RankingPrefix& prefix : s.prefixes) {
      std::cout << "  [";
      for (std::size_t i = 0; i < prefix.features.size(); ++i)
        std::cout << (i ? " " : "") << space->name(prefix.features[i]);
      std::cout << "] at " << prefix.vertex_count << " of " << box.vertex_count()
                << " vertices\n";
    }
  }
  return 0;
}
