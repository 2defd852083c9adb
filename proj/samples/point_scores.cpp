// Point attributions on a tiny hand-built classifier.
//
// The model accepts an entity exactly when at most one of its three features
// is set.  We score every feature for the all-zero entity under a product
// distribution, cross-check two computation routes, and print the closed-form
// attribution polynomial of one feature.

#include <iostream>

#include "shapbox/shapbox.hpp"

using namespace shapbox;

int main() {
  const FeatureSpacePtr space = make_space(std::vector<std::string>{"x", "y", "z"});

  // Truth tables list accepted entities as bitmasks (feature i = bit i); a
  // decision tree for the same function is derived mechanically.
  const TruthTableModel table(space, std::vector<std::uint64_t>{0b000, 0b001, 0b010, 0b100});
  const DecisionTree tree = to_decision_tree(table);
  const Entity entity(space, std::uint64_t{0});

  const ProductDistribution dist(space, {Rational(1, 2), Rational(1, 2), Rational(3, 4)});

  std::cout << "prediction for 000: " << (tree.evaluate(entity) ? 1 : 0) << "\n\n";

  Rational total = 0;
  for (std::size_t f = 0; f < space->size(); ++f) {
    const Rational score = shap_tree_eval(tree, dist, entity, f);
    total += score;

    // The polynomial-size path route and the exponential definitional route
    // always agree; the latter is only viable because the model is tiny.
    if (score != shap_brute_force(tree, dist, entity, f)) {
      std::cerr << "internal disagreement - please report this\n";
      return 1;
    }
    std::cout << "score of " << space->name(f) << ": " << to_fraction_string(score) << " (~"
              << to_double(score) << ")\n";
  }

  // Efficiency: the scores distribute the gap between the prediction and the
  // model's acceptance probability.
  const Rational mean = expected_value_given(tree, dist, entity, 0);
  std::cout << "\nsum of scores:            " << to_fraction_string(total) << "\n"
            << "prediction - mean output: " << to_fraction_string(Rational(1) - mean) << "\n";

  // The score of z as a function of the (unknown) feature probabilities.
  std::cout << "\nscore of z as a polynomial:\n  "
            << shap_polynomial(tree, entity, 2).render() << "\n";
  return 0;
}
