#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "symflow/transition_matrix.hpp"

namespace symflow::thermo {

using sft::Symbol;
using sft::TransitionMatrix;
using sft::Word;

// Depth-k real table on admissible k-words. This is the desk-scale Hoelder
// class: locally constant functions are Hoelder for the 2^{-l} metric and
// make the transfer operator an exact finite matrix.
class LocallyConstantPotential {
  public:
    // Table must assign a finite value to exactly the admissible k-words.
    LocallyConstantPotential(const TransitionMatrix& matrix, int depth, std::map<Word, double> table);

    static LocallyConstantPotential zero(const TransitionMatrix& matrix, int depth = 1);
    // Indicator of the cylinder [w]; depth = |w|.
    static LocallyConstantPotential indicator(const TransitionMatrix& matrix, const Word& w);

    int depth() const { return depth_; }
    const std::map<Word, double>& table() const { return table_; }

    // Value on a window of exactly depth() symbols.
    double operator()(const Word& window) const;
    // Value of the window starting at position pos inside w.
    double window_value(const Word& w, std::size_t pos) const;

    LocallyConstantPotential scaled(double factor) const;

  private:
    int depth_;
    std::map<Word, double> table_;
};

// a*phi + b*psi, lifted to the common depth max(depth(phi), depth(psi)).
LocallyConstantPotential combine(const TransitionMatrix& matrix, const LocallyConstantPotential& phi,
                                 double a, const LocallyConstantPotential& psi, double b);

LocallyConstantPotential lift(const TransitionMatrix& matrix, const LocallyConstantPotential& phi, int depth);

// Birkhoff sum over the |w|-k+1 full windows of w; requires |w| >= depth.
double birkhoff_sum(const LocallyConstantPotential& phi, const Word& w);
// Cyclic Birkhoff sum over all |w| windows, wrapping around.
double birkhoff_sum_cyclic(const LocallyConstantPotential& phi, const Word& orbit_word);

struct PotentialParse {
    LocallyConstantPotential potential;
    std::vector<std::string> warnings; // admissible words defaulted to 0
};

// Text format: lines "word value" with the word written in symbol indices
// ("01 0.5"), or comma separated for alphabets past 9. Missing admissible
// words default to 0 with a warning.
PotentialParse parse_potential(std::istream& in, const TransitionMatrix& matrix);
PotentialParse load_potential(const std::string& path, const TransitionMatrix& matrix);

} // namespace symflow::thermo
