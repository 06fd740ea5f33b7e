#include "symflow/potential.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace symflow::thermo {

LocallyConstantPotential::LocallyConstantPotential(const TransitionMatrix& matrix, int depth,
                                                   std::map<Word, double> table)
    : depth_(depth), table_(std::move(table)) {
    if (depth_ < 1) throw Error("potential depth must be >= 1");
    const std::vector<Word> admissible = matrix.words(depth_);
    if (admissible.size() != table_.size())
        throw Error("potential table must cover exactly the admissible words: got " +
                    std::to_string(table_.size()) + ", expected " + std::to_string(admissible.size()));
    for (const Word& w : admissible) {
        const auto it = table_.find(w);
        if (it == table_.end()) throw Error("potential table missing an admissible word");
        if (!std::isfinite(it->second)) throw Error("potential values must be finite");
    }
}

LocallyConstantPotential LocallyConstantPotential::zero(const TransitionMatrix& matrix, int depth) {
    std::map<Word, double> table;
    for (const Word& w : matrix.words(depth)) table[w] = 0.0;
    return LocallyConstantPotential(matrix, depth, std::move(table));
}

LocallyConstantPotential LocallyConstantPotential::indicator(const TransitionMatrix& matrix, const Word& w) {
    if (!matrix.admissible(w)) throw InadmissibleWordError("indicator: word is not admissible");
    std::map<Word, double> table;
    for (const Word& u : matrix.words(static_cast<int>(w.size()))) table[u] = (u == w) ? 1.0 : 0.0;
    return LocallyConstantPotential(matrix, static_cast<int>(w.size()), std::move(table));
}

double LocallyConstantPotential::operator()(const Word& window) const {
    const auto it = table_.find(window);
    if (it == table_.end()) throw InadmissibleWordError("potential: window is not an admissible word");
    return it->second;
}

double LocallyConstantPotential::window_value(const Word& w, std::size_t pos) const {
    if (pos + depth_ > w.size()) throw WordTooShortError("potential: window exceeds word");
    Word window(w.begin() + pos, w.begin() + pos + depth_);
    return (*this)(window);
}

LocallyConstantPotential LocallyConstantPotential::scaled(double factor) const {
    LocallyConstantPotential out = *this;
    for (auto& [w, v] : out.table_) v *= factor;
    return out;
}

LocallyConstantPotential lift(const TransitionMatrix& matrix, const LocallyConstantPotential& phi, int depth) {
    if (depth < phi.depth()) throw Error("lift: target depth smaller than current depth");
    if (depth == phi.depth()) return phi;
    std::map<Word, double> table;
    for (const Word& w : matrix.words(depth)) {
        const Word prefix(w.begin(), w.begin() + phi.depth());
        table[w] = phi(prefix);
    }
    return LocallyConstantPotential(matrix, depth, std::move(table));
}

LocallyConstantPotential combine(const TransitionMatrix& matrix, const LocallyConstantPotential& phi,
                                 double a, const LocallyConstantPotential& psi, double b) {
    const int depth = std::max(phi.depth(), psi.depth());
    const LocallyConstantPotential p = lift(matrix, phi, depth);
    const LocallyConstantPotential q = lift(matrix, psi, depth);
    std::map<Word, double> table;
    for (const auto& [w, v] : p.table()) table[w] = a * v + b * q(w);
    return LocallyConstantPotential(matrix, depth, std::move(table));
}

double birkhoff_sum(const LocallyConstantPotential& phi, const Word& w) {
    if (static_cast<int>(w.size()) < phi.depth())
        throw WordTooShortError("birkhoff_sum: word shorter than potential depth");
    double total = 0;
    for (std::size_t i = 0; i + phi.depth() <= w.size(); ++i) total += phi.window_value(w, i);
    return total;
}

double birkhoff_sum_cyclic(const LocallyConstantPotential& phi, const Word& orbit_word) {
    const std::size_t n = orbit_word.size();
    if (n == 0) throw Error("birkhoff_sum_cyclic: empty orbit");
    double total = 0;
    Word window(phi.depth(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < phi.depth(); ++j) window[j] = orbit_word[(i + j) % n];
        total += phi(window);
    }
    return total;
}

PotentialParse parse_potential(std::istream& in, const TransitionMatrix& matrix) {
    std::map<Word, double> given;
    std::string line;
    int depth = -1;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string word_token;
        if (!(ls >> word_token)) continue; // blank line
        if (word_token[0] == '#') continue;
        double value = 0;
        if (!(ls >> value))
            throw ParseError("potential file line " + std::to_string(line_no) + ": missing value");
        Word w;
        if (word_token.find(',') != std::string::npos) {
            std::istringstream ws(word_token);
            std::string tok;
            while (std::getline(ws, tok, ',')) w.push_back(std::stoi(tok));
        } else {
            for (const char c : word_token) {
                if (c < '0' || c > '9')
                    throw ParseError("potential file line " + std::to_string(line_no) + ": bad word token");
                w.push_back(c - '0');
            }
        }
        if (depth < 0) depth = static_cast<int>(w.size());
        if (static_cast<int>(w.size()) != depth)
            throw ParseError("potential file line " + std::to_string(line_no) + ": inconsistent word length");
        if (!matrix.admissible(w))
            throw ParseError("potential file line " + std::to_string(line_no) + ": inadmissible word");
        given[w] = value;
    }
    if (depth < 0) throw ParseError("potential file: no entries");
    std::vector<std::string> warnings;
    std::map<Word, double> table;
    for (const Word& w : matrix.words(depth)) {
        const auto it = given.find(w);
        if (it != given.end()) {
            table[w] = it->second;
        } else {
            table[w] = 0.0;
            std::string text = "word ";
            for (const Symbol s : w) text += std::to_string(s);
            warnings.push_back(text + " missing; defaulted to 0");
        }
    }
    return PotentialParse{LocallyConstantPotential(matrix, depth, std::move(table)), std::move(warnings)};
}

PotentialParse load_potential(const std::string& path, const TransitionMatrix& matrix) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open potential file: " + path);
    return parse_potential(in, matrix);
}

} // namespace symflow::thermo
